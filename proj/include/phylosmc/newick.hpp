#ifndef PHYLOSMC_NEWICK_HPP
#define PHYLOSMC_NEWICK_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phylosmc/tree.hpp"

namespace phylosmc {

class NewickError : public std::runtime_error {
 public:
  NewickError(const std::string& what, std::size_t position);
  std::size_t position;
};

// Parses a single rooted Newick expression terminated by ";". Branch lengths
// are required on all non-root edges. Node ages are recovered by measuring
// path lengths from the root (root age = depth of the deepest leaf); leaves
// within 1e-6 of the deepest leaf, relative to tree depth, are snapped to
// age 0 to absorb rounding noise in real files.
Tree parse_newick(std::string_view text);

// Inverse of parse_newick up to age tolerance; numbers are written in the
// shortest round-trip form.
std::string write_newick(const Tree& tree);

// Reads a tip-state table: CSV with header "label,state", state in {0,1}.
std::vector<std::pair<std::string, int>> parse_tip_states(std::string_view csv);

}  // namespace phylosmc

#endif
