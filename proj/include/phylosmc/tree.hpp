#ifndef PHYLOSMC_TREE_HPP
#define PHYLOSMC_TREE_HPP

#include <string>
#include <vector>

namespace phylosmc {

// Node of a rooted phylogeny. Ages are in before-present time: extant tips at
// age 0, internal nodes and extinct tips at age > 0. Stored in a flat vector
// inside Tree; child/parent links are indices (-1 when absent).
struct TreeNode {
  double age = 0.0;
  int parent = -1;
  int left = -1;
  int right = -1;
  std::string label;
  int tip_state = -1;  // -1 unknown, otherwise 0/1 (tips only)

  bool is_leaf() const { return left < 0; }
};

struct TreeStats {
  int speciations = 0;        // S, excluding the root
  int extant = 0;             // C
  int extinctions = 0;        // X
  double branch_length = 0;   // L, sum over all non-root nodes
  int branches = 0;           // T
};

// Immutable rooted phylogeny. Internal nodes have exactly two children; the
// root may additionally have a single child (the origin stalk produced by the
// generative process). Every non-root node is strictly younger than its
// parent. The pre-order sequence of non-root nodes fixes the checkpoint
// order, first child as written.
class Tree {
 public:
  Tree(std::vector<TreeNode> nodes, int root);

  int root() const { return root_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const TreeNode& node(int i) const { return nodes_[i]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  // Non-root nodes in depth-first pre-order; length equals the branch count.
  const std::vector<int>& preorder() const { return preorder_; }

  // Length of the branch ending at node i (parent age minus node age).
  double branch_length(int i) const {
    return nodes_[nodes_[i].parent].age - nodes_[i].age;
  }

  bool is_extant_leaf(int i) const {
    return nodes_[i].is_leaf() && nodes_[i].age == 0.0;
  }

 private:
  std::vector<TreeNode> nodes_;
  int root_;
  std::vector<int> preorder_;
};

TreeStats stats(const Tree& tree);

// Removes all subtrees containing only extinct lineages, suppressing the
// degree-2 internal nodes this creates (branch lengths are summed since node
// ages are preserved). Throws std::runtime_error when no leaf is extant.
Tree prune(const Tree& tree);

// Returns a copy of `tree` with tip states attached by leaf label; labels
// absent from the table keep the unknown state.
Tree with_tip_states(const Tree& tree,
                     const std::vector<std::pair<std::string, int>>& states);

}  // namespace phylosmc

#endif
