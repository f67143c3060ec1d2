#include <cmath>

#include "doctest.h"
#include "phylosmc/crbd.hpp"
#include "phylosmc/newick.hpp"

using namespace phylosmc;

namespace {

bool same_shape(const Tree& a, int ia, const Tree& b, int ib) {
  const TreeNode& na = a.node(ia);
  const TreeNode& nb = b.node(ib);
  if (std::abs(na.age - nb.age) > 1e-9) return false;
  if (na.label != nb.label) return false;
  if (na.is_leaf() != nb.is_leaf()) return false;
  if (na.is_leaf()) return true;
  if ((na.right < 0) != (nb.right < 0)) return false;
  if (!same_shape(a, na.left, b, nb.left)) return false;
  if (na.right >= 0 && !same_shape(a, na.right, b, nb.right)) return false;
  return true;
}

bool same_tree(const Tree& a, const Tree& b) {
  return same_shape(a, a.root(), b, b.root());
}

}  // namespace

TEST_CASE("parse a cherry") {
  const Tree t = parse_newick("(A:1.0,B:1.0);");
  CHECK(t.node(t.root()).age == doctest::Approx(1.0));
  int extant = 0;
  for (int i = 0; i < t.size(); ++i)
    if (t.is_extant_leaf(i)) ++extant;
  CHECK(extant == 2);
  CHECK(t.node(t.node(t.root()).left).label == "A");
  CHECK(t.node(t.node(t.root()).right).label == "B");
}

TEST_CASE("parse nested structure with ages from path lengths") {
  const Tree t = parse_newick("((A:1.0,B:1.0):0.5,C:1.5);");
  const TreeNode& root = t.node(t.root());
  CHECK(root.age == doctest::Approx(1.5));
  CHECK(t.node(root.left).age == doctest::Approx(1.0));
  int extant = 0;
  for (int i = 0; i < t.size(); ++i)
    if (t.is_extant_leaf(i)) ++extant;
  CHECK(extant == 3);
}

TEST_CASE("parse failures") {
  CHECK_THROWS_AS(parse_newick("((A:1.0);"), NewickError);
  CHECK_THROWS_AS(parse_newick("(A:1.0,B:1.0)"), NewickError);
  CHECK_THROWS_AS(parse_newick("(A,B:1.0);"), NewickError);
  CHECK_THROWS_AS(parse_newick("(A:1.0,B:1.0,C:1.0,D:1.0);"), NewickError);
  CHECK_THROWS_AS(parse_newick("(A:1.0,B:1.0); junk"), NewickError);
}

TEST_CASE("extinct leaf keeps its branch length") {
  const Tree t = parse_newick("((A:1.0,B:0.7):0.5,C:1.5);");
  const int inner = t.node(t.root()).left;
  const int b = t.node(inner).right;
  CHECK(t.node(b).label == "B");
  CHECK(t.node(b).age == doctest::Approx(0.3));
  CHECK(t.branch_length(b) == doctest::Approx(0.7));
}

TEST_CASE("near-ultrametric leaves snap to age zero") {
  const Tree t = parse_newick("(A:1.0,B:0.9999999);");
  for (int i = 0; i < t.size(); ++i)
    if (t.node(i).is_leaf()) CHECK(t.node(i).age == 0.0);
}

TEST_CASE("write a cherry") {
  const Tree t = parse_newick("(A:1.0,B:1.0);");
  CHECK(write_newick(t) == "(A:1,B:1);");
}

TEST_CASE("round trip on simulated trees") {
  // The root age is recovered from the deepest root-to-leaf path, so the
  // property needs at least one extant leaf.
  Rng rng(31);
  int seen = 0;
  while (seen < 100) {
    const Tree t = simulate_crbd(1.0, 0.5, 2.0, rng);
    if (stats(t).extant == 0) continue;
    ++seen;
    const Tree back = parse_newick(write_newick(t));
    CHECK(same_tree(t, back));
  }
}

TEST_CASE("tip state table") {
  const auto states = parse_tip_states("label,state\nA,0\nB,1\n");
  REQUIRE(states.size() == 2);
  CHECK(states[0] == std::pair<std::string, int>{"A", 0});
  CHECK(states[1] == std::pair<std::string, int>{"B", 1});
  CHECK_THROWS(parse_tip_states("name,state\nA,0\n"));
  CHECK_THROWS(parse_tip_states("label,state\nA,2\n"));
}
