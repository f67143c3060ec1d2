#include "phylosmc/tree.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace phylosmc {

Tree::Tree(std::vector<TreeNode> nodes, int root)
    : nodes_(std::move(nodes)), root_(root) {
  if (nodes_.empty() || root < 0 || root >= size())
    throw std::invalid_argument("Tree: invalid root index");
  for (int i = 0; i < size(); ++i) {
    const TreeNode& n = nodes_[i];
    const bool has_left = n.left >= 0;
    const bool has_right = n.right >= 0;
    if (i == root_) {
      if (n.parent != -1) throw std::invalid_argument("Tree: root has parent");
      if (has_right && !has_left)
        throw std::invalid_argument("Tree: malformed root children");
    } else {
      if (n.parent < 0 || n.parent >= size())
        throw std::invalid_argument("Tree: missing parent link");
      if (has_left != has_right)
        throw std::invalid_argument("Tree: internal node without 2 children");
      if (!(n.age < nodes_[n.parent].age))
        throw std::invalid_argument("Tree: child not younger than parent");
    }
    if (n.age < 0) throw std::invalid_argument("Tree: negative age");
  }
  // Depth-first pre-order over non-root nodes, first child first.
  preorder_.reserve(nodes_.size() - 1);
  std::vector<int> stack;
  auto push_children = [&](int i) {
    if (nodes_[i].right >= 0) stack.push_back(nodes_[i].right);
    if (nodes_[i].left >= 0) stack.push_back(nodes_[i].left);
  };
  push_children(root_);
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    preorder_.push_back(i);
    push_children(i);
  }
  if (preorder_.size() + 1 != nodes_.size())
    throw std::invalid_argument("Tree: disconnected nodes");
}

TreeStats stats(const Tree& tree) {
  TreeStats s;
  for (int i : tree.preorder()) {
    const TreeNode& n = tree.node(i);
    s.branches += 1;
    s.branch_length += tree.branch_length(i);
    if (!n.is_leaf())
      s.speciations += 1;
    else if (n.age == 0.0)
      s.extant += 1;
    else
      s.extinctions += 1;
  }
  const TreeNode& r = tree.node(tree.root());
  if (r.is_leaf()) (r.age == 0.0 ? s.extant : s.extinctions) += 1;
  return s;
}

namespace {

// Copies the pruned subtree rooted at `i` into `out`, suppressing single-child
// internals. Returns the new index, or -1 when the subtree is fully extinct.
int prune_rec(const Tree& tree, int i, int new_parent,
              std::vector<TreeNode>& out) {
  const TreeNode& n = tree.node(i);
  if (n.is_leaf()) {
    if (n.age != 0.0) return -1;
    out.push_back({n.age, new_parent, -1, -1, n.label, n.tip_state});
    return static_cast<int>(out.size()) - 1;
  }
  // Reserve the slot before recursing so children can link back to it.
  const int slot = static_cast<int>(out.size());
  out.push_back({n.age, new_parent, -1, -1, n.label, n.tip_state});
  const int l = prune_rec(tree, n.left, slot, out);
  const int r = prune_rec(tree, n.right, slot, out);
  if (l >= 0 && r >= 0) {
    out[slot].left = l;
    out[slot].right = r;
    return slot;
  }
  const int kept = l >= 0 ? l : r;
  if (kept < 0) {
    out.resize(slot);  // fully extinct subtree
    return -1;
  }
  // Degree-2 node: splice the kept child past this node. The kept child is
  // the first node appended after the slot, so move it up and relink.
  out.erase(out.begin() + slot);
  for (std::size_t j = slot; j < out.size(); ++j) {
    auto fix = [&](int& idx) {
      if (idx > slot)
        idx -= 1;
      else if (idx == slot)
        idx = new_parent;
    };
    fix(out[j].parent);
    fix(out[j].left);
    fix(out[j].right);
  }
  return kept - 1;
}

}  // namespace

Tree prune(const Tree& tree) {
  std::vector<TreeNode> out;
  const TreeNode& root = tree.node(tree.root());
  if (root.is_leaf()) {
    if (root.age != 0.0) throw std::runtime_error("prune: fully extinct tree");
    return tree;
  }
  out.push_back({root.age, -1, -1, -1, root.label, root.tip_state});
  const int l = prune_rec(tree, root.left, 0, out);
  const int r = root.right >= 0 ? prune_rec(tree, root.right, 0, out) : -1;
  if (l < 0 && r < 0) throw std::runtime_error("prune: fully extinct tree");
  out[0].left = l >= 0 ? l : r;
  out[0].right = (l >= 0 && r >= 0) ? r : -1;
  return Tree(std::move(out), 0);
}

Tree with_tip_states(const Tree& tree,
                     const std::vector<std::pair<std::string, int>>& states) {
  std::map<std::string, int> table(states.begin(), states.end());
  std::vector<TreeNode> nodes = tree.nodes();
  for (TreeNode& n : nodes) {
    if (!n.is_leaf() || n.label.empty()) continue;
    auto it = table.find(n.label);
    n.tip_state = it == table.end() ? -1 : it->second;
  }
  return Tree(std::move(nodes), tree.root());
}

}  // namespace phylosmc
