#include "phylosmc/newick.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace phylosmc {

NewickError::NewickError(const std::string& what, std::size_t pos)
    : std::runtime_error(what + " at position " + std::to_string(pos)),
      position(pos) {}

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  std::vector<TreeNode> nodes;
  std::vector<double> depth;  // branch length during parse, then path from root

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) throw NewickError("unexpected end of input", pos);
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c)
      throw NewickError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  std::string read_label() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size()) {
      const char c = text[pos];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos;
    }
    return std::string(text.substr(start, pos - start));
  }

  double read_length() {
    skip_ws();
    double value = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first)
      throw NewickError("expected branch length", pos);
    pos += static_cast<std::size_t>(ptr - first);
    return value;
  }

  // Parses one subtree; returns its node index. depth[] holds the incoming
  // branch length for now; ages are assigned in finish().
  int parse_subtree(int parent, bool is_root) {
    std::vector<int> children;
    std::string label;
    const int self = static_cast<int>(nodes.size());
    nodes.push_back({});
    depth.push_back(0.0);
    nodes[self].parent = parent;

    if (peek() == '(') {
      ++pos;
      // Children read their branch length before the node depth is known, so
      // parse child structure first with a placeholder depth and fix up after.
      while (true) {
        children.push_back(parse_subtree(self, false));
        if (peek() != ',') break;
        ++pos;
      }
      expect(')');
      const std::size_t arity_pos = pos;
      if (children.size() > 2 || (children.size() != 2 && !is_root))
        throw NewickError("non-binary node", arity_pos);
      nodes[self].left = children[0];
      if (children.size() == 2) nodes[self].right = children[1];
    }
    if (peek() != ':' && peek() != ',' && peek() != ')' && peek() != ';')
      label = read_label();
    nodes[self].label = std::move(label);

    double len = 0.0;
    if (pos < text.size() && peek() == ':') {
      ++pos;
      len = read_length();
    } else if (!is_root) {
      throw NewickError("missing branch length", pos);
    }
    if (!is_root && !(len > 0))
      throw NewickError("non-positive branch length", pos);
    depth[self] = len;
    return self;
  }

  void accumulate_depths(int i) {
    for (int c : {nodes[i].left, nodes[i].right}) {
      if (c < 0) continue;
      depth[c] += depth[i];
      accumulate_depths(c);
    }
  }

  Tree finish(int root) {
    depth[root] = 0.0;
    accumulate_depths(root);
    double max_depth = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].is_leaf()) max_depth = std::max(max_depth, depth[i]);
    const double tol = 1e-6 * max_depth;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double age = max_depth - depth[i];
      nodes[i].age = (nodes[i].is_leaf() && age <= tol) ? 0.0 : age;
    }
    return Tree(std::move(nodes), root);
  }
};

}  // namespace

Tree parse_newick(std::string_view text) {
  Parser p{text};
  const int root = p.parse_subtree(-1, true);
  p.expect(';');
  p.skip_ws();
  if (p.pos != text.size())
    throw NewickError("trailing characters", p.pos);
  return p.finish(root);
}

namespace {

void append_number(std::string& out, double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, ptr);
}

void write_subtree(const Tree& tree, int i, std::string& out) {
  const TreeNode& n = tree.node(i);
  if (!n.is_leaf()) {
    out += '(';
    write_subtree(tree, n.left, out);
    if (n.right >= 0) {
      out += ',';
      write_subtree(tree, n.right, out);
    }
    out += ')';
  }
  out += n.label;
  if (n.parent >= 0) {
    out += ':';
    append_number(out, tree.branch_length(i));
  }
}

}  // namespace

std::string write_newick(const Tree& tree) {
  std::string out;
  write_subtree(tree, tree.root(), out);
  out += ';';
  return out;
}

std::vector<std::pair<std::string, int>> parse_tip_states(
    std::string_view csv) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (line.empty()) continue;
    ++line_no;
    if (line_no == 1) {
      if (line != "label,state")
        throw std::runtime_error("tip-state CSV: expected header label,state");
      continue;
    }
    const std::size_t comma = line.rfind(',');
    if (comma == std::string_view::npos)
      throw std::runtime_error("tip-state CSV: malformed line " +
                               std::to_string(line_no));
    std::string_view state = line.substr(comma + 1);
    if (state != "0" && state != "1")
      throw std::runtime_error("tip-state CSV: state must be 0 or 1 on line " +
                               std::to_string(line_no));
    out.emplace_back(std::string(line.substr(0, comma)), state == "1" ? 1 : 0);
  }
  return out;
}

}  // namespace phylosmc
