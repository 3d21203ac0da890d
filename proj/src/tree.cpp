#include "mgl/tree.hpp"

#include <algorithm>

namespace mgl {

namespace {
const std::string kEmpty;
}

bool is_variable_category(const Category& cat) {
  return cat.size() > 3 && cat.compare(0, 3, "Var") == 0;
}

Tree Tree::integer(std::string digits) {
  auto n = std::make_shared<Node>();
  n->leaf = true;
  n->label = std::move(digits);
  n->cat = kIntCategory;
  return Tree(std::move(n));
}

Tree Tree::integer(long long value) { return integer(std::to_string(value)); }

Tree Tree::variable(std::string name, Category cat) {
  auto n = std::make_shared<Node>();
  n->leaf = true;
  n->label = std::move(name);
  n->cat = std::move(cat);
  return Tree(std::move(n));
}

Tree Tree::node(std::string ctor, std::vector<Tree> children) {
  auto n = std::make_shared<Node>();
  n->label = std::move(ctor);
  n->children = std::move(children);
  return Tree(std::move(n));
}

const std::string& Tree::ctor() const { return node_->leaf ? kEmpty : node_->label; }

int Tree::depth() const {
  int d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.depth());
  return d + 1;
}

std::string Tree::to_string() const {
  if (node_->leaf || node_->children.empty()) return node_->label;
  std::string out = node_->label;
  for (const auto& c : node_->children) {
    out += ' ';
    if (!c.is_leaf() && c.arity() > 0) {
      out += '(' + c.to_string() + ')';
    } else {
      out += c.to_string();
    }
  }
  return out;
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->leaf == b.node_->leaf && a.node_->label == b.node_->label &&
         a.node_->cat == b.node_->cat && a.node_->children == b.node_->children;
}

std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->leaf <=> b.node_->leaf; c != 0) return c;
  if (auto c = a.node_->label <=> b.node_->label; c != 0) return c;
  if (auto c = a.node_->cat <=> b.node_->cat; c != 0) return c;
  const auto& ca = a.node_->children;
  const auto& cb = b.node_->children;
  return std::lexicographical_compare_three_way(ca.begin(), ca.end(), cb.begin(), cb.end());
}

}  // namespace mgl
