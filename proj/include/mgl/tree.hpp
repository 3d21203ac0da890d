#pragma once

#include <compare>
#include <memory>
#include <string>
#include <vector>

namespace mgl {

using Category = std::string;

/// Built-in literal category for integer leaves (like GF's predefined Int).
inline constexpr const char* kIntCategory = "Int";

/// True for categories whose leaves are variable identifiers (VarNum, VarSet...).
bool is_variable_category(const Category& cat);

/// Typed abstract-syntax term. Either a leaf (integer literal or variable
/// identifier, tagged with its category) or a constructor node. Nodes are
/// immutable and shared, so copying a Tree is cheap.
class Tree {
 public:
  static Tree integer(std::string digits);
  static Tree integer(long long value);
  static Tree variable(std::string name, Category cat);
  static Tree node(std::string ctor, std::vector<Tree> children = {});

  bool is_leaf() const { return node_->leaf; }
  bool is_integer_leaf() const { return node_->leaf && node_->cat == kIntCategory; }
  bool is_variable_leaf() const { return node_->leaf && node_->cat != kIntCategory; }

  /// Leaf token (digits or identifier); empty for nodes.
  const std::string& token() const { return node_->label; }
  /// Constructor name; empty for leaves.
  const std::string& ctor() const;
  /// Leaf category; empty for nodes.
  const Category& leaf_category() const { return node_->cat; }
  const std::vector<Tree>& children() const { return node_->children; }
  const Tree& child(std::size_t i) const { return node_->children.at(i); }
  std::size_t arity() const { return node_->children.size(); }

  /// Number of levels; leaves and nullary constructors have depth 1.
  int depth() const;

  /// GF-style rendering: `mkProp (lt_num (Var2Num x) (IntLit 2))`.
  std::string to_string() const;

  friend bool operator==(const Tree& a, const Tree& b);
  friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);

 private:
  struct Node {
    bool leaf = false;
    std::string label;  // ctor name or leaf token
    Category cat;       // leaf category
    std::vector<Tree> children;
  };
  explicit Tree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

}  // namespace mgl
