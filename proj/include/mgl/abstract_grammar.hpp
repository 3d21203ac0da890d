#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mgl/tree.hpp"

namespace mgl {

/// Variable identifiers admitted by the tokenizer and the tree enumerator.
inline const std::vector<std::string> kVariablePool = {"x", "y", "z", "n", "k", "t"};
bool is_pool_variable(std::string_view token);

struct ConstructorDecl {
  std::string name;
  std::vector<Category> arg_cats;
  Category result_cat;

  std::size_t arity() const { return arg_cats.size(); }
};

/// A closed set of categories and constructor signatures. Declaration order
/// is kept because tree enumeration follows it.
class AbstractGrammar {
 public:
  AbstractGrammar() = default;
  AbstractGrammar(std::string name, std::vector<Category> categories,
                  std::vector<ConstructorDecl> constructors);

  const std::string& name() const { return name_; }
  const std::vector<Category>& categories() const { return categories_; }
  const std::vector<ConstructorDecl>& constructors() const { return constructors_; }

  /// Declared categories plus the built-in Int.
  bool has_category(const Category& cat) const;
  const ConstructorDecl* find(std::string_view ctor) const;
  /// Constructors producing `cat`, in declaration order.
  std::vector<const ConstructorDecl*> producers(const Category& cat) const;

 private:
  std::string name_;
  std::vector<Category> categories_;
  std::vector<ConstructorDecl> constructors_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Parses `abstract <Name> = { cat ... ; fun ... ; }`. `--` starts a comment.
AbstractGrammar parse_abstract_source(std::string_view text);
AbstractGrammar load_abstract_file(const std::filesystem::path& path);

/// Returns the category of a well-typed tree or throws TypeMismatch,
/// UnknownConstructor, ArityError or InvalidLeaf.
Category typecheck(const Tree& t, const AbstractGrammar& g);

/// Wraps a Var* leaf in its promotion constructor (VarNum -> Var2Num ...).
Tree promote(const Tree& t);

/// Finite set of leaves available to enumerate_trees.
struct LeafPool {
  std::vector<Tree> leaves;

  /// Numeric pool: the given names as VarNum leaves, then the integers.
  static LeafPool numeric(const std::vector<std::string>& vars, const std::vector<long long>& ints);
};

/// Every well-typed tree of `cat` with depth <= max_depth, in a
/// deterministic order (leaves first, then constructors in declaration
/// order, arguments varying lexicographically).
std::vector<Tree> enumerate_trees(const AbstractGrammar& g, const Category& cat, int max_depth,
                                  const LeafPool& pool);

/// Reads the GF-style notation produced by Tree::to_string. Bare tokens in
/// argument position become leaves of the expected category.
Tree parse_tree(std::string_view text, const AbstractGrammar& g);

}  // namespace mgl
