#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgl/concrete_grammar.hpp"

namespace mgl {

/// Literal classes offered by completion next to ordinary tokens.
inline constexpr const char* kIntegerClass = "INTEGER";
inline constexpr const char* kVariableClass = "VARIDENT";

struct Symbol {
  enum class Kind { Terminal, Integer, Variable, Nonterminal };
  Kind kind;
  int id = -1;  // terminal or nonterminal id

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct Production {
  enum class Action { Build, Pass, IntLeaf, VarLeaf };

  int lhs = -1;
  std::vector<Symbol> rhs;
  Action action = Action::Pass;
  std::string ctor;        // Build
  std::vector<int> args;   // per rhs position: argument index, or -1
  Category leaf_category;  // VarLeaf
};

/// Context-free expansion of a concrete grammar for one style. Nonterminals
/// are (category, attribute values, precedence) variants plus one union
/// nonterminal per category and one start symbol per category.
class CompiledGrammar {
 public:
  const std::string& language() const { return language_; }
  Style style() const { return style_; }

  const std::vector<Production>& productions() const { return productions_; }
  const std::vector<int>& productions_of(int nt) const { return by_lhs_.at(nt); }
  std::size_t nonterminal_count() const { return nt_names_.size(); }
  const std::string& nonterminal_name(int nt) const { return nt_names_.at(nt); }
  const std::string& terminal(int id) const { return terminals_.at(id); }
  std::size_t terminal_count() const { return terminals_.size(); }

  /// Start symbol for sentences of `cat` (category phrase plus its
  /// terminal punctuation), or -1 for unknown categories.
  int start(const Category& cat) const;
  /// Nonterminal of bare `cat` phrases (no punctuation), or -1.
  int phrase(const Category& cat) const;
  std::optional<std::string> punctuation(const Category& cat) const;

  bool matches(const Symbol& s, std::string_view token) const;

  /// Chart-parser tables.
  int terminal_id(std::string_view token) const;
  /// Nonterminals reachable by repeatedly taking the first rhs symbol.
  const std::vector<int>& prediction_closure(int nt) const { return closure_.at(nt); }
  /// Productions whose first symbol is the given terminal / literal class / nonterminal.
  const std::vector<int>& starting_with_terminal(int id) const { return by_first_terminal_.at(id); }
  const std::vector<int>& starting_with_integer() const { return by_first_integer_; }
  const std::vector<int>& starting_with_variable() const { return by_first_variable_; }
  const std::vector<int>& starting_with_nonterminal(int nt) const { return by_first_nt_.at(nt); }

 private:
  friend class CfgBuilder;

  std::string language_;
  Style style_ = Style::Descriptive;
  std::vector<Production> productions_;
  std::vector<std::vector<int>> by_lhs_;
  std::vector<std::string> nt_names_;
  std::vector<std::string> terminals_;
  std::map<Category, int> start_;
  std::map<Category, int> union_;
  std::map<Category, std::string> punct_;
  std::map<std::string, int, std::less<>> terminal_index_;
  std::vector<std::vector<int>> closure_;
  std::vector<std::vector<int>> by_first_terminal_;
  std::vector<int> by_first_integer_;
  std::vector<int> by_first_variable_;
  std::vector<std::vector<int>> by_first_nt_;
};

CompiledGrammar compile_cfg(const ConcreteGrammar& c, Style style = Style::Descriptive);

/// Splits text into grammar tokens: lowercases a sentence-initial capital
/// when only the lowercase form is known, separates punctuation, undoes glue
/// contractions. Throws UnknownToken(token, position).
std::vector<std::string> tokenize(std::string_view text, const ConcreteGrammar& c);

/// All trees of `cat` whose token stream is `tokens`, sorted. A trailing
/// sentence mark is tolerated when the category has none, and supplied when
/// the category requires one. Throws NoParse(position, expected).
std::vector<Tree> parse(std::span<const std::string> tokens, const Category& cat, const CompiledGrammar& cg);

struct CompletionSet {
  std::set<std::string> next_tokens;  // tokens plus INTEGER / VARIDENT
  bool complete = false;              // the prefix is already a sentence
};

/// Tokens that extend `prefix` towards a sentence of `cat`.
CompletionSet complete(std::span<const std::string> prefix, const Category& cat, const CompiledGrammar& cg);

}  // namespace mgl
