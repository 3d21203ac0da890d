#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mgl {

class Engine;

struct LexEntry {
  std::string lemma;
  bool common_noun = true;
  std::vector<std::string> hypernyms;
  bool location = false;
  std::optional<long long> legs;
};

/// Word list with hypernyms and the attributes word problems need.
/// Line format: `lemma | pos | hypernyms | location | legs`.
class Lexicon {
 public:
  /// Throws LexiconError on malformed lines, unknown hypernyms or cycles.
  static Lexicon parse(std::istream& in, const std::string& source = "<lexicon>");
  static Lexicon load(const std::filesystem::path& path);

  const LexEntry* find(const std::string& lemma) const;
  /// Lemma of a surface word: the word itself, or the word without a final "s".
  std::optional<std::string> lemma_of(const std::string& word) const;
  /// Like lemma_of but throws UnknownLemma.
  const LexEntry& require(const std::string& word) const;
  /// `hyper` is reachable from `lemma` through hypernym links.
  bool is_a(const std::string& lemma, const std::string& hyper) const;
  /// Nearest lemma every element of `lemmas` is_a; nullopt if none.
  std::optional<std::string> common_hypernym(const std::vector<std::string>& lemmas) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, LexEntry> entries_;
};

/// Set expression over entities and instances.
struct SetExpr {
  enum class Op { Entity, Instance, In, Inter, Union, Diff };

  Op op = Op::Entity;
  std::string name;  // Entity, Instance
  std::vector<SetExpr> args;

  static SetExpr entity(std::string n) { return {Op::Entity, std::move(n), {}}; }
  static SetExpr instance(std::string n) { return {Op::Instance, std::move(n), {}}; }
  static SetExpr in(SetExpr s) { return {Op::In, {}, {std::move(s)}}; }
  static SetExpr inter(SetExpr a, SetExpr b) { return {Op::Inter, {}, {std::move(a), std::move(b)}}; }
  static SetExpr set_union(std::vector<SetExpr> xs) { return {Op::Union, {}, std::move(xs)}; }
  static SetExpr diff(SetExpr a, SetExpr b) { return {Op::Diff, {}, {std::move(a), std::move(b)}}; }

  /// "A ∩ IN(f) \ (D ∪ R)".
  std::string to_string() const;

  friend bool operator==(const SetExpr&, const SetExpr&) = default;
};

struct Constraint {
  enum class Kind { Cardinality, Lower, Closure, Subset };

  Kind kind = Kind::Cardinality;
  SetExpr set;             // Cardinality, Lower, Closure; Subset: the subset
  SetExpr super;           // Subset
  long long value = 0;     // Cardinality, Lower

  /// "|A ∩ IN(f)| = 100", "|D ∩ IN(f)| ≥ 1", "A ∩ IN(f) \ (D ∪ R) = ∅", "D ⊂ A".
  std::string to_string() const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Unknown {
  std::string name;   // d
  std::string lemma;  // duck
  SetExpr set;        // D ∩ IN(f)
};

struct ConstraintSet {
  std::vector<std::pair<std::string, std::string>> entities;   // symbol, lemma
  std::vector<std::pair<std::string, std::string>> instances;  // symbol, entity symbol
  std::vector<Constraint> constraints;
  std::vector<Unknown> unknowns;

  const std::string* lemma_of(const std::string& entity) const;
};

struct LinearEquation {
  std::vector<long long> coeffs;
  long long rhs = 0;
};

struct LinearSystem {
  std::vector<std::string> variables;
  std::vector<LinearEquation> equations;
  std::vector<long long> lower, upper;

  /// "2*d + 4*r = 260".
  std::string equation_text(std::size_t i) const;
};

using Solution = std::vector<std::pair<std::string, long long>>;

/// Rewrites a problem into explicit statements, one per fact or question.
/// Throws UnmatchedSentence, UnknownLemma.
std::vector<std::string> normalize(const std::string& text, const Lexicon& lex);

/// Throws UnmatchedSentence, UnknownLemma, NoQuestion.
ConstraintSet formalize(const std::vector<std::string>& statements, const Lexicon& lex);

/// Population and attribute equations over the unknowns. Lower bounds are
/// the starred ">= 1" facts unless `no_min`. Throws NoClosure,
/// MissingAttribute, UnboundedSystem.
LinearSystem to_linear_system(const ConstraintSet& cs, const Lexicon& lex, bool no_min = false);

/// Every integer point of the system inside its bounds, in lexicographic
/// order. Throws UnboundedSystem when the search box is too large.
std::vector<Solution> solve(const LinearSystem& ls);

/// One line per solution of equality propositions in `lang`. Throws
/// NoSolutionToRender.
std::string render_answer(const std::vector<Solution>& solutions, const std::string& lang, const Engine& engine);

struct WordProblemResult {
  std::vector<std::string> statements;
  ConstraintSet constraints;
  LinearSystem system;
  std::vector<Solution> solutions;
};

WordProblemResult solve_word_problem(const std::string& text, const Lexicon& lex, bool no_min = false);

}  // namespace mgl
