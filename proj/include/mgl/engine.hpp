#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mgl/linearize.hpp"
#include "mgl/parser.hpp"

namespace mgl {

/// Languages shipped in the data directory, in display order.
inline const std::vector<std::string> kShippedLanguages = {"eng", "spa", "fre", "latex", "cas"};

/// Categories tried, in order, when a request leaves the category open.
inline const std::vector<Category> kAutoCategories = {"Prop", "Exercise", "Command", "Answer", "ValNum"};

struct Translation {
  Category category;
  Tree tree;
  std::size_t readings = 1;  // number of parses; the first one is rendered
  std::vector<std::pair<std::string, std::string>> renderings;  // language -> text
};

/// The abstract grammar plus every loaded concrete, compiled for both
/// styles. Read-only after construction.
class Engine {
 public:
  /// Loads `mgl-mini.gfa` and `<lang>.gfc` for each language from `dir`.
  explicit Engine(const std::filesystem::path& dir, const std::vector<std::string>& languages = kShippedLanguages);

  const AbstractGrammar& abstract() const { return *abstract_; }
  std::shared_ptr<const AbstractGrammar> abstract_ptr() const { return abstract_; }
  const std::vector<std::string>& languages() const { return order_; }
  bool has_language(const std::string& lang) const { return langs_.count(lang) > 0; }

  /// Throws UnknownLanguage.
  const ConcreteGrammar& concrete(const std::string& lang) const;
  const CompiledGrammar& compiled(const std::string& lang, Style style) const;

  std::vector<std::string> tokenize(const std::string& text, const std::string& lang) const;
  /// An empty `cat` tries kAutoCategories and keeps the first that parses;
  /// when none does, the NoParse that got furthest is thrown.
  std::vector<Tree> parse(const std::string& text, const std::string& lang, const Category& cat) const;
  std::pair<Category, std::vector<Tree>> parse_any(const std::string& text, const std::string& lang,
                                                   const Category& cat) const;
  /// Throws UnknownToken for a token outside the language's vocabulary.
  CompletionSet complete(const std::vector<std::string>& tokens, const std::string& lang, const Category& cat) const;
  std::string linearize(const Tree& t, const std::string& lang) const;
  std::string linearize(const Tree& t, const std::string& lang, Style style) const;

  /// Parses `text` in `from` and renders the first reading in every target;
  /// "all" (any case) expands to every loaded language. With
  /// `accept_first` false an ambiguous input throws Ambiguous.
  Translation translate(const std::string& text, const std::string& from, const std::vector<std::string>& to,
                        const Category& cat, bool accept_first = true) const;

  std::vector<std::string> expand_targets(const std::vector<std::string>& to) const;

 private:
  struct Language {
    ConcreteGrammar concrete;
    CompiledGrammar descriptive;
    CompiledGrammar operator_style;
  };
  const Language& lang(const std::string& id) const;

  std::shared_ptr<const AbstractGrammar> abstract_;
  std::vector<std::string> order_;
  std::map<std::string, std::unique_ptr<Language>> langs_;
};

}  // namespace mgl
