#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mgl/abstract_grammar.hpp"

namespace mgl {

/// Marker token: the neighbours are joined without a space (GF's BIND).
inline constexpr const char* kBind = "&+";
/// Precedence of phrases that never need parentheses.
inline constexpr int kAtomicPrec = 1000;

enum class Style { Descriptive, Operator };

Style parse_style(std::string_view tag);
const char* to_string(Style s);

struct Item {
  enum class Kind { Literal, Slot, Select, Bind };

  Kind kind = Kind::Literal;
  std::string token;  // Literal
  int arg = -1;       // Slot, Select
  int min_prec = 0;   // Slot: child phrases below this precedence get parenthesized
  std::string attr;   // Select
  std::map<std::string, std::vector<std::string>> table;  // Select: attribute value -> tokens
};

/// Attribute assignment of a template result: a fixed value or the value
/// carried by one of the arguments.
struct AttrValue {
  std::string value;
  int inherit_from = -1;
};

struct Template {
  std::string ctor;
  Style style = Style::Descriptive;
  std::vector<Item> items;
  std::map<std::string, AttrValue> attrs;
  int prec = kAtomicPrec;
};

struct GlueRule {
  std::string left;
  std::string right;
  std::string merged;
};

/// Per-language linearization rules for an abstract grammar. Immutable once
/// loaded.
class ConcreteGrammar {
 public:
  const std::string& language() const { return language_; }
  const std::string& header_name() const { return header_name_; }
  const AbstractGrammar& abstract() const { return *abstract_; }
  std::shared_ptr<const AbstractGrammar> abstract_ptr() const { return abstract_; }

  /// Declared attributes and their value sets (first value is the default).
  const std::map<std::string, std::vector<std::string>>& attributes() const { return attributes_; }
  std::map<std::string, std::string> default_attrs() const;

  /// Template used for `ctor` under `style`; falls back to the descriptive one.
  const Template& template_for(std::string_view ctor, Style style) const;
  bool has_variant(std::string_view ctor, Style style) const;
  const std::vector<Template>& templates() const { return templates_; }

  const std::vector<GlueRule>& glue_rules() const { return glue_; }
  const std::set<Category>& casing() const { return casing_; }
  /// Terminal mark appended to sentences of `cat`, if any.
  std::optional<std::string> punctuation(const Category& cat) const;

  /// Every literal token the grammar can emit, including glued forms.
  const std::set<std::string>& vocabulary() const { return vocabulary_; }

 private:
  friend class ConcreteParser;

  std::string language_;
  std::string header_name_;
  std::shared_ptr<const AbstractGrammar> abstract_;
  std::map<std::string, std::vector<std::string>> attributes_;
  std::vector<Template> templates_;
  std::map<std::string, std::array<int, 2>, std::less<>> index_;  // ctor -> template per style
  std::vector<GlueRule> glue_;
  std::set<Category> casing_;
  std::map<Category, std::string> punct_;
  std::set<std::string> vocabulary_;
};

/// Parses `concrete <Lang> of <Abstract> { ... }` and checks completeness
/// against `g`. The language id is the lowercased <Lang>.
ConcreteGrammar parse_concrete_source(std::string_view text, std::shared_ptr<const AbstractGrammar> g);
ConcreteGrammar load_concrete_file(const std::filesystem::path& path, std::shared_ptr<const AbstractGrammar> g);

}  // namespace mgl
