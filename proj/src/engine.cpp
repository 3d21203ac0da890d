#include "mgl/engine.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "mgl/error.hpp"

namespace mgl {

Engine::Engine(const std::filesystem::path& dir, const std::vector<std::string>& languages) {
  abstract_ = std::make_shared<const AbstractGrammar>(load_abstract_file(dir / "mgl-mini.gfa"));
  for (const auto& id : languages) {
    if (langs_.count(id)) continue;
    auto c = load_concrete_file(dir / (id + ".gfc"), abstract_);
    auto d = compile_cfg(c, Style::Descriptive);
    auto o = compile_cfg(c, Style::Operator);
    langs_[id] = std::make_unique<Language>(Language{std::move(c), std::move(d), std::move(o)});
    order_.push_back(id);
  }
}

const Engine::Language& Engine::lang(const std::string& id) const {
  auto it = langs_.find(id);
  if (it == langs_.end()) throw Error(Errc::UnknownLanguage, "unknown language " + id, {{"language", id}});
  return *it->second;
}

const ConcreteGrammar& Engine::concrete(const std::string& id) const { return lang(id).concrete; }

const CompiledGrammar& Engine::compiled(const std::string& id, Style style) const {
  const Language& l = lang(id);
  return style == Style::Operator ? l.operator_style : l.descriptive;
}

std::vector<std::string> Engine::tokenize(const std::string& text, const std::string& id) const {
  return mgl::tokenize(text, concrete(id));
}

std::vector<Tree> Engine::parse(const std::string& text, const std::string& id, const Category& cat) const {
  return parse_any(text, id, cat).second;
}

std::pair<Category, std::vector<Tree>> Engine::parse_any(const std::string& text, const std::string& id,
                                                         const Category& cat) const {
  auto tokens = tokenize(text, id);
  if (!cat.empty()) return {cat, mgl::parse(tokens, cat, compiled(id, default_style(cat)))};
  std::optional<Error> best;
  for (const auto& c : kAutoCategories) {
    try {
      return {c, mgl::parse(tokens, c, compiled(id, default_style(c)))};
    } catch (const Error& e) {
      if (e.code() != Errc::NoParse) throw;
      if (!best || std::stoul(e.get("position")) > std::stoul(best->get("position"))) best = e;
    }
  }
  throw *best;
}

CompletionSet Engine::complete(const std::vector<std::string>& tokens, const std::string& id,
                               const Category& cat) const {
  const auto& vocab = concrete(id).vocabulary();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    bool digits = !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char ch) { return std::isdigit(ch); });
    if (!vocab.count(t) && !digits && !is_pool_variable(t))
      throw Error(Errc::UnknownToken, "unknown token '" + t + "' at position " + std::to_string(i),
                  {{"token", t}, {"position", std::to_string(i)}});
  }
  return mgl::complete(tokens, cat, compiled(id, default_style(cat)));
}

std::string Engine::linearize(const Tree& t, const std::string& id) const {
  return linearize(t, id, default_style(typecheck(t, *abstract_)));
}

std::string Engine::linearize(const Tree& t, const std::string& id, Style style) const {
  return mgl::linearize(t, concrete(id), style);
}

std::vector<std::string> Engine::expand_targets(const std::vector<std::string>& to) const {
  std::vector<std::string> out;
  for (const auto& t : to) {
    std::string low = t;
    std::transform(low.begin(), low.end(), low.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (low == "all") {
      for (const auto& id : order_)
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    } else if (std::find(out.begin(), out.end(), low) == out.end()) {
      lang(low);
      out.push_back(low);
    }
  }
  return out;
}

Translation Engine::translate(const std::string& text, const std::string& from, const std::vector<std::string>& to,
                              const Category& cat, bool accept_first) const {
  auto targets = expand_targets(to);
  auto [category, trees] = parse_any(text, from, cat);
  if (trees.size() > 1 && !accept_first)
    throw Error(Errc::Ambiguous, std::to_string(trees.size()) + " readings",
                {{"count", std::to_string(trees.size())}, {"first", trees.front().to_string()}});
  Translation out{category, trees.front(), trees.size(), {}};
  Style style = default_style(category);
  for (const auto& id : targets) out.renderings.emplace_back(id, linearize(out.tree, id, style));
  return out;
}

}  // namespace mgl
