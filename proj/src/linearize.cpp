#include "mgl/linearize.hpp"

#include <cctype>

#include "mgl/error.hpp"

namespace mgl {

Style default_style(const Category& cat) { return cat == "Answer" ? Style::Operator : Style::Descriptive; }

namespace {

int prec_of(const Tree& t, const ConcreteGrammar& c, Style style) {
  return t.is_leaf() ? kAtomicPrec : c.template_for(t.ctor(), style).prec;
}

const std::string& attr_of(const Tree& t, const std::string& name, const ConcreteGrammar& c, Style style) {
  if (!t.is_leaf()) {
    const Template& tmpl = c.template_for(t.ctor(), style);
    auto it = tmpl.attrs.find(name);
    if (it != tmpl.attrs.end())
      return it->second.inherit_from >= 0 ? attr_of(t.child(it->second.inherit_from), name, c, style)
                                           : it->second.value;
  }
  return c.attributes().at(name).front();
}

void emit(const Tree& t, const ConcreteGrammar& c, Style style, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    out.push_back(t.token());
    return;
  }
  for (const auto& item : c.template_for(t.ctor(), style).items) {
    switch (item.kind) {
      case Item::Kind::Literal:
        out.push_back(item.token);
        break;
      case Item::Kind::Bind:
        out.emplace_back(kBind);
        break;
      case Item::Kind::Slot: {
        const Tree& k = t.child(item.arg);
        bool wrap = prec_of(k, c, style) < item.min_prec;
        if (wrap) {
          out.emplace_back("(");
          out.emplace_back(kBind);
        }
        emit(k, c, style, out);
        if (wrap) {
          out.emplace_back(kBind);
          out.emplace_back(")");
        }
        break;
      }
      case Item::Kind::Select: {
        const auto& toks = item.table.at(attr_of(t.child(item.arg), item.attr, c, style));
        out.insert(out.end(), toks.begin(), toks.end());
        break;
      }
    }
  }
}

}  // namespace

Phrase linearize_phrase(const Tree& t, const ConcreteGrammar& c, Style style) {
  Phrase out;
  emit(t, c, style, out.tokens);
  for (const auto& [name, values] : c.attributes()) out.attrs[name] = attr_of(t, name, c, style);
  out.prec = prec_of(t, c, style);
  return out;
}

namespace {

Category checked_category(const Tree& t, const ConcreteGrammar& c) {
  try {
    return typecheck(t, c.abstract());
  } catch (const Error& e) {
    throw Error(Errc::IllTypedTree, "cannot linearize ill-typed tree: " + std::string(e.what()),
                {{"cause", to_string(e.code())}});
  }
}

// Variables keep their case at the start of a sentence.
bool names_variable(const Tree& t, const std::string& tok) {
  if (t.is_variable_leaf()) return t.token() == tok;
  if (t.is_leaf()) return false;
  for (const auto& c : t.children())
    if (names_variable(c, tok)) return true;
  return false;
}

}  // namespace

std::vector<std::string> linearize_tokens(const Tree& t, const ConcreteGrammar& c, Style style) {
  Category cat = checked_category(t, c);
  std::vector<std::string> out;
  for (auto& tok : linearize_phrase(t, c, style).tokens)
    if (tok != kBind) out.push_back(std::move(tok));
  if (auto p = c.punctuation(cat)) out.push_back(*p);
  return out;
}

std::string linearize(const Tree& t, const ConcreteGrammar& c, Style style) {
  Category cat = checked_category(t, c);
  std::vector<std::string> toks = apply_glue(linearize_phrase(t, c, style).tokens, c.glue_rules());
  if (c.casing().count(cat) && !toks.empty() && !names_variable(t, toks.front()))
    toks.front() = capitalize_first(toks.front());
  if (auto p = c.punctuation(cat)) toks.push_back(*p);
  return assemble(toks);
}

std::string linearize_plain(const Tree& t, const ConcreteGrammar& c, Style style) {
  checked_category(t, c);
  return glue_tokens(linearize_phrase(t, c, style).tokens, c.glue_rules());
}

std::vector<std::string> apply_glue(std::span<const std::string> tokens, std::span<const GlueRule> rules) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i + 1 < tokens.size()) {
      const GlueRule* hit = nullptr;
      for (const auto& r : rules)
        if (r.left == tokens[i] && r.right == tokens[i + 1]) {
          hit = &r;
          break;
        }
      if (hit) {
        out.push_back(hit->merged);
        ++i;
        continue;
      }
    }
    out.push_back(tokens[i]);
  }
  return out;
}

std::string assemble(std::span<const std::string> tokens) {
  std::string out;
  bool bind = true;  // no space before the first token
  for (const auto& tok : tokens) {
    if (tok == kBind) {
      bind = true;
      continue;
    }
    bool attach = tok == "," || tok == "." || tok == "?" || tok == "!" || tok == ";";
    if (!bind && !attach && !out.empty()) out += ' ';
    out += tok;
    bind = false;
  }
  return out;
}

std::string glue_tokens(std::span<const std::string> tokens, std::span<const GlueRule> rules) {
  return assemble(apply_glue(tokens, rules));
}

std::string capitalize_first(std::string s) {
  if (s.empty()) return s;
  auto b0 = static_cast<unsigned char>(s[0]);
  if (b0 < 0x80) {
    s[0] = static_cast<char>(std::toupper(b0));
  } else if (b0 == 0xC3 && s.size() > 1) {
    auto b1 = static_cast<unsigned char>(s[1]);
    if (b1 >= 0xA0 && b1 <= 0xBE && b1 != 0xB7) s[1] = static_cast<char>(b1 - 0x20);
  }
  return s;
}

}  // namespace mgl
