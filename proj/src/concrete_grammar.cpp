#include "mgl/concrete_grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "mgl/error.hpp"

namespace mgl {

Style parse_style(std::string_view tag) {
  if (tag == "descriptive") return Style::Descriptive;
  if (tag == "operator") return Style::Operator;
  throw Error(Errc::SyntaxError, "unknown style '" + std::string(tag) + "'", {{"style", std::string(tag)}});
}

const char* to_string(Style s) { return s == Style::Operator ? "operator" : "descriptive"; }

std::map<std::string, std::string> ConcreteGrammar::default_attrs() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, values] : attributes_) out[name] = values.front();
  return out;
}

const Template& ConcreteGrammar::template_for(std::string_view ctor, Style style) const {
  auto it = index_.find(ctor);
  if (it != index_.end()) {
    int k = it->second[static_cast<int>(style)];
    if (k < 0) k = it->second[static_cast<int>(Style::Descriptive)];
    if (k >= 0) return templates_[k];
  }
  throw Error(Errc::MissingTemplate, "no template for " + std::string(ctor), {{"ctor", std::string(ctor)}});
}

bool ConcreteGrammar::has_variant(std::string_view ctor, Style style) const {
  auto it = index_.find(ctor);
  return it != index_.end() && it->second[static_cast<int>(style)] >= 0;
}

std::optional<std::string> ConcreteGrammar::punctuation(const Category& cat) const {
  auto it = punct_.find(cat);
  if (it == punct_.end()) return std::nullopt;
  return it->second;
}

namespace concrete_detail {

enum class Tok { Ident, String, Slot, Bind, Punct, End };

struct Lexeme {
  Tok kind;
  std::string text;
  int line;
  int slot = -1;
  int slot_prec = 0;
};

class ConcreteLexer {
 public:
  explicit ConcreteLexer(std::string_view src) : src_(src) {}

  std::vector<Lexeme> run() {
    std::vector<Lexeme> out;
    while (true) {
      skip();
      if (i_ >= src_.size()) break;
      char c = src_[i_];
      if (c == '"') {
        out.push_back({Tok::String, string_lit(), line_});
      } else if (c == '$') {
        out.push_back(slot());
      } else if (src_.compare(i_, 2, "&+") == 0) {
        out.push_back({Tok::Bind, "&+", line_});
        i_ += 2;
      } else if (src_.compare(i_, 2, "->") == 0) {
        out.push_back({Tok::Punct, "->", line_});
        i_ += 2;
      } else if (std::string_view("{}()=;:,|.").find(c) != std::string_view::npos) {
        out.push_back({Tok::Punct, std::string(1, c), line_});
        ++i_;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i_;
        while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
        out.push_back({Tok::Ident, std::string(src_.substr(i_, j - i_)), line_});
        i_ = j;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({Tok::End, "", line_});
    return out;
  }

 private:
  void skip() {
    while (i_ < src_.size()) {
      if (src_[i_] == '\n') {
        ++line_;
        ++i_;
      } else if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
        ++i_;
      } else if (src_.compare(i_, 2, "--") == 0) {
        while (i_ < src_.size() && src_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  std::string string_lit() {
    ++i_;
    std::string out;
    while (i_ < src_.size() && src_[i_] != '"') {
      if (src_[i_] == '\n') fail("unterminated string");
      // only \" and \\ are escapes; LaTeX control sequences pass through
      if (src_[i_] == '\\' && i_ + 1 < src_.size() && (src_[i_ + 1] == '"' || src_[i_ + 1] == '\\')) ++i_;
      out += src_[i_++];
    }
    if (i_ >= src_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  Lexeme slot() {
    ++i_;
    std::size_t j = i_;
    while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
    if (j == i_) fail("expected argument index after '$'");
    Lexeme lx{Tok::Slot, std::string(src_.substr(i_ - 1, j - i_ + 1)), line_};
    lx.slot = std::stoi(std::string(src_.substr(i_, j - i_)));
    i_ = j;
    // `$k:n` requests precedence >= n; `$k.attr` is left for sel() parsing.
    if (i_ + 1 < src_.size() && src_[i_] == ':' && std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      std::size_t k = i_ + 1;
      while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
      lx.slot_prec = std::stoi(std::string(src_.substr(i_ + 1, k - i_ - 1)));
      i_ = k;
    }
    return lx;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::SyntaxError, "line " + std::to_string(line_) + ": " + what, {{"line", std::to_string(line_)}});
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
};

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace concrete_detail

using namespace concrete_detail;

class ConcreteParser {
 public:
  ConcreteParser(std::vector<Lexeme> lx, std::shared_ptr<const AbstractGrammar> g) : lx_(std::move(lx)) {
    out_.abstract_ = std::move(g);
  }

  ConcreteGrammar run() {
    expect_ident("concrete");
    out_.header_name_ = ident();
    out_.language_ = lowercase(out_.header_name_);
    expect_ident("of");
    std::string abs = ident();
    if (abs != out_.abstract_->name()) fail("concrete grammar targets '" + abs + "', loaded abstract is '" + out_.abstract_->name() + "'");
    expect("{");
    while (!at("}")) {
      std::string kw = ident();
      if (kw == "attr") attr_decl();
      else if (kw == "lin") lin_decl();
      else if (kw == "glue") glue_decl();
      else if (kw == "punct") punct_decl();
      else if (kw == "casing") casing_decl();
      else fail("unknown declaration '" + kw + "'");
    }
    expect("}");
    if (peek().kind != Tok::End) fail("trailing input");
    validate();
    return std::move(out_);
  }

 private:
  void attr_decl() {
    std::string name = ident();
    if (name == "style" || name == "prec") fail("'" + name + "' is reserved");
    expect("=");
    std::vector<std::string> values{ident()};
    while (accept("|")) values.push_back(ident());
    expect(";");
    if (!out_.attributes_.emplace(name, values).second)
      throw Error(Errc::DuplicateName, "duplicate attribute " + name, {{"name", name}});
  }

  void lin_decl() {
    Template t;
    t.ctor = ident();
    while (!at("=")) {
      std::string key = ident();
      expect("=");
      if (key == "style") {
        t.style = parse_style(ident());
      } else if (key == "prec") {
        t.prec = std::stoi(ident());
      } else {
        if (!out_.attributes_.count(key))
          throw Error(Errc::UnknownAttribute, "unknown attribute " + key, {{"name", key}, {"ctor", t.ctor}});
        AttrValue v;
        if (peek().kind == Tok::Slot) {
          v.inherit_from = next().slot;
        } else {
          v.value = ident();
        }
        t.attrs[key] = v;
      }
    }
    expect("=");
    while (!at(";")) t.items.push_back(item(t.ctor));
    expect(";");
    if (t.items.empty()) fail("empty template for " + t.ctor);
    auto& slots = out_.index_.try_emplace(t.ctor, std::array<int, 2>{-1, -1}).first->second;
    int& slot = slots[static_cast<int>(t.style)];
    if (slot >= 0) throw Error(Errc::DuplicateName, "duplicate template for " + t.ctor, {{"name", t.ctor}});
    slot = static_cast<int>(out_.templates_.size());
    out_.templates_.push_back(std::move(t));
  }

  Item item(const std::string& ctor) {
    const Lexeme& lx = peek();
    Item it;
    if (lx.kind == Tok::String) {
      it.kind = Item::Kind::Literal;
      it.token = next().text;
      if (it.token.empty()) fail("empty literal in template for " + ctor);
    } else if (lx.kind == Tok::Slot) {
      it.kind = Item::Kind::Slot;
      it.arg = lx.slot;
      it.min_prec = lx.slot_prec;
      next();
    } else if (lx.kind == Tok::Bind) {
      it.kind = Item::Kind::Bind;
      next();
    } else if (lx.kind == Tok::Ident && lx.text == "sel") {
      next();
      it.kind = Item::Kind::Select;
      expect("(");
      if (peek().kind != Tok::Slot) fail("sel expects $k.attr");
      it.arg = next().slot;
      expect(".");
      it.attr = ident();
      expect(")");
      expect("{");
      while (!at("}")) {
        std::string value = ident();
        expect(":");
        std::vector<std::string> toks;
        while (peek().kind == Tok::String) {
          std::string s = next().text;
          if (!s.empty()) toks.push_back(s);
        }
        it.table[value] = toks;
        if (!accept(",")) break;
      }
      expect("}");
    } else {
      fail("unexpected '" + lx.text + "' in template for " + ctor);
    }
    return it;
  }

  void glue_decl() {
    GlueRule r;
    r.left = string();
    r.right = string();
    expect("->");
    r.merged = string();
    expect(";");
    out_.glue_.push_back(r);
  }

  void punct_decl() {
    std::string cat = ident();
    std::string mark = string();
    expect(";");
    out_.punct_[cat] = mark;
  }

  void casing_decl() {
    while (!at(";")) {
      out_.casing_.insert(ident());
      accept(",");
    }
    expect(";");
  }

  void validate() {
    const AbstractGrammar& g = *out_.abstract_;
    for (const auto& t : out_.templates_) {
      const ConstructorDecl* decl = g.find(t.ctor);
      if (!decl) throw Error(Errc::UnknownConstructor, "template for unknown constructor " + t.ctor, {{"name", t.ctor}});
      int arity = static_cast<int>(decl->arity());
      auto bad_slot = [&](int k) {
        throw Error(Errc::BadSlotIndex, "slot $" + std::to_string(k) + " out of range for " + t.ctor,
                    {{"ctor", t.ctor}, {"index", std::to_string(k)}});
      };
      for (const auto& [name, v] : t.attrs) {
        if (v.inherit_from >= arity) bad_slot(v.inherit_from);
        if (v.inherit_from < 0) {
          const auto& vals = out_.attributes_.at(name);
          if (std::find(vals.begin(), vals.end(), v.value) == vals.end())
            throw Error(Errc::UnknownAttribute, "value " + v.value + " not declared for " + name,
                        {{"name", name}, {"value", v.value}});
        }
      }
      for (const auto& it : t.items) {
        if (it.kind == Item::Kind::Slot || it.kind == Item::Kind::Select) {
          if (it.arg < 0 || it.arg >= arity) bad_slot(it.arg);
        }
        if (it.kind == Item::Kind::Select) {
          auto attr = out_.attributes_.find(it.attr);
          if (attr == out_.attributes_.end())
            throw Error(Errc::UnknownAttribute, "unknown attribute " + it.attr, {{"name", it.attr}, {"ctor", t.ctor}});
          for (const auto& v : attr->second)
            if (!it.table.count(v))
              throw Error(Errc::IncompleteSelect, "sel over " + it.attr + " in " + t.ctor + " lacks value " + v,
                          {{"ctor", t.ctor}, {"value", v}});
          for (const auto& [v, toks] : it.table)
            if (std::find(attr->second.begin(), attr->second.end(), v) == attr->second.end())
              throw Error(Errc::UnknownAttribute, "value " + v + " not declared for " + it.attr,
                          {{"name", it.attr}, {"value", v}});
        }
        if (it.kind == Item::Kind::Literal) out_.vocabulary_.insert(it.token);
        if (it.kind == Item::Kind::Select)
          for (const auto& [v, toks] : it.table) out_.vocabulary_.insert(toks.begin(), toks.end());
      }
    }
    for (const auto& decl : g.constructors())
      if (!out_.has_variant(decl.name, Style::Descriptive))
        throw Error(Errc::MissingTemplate, "missing template for " + decl.name, {{"ctor", decl.name}});
    for (const auto& r : out_.glue_) {
      for (const auto& other : out_.glue_) {
        if (other.left == r.merged)
          throw Error(Errc::SyntaxError, "glue output '" + r.merged + "' is the left side of another rule",
                      {{"token", r.merged}});
        if (&other != &r && other.left == r.left && other.right == r.right)
          throw Error(Errc::DuplicateName, "duplicate glue rule " + r.left + " " + r.right, {{"name", r.left}});
      }
      out_.vocabulary_.insert(r.merged);
    }
    for (const auto& [cat, mark] : out_.punct_) {
      if (!g.has_category(cat)) throw Error(Errc::UnknownCategory, "unknown category " + cat, {{"name", cat}});
      out_.vocabulary_.insert(mark);
    }
    for (const auto& cat : out_.casing_)
      if (!g.has_category(cat)) throw Error(Errc::UnknownCategory, "unknown category " + cat, {{"name", cat}});
    out_.vocabulary_.insert("(");
    out_.vocabulary_.insert(")");
  }

  const Lexeme& peek() const { return lx_[pos_]; }
  const Lexeme& next() { return lx_[pos_ < lx_.size() - 1 ? pos_++ : pos_]; }
  bool at(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool accept(std::string_view p) {
    if (!at(p)) return false;
    next();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  void expect_ident(std::string_view w) {
    if (peek().kind != Tok::Ident || peek().text != w) fail("expected '" + std::string(w) + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }
  std::string string() {
    if (peek().kind != Tok::String) fail("expected string literal");
    return next().text;
  }
  [[noreturn]] void fail(const std::string& what) const {
    int line = peek().line;
    throw Error(Errc::SyntaxError, "line " + std::to_string(line) + ": " + what, {{"line", std::to_string(line)}});
  }

  std::vector<Lexeme> lx_;
  std::size_t pos_ = 0;
  ConcreteGrammar out_;
};


ConcreteGrammar parse_concrete_source(std::string_view text, std::shared_ptr<const AbstractGrammar> g) {
  return ConcreteParser(ConcreteLexer(text).run(), std::move(g)).run();
}

ConcreteGrammar load_concrete_file(const std::filesystem::path& path, std::shared_ptr<const AbstractGrammar> g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string(), {{"path", path.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_concrete_source(ss.str(), std::move(g));
}

}  // namespace mgl
