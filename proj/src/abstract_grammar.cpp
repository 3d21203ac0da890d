#include "mgl/abstract_grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "mgl/error.hpp"

namespace mgl {

bool is_pool_variable(std::string_view token) {
  return std::find(kVariablePool.begin(), kVariablePool.end(), token) != kVariablePool.end();
}

AbstractGrammar::AbstractGrammar(std::string name, std::vector<Category> categories,
                                 std::vector<ConstructorDecl> constructors)
    : name_(std::move(name)), categories_(std::move(categories)), constructors_(std::move(constructors)) {
  for (std::size_t i = 0; i < constructors_.size(); ++i) index_.emplace(constructors_[i].name, i);
}

bool AbstractGrammar::has_category(const Category& cat) const {
  return cat == kIntCategory || std::find(categories_.begin(), categories_.end(), cat) != categories_.end();
}

const ConstructorDecl* AbstractGrammar::find(std::string_view ctor) const {
  auto it = index_.find(ctor);
  return it == index_.end() ? nullptr : &constructors_[it->second];
}

std::vector<const ConstructorDecl*> AbstractGrammar::producers(const Category& cat) const {
  std::vector<const ConstructorDecl*> out;
  for (const auto& c : constructors_)
    if (c.result_cat == cat) out.push_back(&c);
  return out;
}

// ---------------------------------------------------------------------------
// Source parsing

namespace {

struct Lexeme {
  std::string text;
  int line;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Lexeme> lex_abstract(std::string_view src) {
  std::vector<Lexeme> out;
  int line = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (src.compare(i, 2, "--") == 0) {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (src.compare(i, 2, "->") == 0) {
      out.push_back({"->", line});
      i += 2;
    } else if (std::string_view("{}=:;,").find(c) != std::string_view::npos) {
      out.push_back({std::string(1, c), line});
      ++i;
    } else if (ident_char(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({std::string(src.substr(i, j - i)), line});
      i = j;
    } else {
      throw Error(Errc::SyntaxError, "line " + std::to_string(line) + ": unexpected character '" + c + "'",
                  {{"line", std::to_string(line)}});
    }
  }
  return out;
}

class AbstractParser {
 public:
  explicit AbstractParser(std::vector<Lexeme> lx) : lx_(std::move(lx)) {}

  AbstractGrammar run() {
    expect("abstract");
    std::string name = ident();
    expect("=");
    expect("{");
    std::vector<Category> cats;
    std::vector<ConstructorDecl> funs;
    while (!at("}")) {
      if (accept("cat")) {
        while (!at_section_end()) {
          for (auto& n : ident_list()) cats.push_back(std::move(n));
          expect(";");
        }
      } else if (accept("fun")) {
        while (!at_section_end()) {
          auto names = ident_list();
          expect(":");
          std::vector<Category> sig{ident()};
          while (accept("->")) sig.push_back(ident());
          expect(";");
          Category result = sig.back();
          sig.pop_back();
          for (auto& n : names) funs.push_back({std::move(n), sig, result});
        }
      } else {
        fail("expected 'cat', 'fun' or '}'");
      }
    }
    expect("}");
    if (pos_ != lx_.size()) fail("trailing input after grammar body");
    return check(std::move(name), std::move(cats), std::move(funs));
  }

 private:
  static AbstractGrammar check(std::string name, std::vector<Category> cats, std::vector<ConstructorDecl> funs) {
    std::set<std::string> seen;
    for (const auto& c : cats) {
      if (c == kIntCategory || !seen.insert(c).second)
        throw Error(Errc::DuplicateName, "duplicate category " + c, {{"name", c}});
    }
    std::set<std::string> fun_seen;
    for (const auto& f : funs) {
      if (!fun_seen.insert(f.name).second)
        throw Error(Errc::DuplicateName, "duplicate constructor " + f.name, {{"name", f.name}});
      auto known = [&](const Category& c) { return c == kIntCategory || seen.count(c) > 0; };
      for (const auto& a : f.arg_cats)
        if (!known(a)) throw Error(Errc::UnknownCategory, "unknown category " + a, {{"name", a}});
      if (!known(f.result_cat) || f.result_cat == kIntCategory)
        throw Error(Errc::UnknownCategory, "unknown category " + f.result_cat, {{"name", f.result_cat}});
    }
    return AbstractGrammar(std::move(name), std::move(cats), std::move(funs));
  }

  bool at(std::string_view s) const { return pos_ < lx_.size() && lx_[pos_].text == s; }
  bool at_section_end() const { return pos_ >= lx_.size() || at("cat") || at("fun") || at("}"); }
  bool accept(std::string_view s) {
    if (!at(s)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }
  std::string ident() {
    if (pos_ >= lx_.size() || !ident_char(lx_[pos_].text[0])) fail("expected identifier");
    return lx_[pos_++].text;
  }
  std::vector<std::string> ident_list() {
    std::vector<std::string> out{ident()};
    while (accept(",")) out.push_back(ident());
    return out;
  }
  [[noreturn]] void fail(const std::string& what) const {
    int line = pos_ < lx_.size() ? lx_[pos_].line : (lx_.empty() ? 1 : lx_.back().line);
    throw Error(Errc::SyntaxError, "line " + std::to_string(line) + ": " + what, {{"line", std::to_string(line)}});
  }

  std::vector<Lexeme> lx_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string(), {{"path", path.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

AbstractGrammar parse_abstract_source(std::string_view text) { return AbstractParser(lex_abstract(text)).run(); }

AbstractGrammar load_abstract_file(const std::filesystem::path& path) {
  return parse_abstract_source(read_file(path));
}

// ---------------------------------------------------------------------------
// Type checking

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool valid_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string path_string(const std::vector<std::size_t>& path) {
  std::string out;
  for (std::size_t i : path) out += (out.empty() ? "" : ".") + std::to_string(i);
  return out;
}

// `path` holds the child indices from the root to `t`.
const Category& check_at(const Tree& t, const AbstractGrammar& g, std::vector<std::size_t>& path) {
  if (t.is_leaf()) {
    const Category& cat = t.leaf_category();
    if (cat == kIntCategory) {
      if (!valid_digits(t.token()))
        throw Error(Errc::InvalidLeaf, "bad integer literal " + t.token(), {{"path", path_string(path)}});
      return cat;
    }
    if (!is_variable_category(cat) || !g.has_category(cat) || !valid_identifier(t.token()))
      throw Error(Errc::InvalidLeaf, "bad variable leaf " + t.token() + ":" + cat, {{"path", path_string(path)}});
    return cat;
  }
  const ConstructorDecl* decl = g.find(t.ctor());
  if (!decl) throw Error(Errc::UnknownConstructor, "unknown constructor " + t.ctor(), {{"name", t.ctor()}});
  if (decl->arity() != t.arity())
    throw Error(Errc::ArityError,
                t.ctor() + " expects " + std::to_string(decl->arity()) + " arguments, got " + std::to_string(t.arity()),
                {{"name", t.ctor()},
                 {"expected", std::to_string(decl->arity())},
                 {"found", std::to_string(t.arity())}});
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(i);
    const Category& found = check_at(t.child(i), g, path);
    if (found != decl->arg_cats[i]) {
      std::string sub = path_string(path);
      throw Error(Errc::TypeMismatch, "at " + sub + ": expected " + decl->arg_cats[i] + ", found " + found,
                  {{"path", sub}, {"expected", decl->arg_cats[i]}, {"found", found}});
    }
    path.pop_back();
  }
  return decl->result_cat;
}

}  // namespace

Category typecheck(const Tree& t, const AbstractGrammar& g) {
  std::vector<std::size_t> path;
  return check_at(t, g, path);
}

Tree promote(const Tree& t) {
  if (!t.is_variable_leaf()) throw Error(Errc::NotAVariable, "not a variable leaf: " + t.to_string());
  const Category& cat = t.leaf_category();
  // VarNum -> Var2Num, VarSet -> Var2Set ...
  return Tree::node("Var2" + cat.substr(3), {t});
}

// ---------------------------------------------------------------------------
// Enumeration

LeafPool LeafPool::numeric(const std::vector<std::string>& vars, const std::vector<long long>& ints) {
  LeafPool p;
  for (const auto& v : vars) p.leaves.push_back(Tree::variable(v, "VarNum"));
  for (long long i : ints) p.leaves.push_back(Tree::integer(i));
  return p;
}

namespace {

class Enumerator {
 public:
  Enumerator(const AbstractGrammar& g, const LeafPool& pool) : g_(g), pool_(pool) {}

  const std::vector<Tree>& trees(const Category& cat, int depth) {
    auto key = std::make_pair(cat, depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Tree> out;
    if (depth >= 1) {
      for (const auto& leaf : pool_.leaves)
        if (leaf.leaf_category() == cat) out.push_back(leaf);
      for (const ConstructorDecl* c : g_.producers(cat)) {
        if (c->arity() == 0) {
          out.push_back(Tree::node(c->name));
        } else if (depth >= 2) {
          std::vector<const std::vector<Tree>*> args;
          bool empty = false;
          for (const auto& a : c->arg_cats) {
            args.push_back(&trees(a, depth - 1));
            empty = empty || args.back()->empty();
          }
          if (!empty) product(*c, args, out);
        }
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  static void product(const ConstructorDecl& c, const std::vector<const std::vector<Tree>*>& args,
                      std::vector<Tree>& out) {
    std::vector<std::size_t> idx(args.size(), 0);
    while (true) {
      std::vector<Tree> kids;
      kids.reserve(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) kids.push_back((*args[i])[idx[i]]);
      out.push_back(Tree::node(c.name, std::move(kids)));
      // odometer, last argument fastest
      std::size_t k = args.size();
      while (k > 0) {
        --k;
        if (++idx[k] < args[k]->size()) break;
        idx[k] = 0;
        if (k == 0) return;
      }
    }
  }

  const AbstractGrammar& g_;
  const LeafPool& pool_;
  std::map<std::pair<Category, int>, std::vector<Tree>> memo_;
};

}  // namespace

std::vector<Tree> enumerate_trees(const AbstractGrammar& g, const Category& cat, int max_depth,
                                  const LeafPool& pool) {
  Enumerator e(g, pool);
  return e.trees(cat, max_depth);
}

// ---------------------------------------------------------------------------
// Tree notation

namespace {

class TreeReader {
 public:
  TreeReader(std::string_view src, const AbstractGrammar& g) : src_(src), g_(g) {}

  Tree read_top() {
    Tree t = read_expr(nullptr);
    skip_ws();
    if (pos_ != src_.size()) fail("trailing input");
    return t;
  }

 private:
  // expected == nullptr means "any constructor application".
  Tree read_expr(const Category* expected) {
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      Tree t = read_expr(expected);
      skip_ws();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return t;
    }
    std::string head = word();
    const ConstructorDecl* decl = g_.find(head);
    if (!decl) return leaf(head, expected);
    std::vector<Tree> kids;
    for (const auto& a : decl->arg_cats) kids.push_back(read_arg(a));
    return Tree::node(head, std::move(kids));
  }

  Tree read_arg(const Category& cat) {
    skip_ws();
    if (peek() == '(') return read_expr(&cat);
    std::string w = word();
    if (const ConstructorDecl* d = g_.find(w); d && d->arity() == 0) return Tree::node(w);
    return leaf(w, &cat);
  }

  Tree leaf(const std::string& w, const Category* expected) {
    if (!w.empty() && std::isdigit(static_cast<unsigned char>(w[0]))) return Tree::integer(w);
    if (expected && is_variable_category(*expected)) return Tree::variable(w, *expected);
    throw Error(Errc::UnknownConstructor, "unknown constructor " + w, {{"name", w}});
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(src_.substr(start, pos_ - start));
  }
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::SyntaxError, "tree notation, offset " + std::to_string(pos_) + ": " + what,
                {{"offset", std::to_string(pos_)}});
  }

  std::string_view src_;
  const AbstractGrammar& g_;
  std::size_t pos_ = 0;
};

}  // namespace

Tree parse_tree(std::string_view text, const AbstractGrammar& g) { return TreeReader(text, g).read_top(); }

}  // namespace mgl
