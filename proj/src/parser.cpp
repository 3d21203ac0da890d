#include "mgl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "mgl/error.hpp"

namespace mgl {

int CompiledGrammar::start(const Category& cat) const {
  auto it = start_.find(cat);
  return it == start_.end() ? -1 : it->second;
}

int CompiledGrammar::phrase(const Category& cat) const {
  auto it = union_.find(cat);
  return it == union_.end() ? -1 : it->second;
}

std::optional<std::string> CompiledGrammar::punctuation(const Category& cat) const {
  auto it = punct_.find(cat);
  if (it == punct_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool is_integer_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// longest production right-hand side the chart supports
constexpr std::size_t kMaxRhs = 64;

bool is_sentence_mark(std::string_view s) { return s == "." || s == "?" || s == "!"; }

}  // namespace

int CompiledGrammar::terminal_id(std::string_view token) const {
  auto it = terminal_index_.find(token);
  return it == terminal_index_.end() ? -1 : it->second;
}

bool CompiledGrammar::matches(const Symbol& s, std::string_view token) const {
  switch (s.kind) {
    case Symbol::Kind::Terminal:
      return terminals_[s.id] == token;
    case Symbol::Kind::Integer:
      return is_integer_token(token);
    case Symbol::Kind::Variable:
      return is_pool_variable(token);
    case Symbol::Kind::Nonterminal:
      return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// compilation

class CfgBuilder {
 public:
  CfgBuilder(const ConcreteGrammar& c, Style style) : c_(c), style_(style) {
    for (const auto& [name, values] : c.attributes()) {
      attr_names_.push_back(name);
      default_.values.push_back(values.front());
    }
    default_.prec = kAtomicPrec;
    out_.language_ = c.language();
    out_.style_ = style;
  }

  CompiledGrammar build() {
    const AbstractGrammar& g = c_.abstract();
    variants_[kIntCategory].insert(default_);
    for (const auto& cat : g.categories())
      if (is_variable_category(cat)) variants_[cat].insert(default_);

    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& decl : g.constructors()) {
        const Template& t = c_.template_for(decl.name, style_);
        for_each_choice(decl, t, [&](const std::map<int, Variant>& chosen) {
          changed |= variants_[decl.result_cat].insert(result_variant(t, chosen)).second;
        });
      }
    }

    for (const auto& decl : g.constructors()) {
      const Template& t = c_.template_for(decl.name, style_);
      check_slots(decl, t);
      for_each_choice(decl, t, [&](const std::map<int, Variant>& chosen) { emit(decl, t, chosen); });
    }

    if (variants_.count(kIntCategory))
      add({nt(kIntCategory, default_), {{Symbol::Kind::Integer, -1}}, Production::Action::IntLeaf, "", {-1}, ""});
    for (const auto& cat : g.categories())
      if (is_variable_category(cat))
        add({nt(cat, default_), {{Symbol::Kind::Variable, -1}}, Production::Action::VarLeaf, "", {-1}, cat});

    for (const auto& [cat, vs] : variants_)
      for (const auto& v : vs)
        add({union_nt(cat), {{Symbol::Kind::Nonterminal, nt(cat, v)}}, Production::Action::Pass, "", {0}, ""});

    for (const auto& cat : g.categories()) {
      if (!variants_.count(cat)) continue;
      int s = intern_nt("START " + cat);
      out_.start_[cat] = s;
      Production p{s, {{Symbol::Kind::Nonterminal, union_nt(cat)}}, Production::Action::Pass, "", {0}, ""};
      if (auto mark = c_.punctuation(cat)) {
        out_.punct_[cat] = *mark;
        p.rhs.push_back(terminal(*mark));
        p.args.push_back(-1);
      }
      add(std::move(p));
    }
    out_.by_lhs_.resize(out_.nt_names_.size());
    index_tables();
    return std::move(out_);
  }

 private:
  struct Variant {
    std::vector<std::string> values;  // in attribute-name order
    int prec = kAtomicPrec;
    auto operator<=>(const Variant&) const = default;
  };

  static std::set<int> sensitive_args(const Template& t) {
    std::set<int> s;
    for (const auto& it : t.items) {
      if (it.kind == Item::Kind::Select) s.insert(it.arg);
      if (it.kind == Item::Kind::Slot && it.min_prec > 0) s.insert(it.arg);
    }
    for (const auto& [name, v] : t.attrs)
      if (v.inherit_from >= 0) s.insert(v.inherit_from);
    return s;
  }

  template <class F>
  void for_each_choice(const ConstructorDecl& decl, const Template& t, F&& f) {
    for (const auto& cat : decl.arg_cats)
      if (variants_[cat].empty()) return;
    std::set<int> sens_set = sensitive_args(t);
    std::vector<int> sens(sens_set.begin(), sens_set.end());
    std::vector<std::vector<Variant>> pools;
    for (int k : sens) {
      const auto& vs = variants_[decl.arg_cats[k]];
      pools.emplace_back(vs.begin(), vs.end());
    }
    std::vector<std::size_t> idx(sens.size(), 0);
    while (true) {
      std::map<int, Variant> chosen;
      for (std::size_t i = 0; i < sens.size(); ++i) chosen[sens[i]] = pools[i][idx[i]];
      f(chosen);
      std::size_t i = sens.size();
      while (i > 0) {
        --i;
        if (++idx[i] < pools[i].size()) break;
        idx[i] = 0;
        if (i == 0) return;
      }
      if (sens.empty()) return;
    }
  }

  Variant result_variant(const Template& t, const std::map<int, Variant>& chosen) const {
    Variant v = default_;
    for (std::size_t a = 0; a < attr_names_.size(); ++a) {
      auto it = t.attrs.find(attr_names_[a]);
      if (it == t.attrs.end()) continue;
      v.values[a] = it->second.inherit_from >= 0 ? chosen.at(it->second.inherit_from).values[a] : it->second.value;
    }
    v.prec = t.prec;
    return v;
  }

  std::size_t attr_index(const std::string& name) const {
    return static_cast<std::size_t>(std::find(attr_names_.begin(), attr_names_.end(), name) - attr_names_.begin());
  }

  void check_slots(const ConstructorDecl& decl, const Template& t) const {
    std::vector<int> uses(decl.arity(), 0);
    bool emits = false;
    for (const auto& it : t.items) {
      if (it.kind == Item::Kind::Slot) {
        ++uses.at(it.arg);
        emits = true;
      } else if (it.kind == Item::Kind::Literal) {
        emits = true;
      } else if (it.kind == Item::Kind::Select) {
        for (const auto& [v, toks] : it.table)
          if (!toks.empty()) emits = true;
      }
    }
    for (std::size_t k = 0; k < uses.size(); ++k)
      if (uses[k] != 1)
        throw Error(Errc::NonLinearizableTemplate,
                    "template for " + decl.name + " must use argument " + std::to_string(k) + " exactly once",
                    {{"ctor", decl.name}, {"language", c_.language()}, {"arg", std::to_string(k)}});
    if (!emits)
      throw Error(Errc::NonLinearizableTemplate, "template for " + decl.name + " produces no tokens",
                  {{"ctor", decl.name}, {"language", c_.language()}});
  }

  void emit(const ConstructorDecl& decl, const Template& t, const std::map<int, Variant>& chosen) {
    Production p;
    p.action = Production::Action::Build;
    p.ctor = decl.name;
    auto lit = [&](const std::string& tok) {
      p.rhs.push_back(terminal(tok));
      p.args.push_back(-1);
    };
    for (const auto& it : t.items) {
      switch (it.kind) {
        case Item::Kind::Literal:
          lit(it.token);
          break;
        case Item::Kind::Bind:
          break;
        case Item::Kind::Select:
          for (const auto& tok : it.table.at(chosen.at(it.arg).values[attr_index(it.attr)])) lit(tok);
          break;
        case Item::Kind::Slot: {
          const Category& cat = decl.arg_cats[it.arg];
          auto ch = chosen.find(it.arg);
          if (ch == chosen.end()) {
            p.rhs.push_back({Symbol::Kind::Nonterminal, union_nt(cat)});
            p.args.push_back(it.arg);
            break;
          }
          bool wrap = ch->second.prec < it.min_prec;
          if (wrap) lit("(");
          p.rhs.push_back({Symbol::Kind::Nonterminal, nt(cat, ch->second)});
          p.args.push_back(it.arg);
          if (wrap) lit(")");
          break;
        }
      }
    }
    if (p.rhs.empty())
      throw Error(Errc::NonLinearizableTemplate, "template for " + decl.name + " can produce no tokens",
                  {{"ctor", decl.name}, {"language", c_.language()}});
    if (p.rhs.size() > kMaxRhs)
      throw Error(Errc::NonLinearizableTemplate, "template for " + decl.name + " is too long",
                  {{"ctor", decl.name}, {"language", c_.language()}});
    p.lhs = nt(decl.result_cat, result_variant(t, chosen));
    add(std::move(p));
  }

  void index_tables() {
    CompiledGrammar& g = out_;
    const std::size_t nts = g.nt_names_.size();
    for (std::size_t t = 0; t < g.terminals_.size(); ++t) g.terminal_index_.emplace(g.terminals_[t], static_cast<int>(t));
    g.by_first_terminal_.assign(g.terminals_.size(), {});
    g.by_first_nt_.assign(nts, {});
    for (std::size_t pid = 0; pid < g.productions_.size(); ++pid) {
      const Symbol& s = g.productions_[pid].rhs.front();
      int id = static_cast<int>(pid);
      switch (s.kind) {
        case Symbol::Kind::Terminal: g.by_first_terminal_[s.id].push_back(id); break;
        case Symbol::Kind::Integer: g.by_first_integer_.push_back(id); break;
        case Symbol::Kind::Variable: g.by_first_variable_.push_back(id); break;
        case Symbol::Kind::Nonterminal: g.by_first_nt_[s.id].push_back(id); break;
      }
    }
    g.closure_.assign(nts, {});
    for (std::size_t a = 0; a < nts; ++a) {
      std::vector<char> seen(nts, 0);
      std::vector<int> stack = {static_cast<int>(a)};
      seen[a] = 1;
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        g.closure_[a].push_back(x);
        for (int pid : g.by_lhs_[x]) {
          const Symbol& s = g.productions_[pid].rhs.front();
          if (s.kind == Symbol::Kind::Nonterminal && !seen[s.id]) {
            seen[s.id] = 1;
            stack.push_back(s.id);
          }
        }
      }
    }
  }

  Symbol terminal(const std::string& tok) {
    auto [it, fresh] = terminals_.try_emplace(tok, static_cast<int>(out_.terminals_.size()));
    if (fresh) out_.terminals_.push_back(tok);
    return {Symbol::Kind::Terminal, it->second};
  }

  int intern_nt(const std::string& name) {
    auto [it, fresh] = nts_.try_emplace(name, static_cast<int>(out_.nt_names_.size()));
    if (fresh) out_.nt_names_.push_back(name);
    return it->second;
  }

  int nt(const Category& cat, const Variant& v) {
    std::string name = cat + "[";
    for (std::size_t i = 0; i < v.values.size(); ++i) name += (i ? "," : "") + v.values[i];
    name += ";" + std::to_string(v.prec) + "]";
    return intern_nt(name);
  }

  int union_nt(const Category& cat) {
    int id = intern_nt(cat);
    out_.union_[cat] = id;
    return id;
  }

  void add(Production p) {
    out_.by_lhs_.resize(std::max(out_.by_lhs_.size(), out_.nt_names_.size()));
    out_.by_lhs_[p.lhs].push_back(static_cast<int>(out_.productions_.size()));
    out_.productions_.push_back(std::move(p));
  }

  const ConcreteGrammar& c_;
  Style style_;
  std::vector<std::string> attr_names_;
  Variant default_;
  std::map<Category, std::set<Variant>> variants_;
  std::map<std::string, int> terminals_;
  std::map<std::string, int> nts_;
  CompiledGrammar out_;
};

CompiledGrammar compile_cfg(const ConcreteGrammar& c, Style style) { return CfgBuilder(c, style).build(); }

// ---------------------------------------------------------------------------
// tokenization

namespace {

bool is_letter_byte(unsigned char b) { return std::isalpha(b) || b >= 0x80 || b == '_' || b == '\''; }

bool is_symbol_byte(unsigned char b) { return !std::isalnum(b) && !std::isspace(b) && b < 0x80; }

std::string lowercase_first(std::string s) {
  if (s.empty()) return s;
  auto b0 = static_cast<unsigned char>(s[0]);
  if (b0 < 0x80) {
    s[0] = static_cast<char>(std::tolower(b0));
  } else if (b0 == 0xC3 && s.size() > 1) {
    auto b1 = static_cast<unsigned char>(s[1]);
    if (b1 >= 0x80 && b1 <= 0x9E && b1 != 0x97) s[1] = static_cast<char>(b1 + 0x20);
  }
  return s;
}

std::vector<std::string> lex_chunk(std::string_view w, const std::set<std::string>& vocab) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < w.size()) {
    auto b = static_cast<unsigned char>(w[i]);
    std::size_t j = i;
    if (std::isdigit(b)) {
      while (j < w.size() && std::isdigit(static_cast<unsigned char>(w[j]))) ++j;
    } else if (is_letter_byte(b) ||
               (b == '\\' && i + 1 < w.size() && std::isalpha(static_cast<unsigned char>(w[i + 1])))) {
      ++j;
      while (j < w.size() && is_letter_byte(static_cast<unsigned char>(w[j]))) ++j;
    } else if (b == '\\' && i + 1 < w.size()) {
      j = i + 2;
    } else {
      // longest known run of symbol characters
      std::size_t end = i;
      while (end < w.size() && is_symbol_byte(static_cast<unsigned char>(w[end])) && w[end] != '\\') ++end;
      j = i + 1;
      for (std::size_t k = end; k > i + 1; --k)
        if (vocab.count(std::string(w.substr(i, k - i)))) {
          j = k;
          break;
        }
    }
    out.emplace_back(w.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const ConcreteGrammar& c) {
  const auto& vocab = c.vocabulary();
  auto known = [&](const std::string& t) { return vocab.count(t) || is_integer_token(t) || is_pool_variable(t); };

  std::vector<std::string> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i)
      for (auto& p : lex_chunk(text.substr(i, j - i), vocab)) pieces.push_back(std::move(p));
    i = j;
  }
  if (!pieces.empty() && !known(pieces.front())) {
    std::string lower = lowercase_first(pieces.front());
    if (known(lower)) pieces.front() = lower;
  }

  std::vector<std::string> out;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const std::string& p = pieces[k];
    const GlueRule* rule = nullptr;
    for (const auto& r : c.glue_rules())
      if (r.merged == p) rule = &r;
    if (rule) {
      out.push_back(rule->left);
      out.push_back(rule->right);
      continue;
    }
    if (!known(p))
      throw Error(Errc::UnknownToken, "unknown token '" + p + "' at position " + std::to_string(k),
                  {{"token", p}, {"position", std::to_string(k)}});
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Earley chart

namespace {

struct EItem {
  int prod;
  int dot;
  int origin;
};

// Open-addressing set of 64-bit keys, cleared in O(used).
class KeySet {
 public:
  bool insert(std::uint64_t key) {
    if ((used_.size() + 1) * 2 > slots_.size()) grow();
    std::size_t mask = slots_.size() - 1;
    for (std::size_t h = mix(key) & mask;; h = (h + 1) & mask) {
      if (slots_[h] == kEmpty) {
        slots_[h] = key;
        used_.push_back(h);
        return true;
      }
      if (slots_[h] == key) return false;
    }
  }

  void clear() {
    for (std::size_t h : used_) slots_[h] = kEmpty;
    used_.clear();
  }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};
  static std::size_t mix(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
  void grow() {
    std::vector<std::uint64_t> keys;
    for (std::size_t h : used_) keys.push_back(slots_[h]);
    slots_.assign(std::max<std::size_t>(64, slots_.size() * 2), kEmpty);
    used_.clear();
    for (auto k : keys) insert(k);
  }

  std::vector<std::uint64_t> slots_;
  std::vector<std::size_t> used_;
};

// Earley recognizer with implicit prediction: items with the dot at 0 are
// never stored. A column records which nonterminals are predicted there;
// scanning and completion consult the first-symbol indexes instead.
class Chart {
 public:
  /// Runs the recognizer. Returns the column where no item survives, or -1.
  int run(const CompiledGrammar& g, std::span<const std::string> toks, int start_nt) {
    g_ = &g;
    toks_ = toks;
    const std::size_t n = toks_.size();
    const std::size_t nts = g_->nonterminal_count();
    const std::size_t prods = g_->productions().size();
    words_ = (n + 1 + 63) / 64;
    items_.clear();
    col_begin_.assign(n + 2, 0);
    wait_head_.assign((n + 1) * nts, -1);
    wait_pool_.clear();
    predicted_.assign((n + 1) * nts, 0);
    done_.assign((n + 1) * prods * words_, 0);
    ends_.assign((n + 1) * nts * words_, 0);
    memo_index_.clear();
    memo_vals_.clear();
    tok_ids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) tok_ids_[i] = g_->terminal_id(toks_[i]);

    predict(0, start_nt);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i > 0) {
        seen_.clear();
        for (std::size_t w = col_begin_[i]; w < items_.size(); ++w) seen_.insert(key(items_[w]));
        if (items_.size() == col_begin_[i]) return static_cast<int>(i) - 1;
      }
      for (std::size_t w = col_begin_[i]; w < items_.size(); ++w) {
        EItem it = items_[w];
        const Production& p = g_->productions()[it.prod];
        if (it.dot == static_cast<int>(p.rhs.size())) {
          complete_item(it, p, i);
          continue;
        }
        const Symbol& s = p.rhs[it.dot];
        if (s.kind == Symbol::Kind::Nonterminal) {
          int& head = wait_head_[i * nts + s.id];
          wait_pool_.emplace_back(it, head);
          head = static_cast<int>(wait_pool_.size()) - 1;
          predict(i, s.id);
        } else if (i < n && matches(s, i)) {
          next_.push_back({it.prod, it.dot + 1, it.origin});
        }
      }
      col_begin_[i + 1] = items_.size();
      if (i < n) {
        scan_predicted(i);
        seen_.clear();
        for (const EItem& it : next_)
          if (seen_.insert(key(it))) items_.push_back(it);
        next_.clear();
      }
    }
    return -1;
  }

  /// Tokens and literal classes scannable at column i.
  std::set<std::string> expected(std::size_t i) const {
    std::set<std::string> out;
    for (std::size_t w = col_begin_[i]; w < col_begin_[i + 1]; ++w) {
      const EItem& it = items_[w];
      const Production& p = g_->productions()[it.prod];
      if (it.dot == static_cast<int>(p.rhs.size())) continue;
      const Symbol& s = p.rhs[it.dot];
      if (s.kind == Symbol::Kind::Terminal) out.insert(g_->terminal(s.id));
      if (s.kind == Symbol::Kind::Integer) out.insert(kIntegerClass);
      if (s.kind == Symbol::Kind::Variable) out.insert(kVariableClass);
    }
    const std::size_t nts = g_->nonterminal_count();
    for (std::size_t a = 0; a < nts; ++a) {
      if (!predicted_[i * nts + a]) continue;
      for (int pid : g_->productions_of(static_cast<int>(a))) {
        const Symbol& s = g_->productions()[pid].rhs.front();
        if (s.kind == Symbol::Kind::Terminal) out.insert(g_->terminal(s.id));
        if (s.kind == Symbol::Kind::Integer) out.insert(kIntegerClass);
        if (s.kind == Symbol::Kind::Variable) out.insert(kVariableClass);
      }
    }
    return out;
  }

  bool spans(int nt, int i, int j) const {
    if (nt < 0) return false;
    return test_bit(ends_, (i * g_->nonterminal_count() + nt) * words_, j);
  }

  const std::vector<Tree>& trees(int nt, int i, int j) {
    std::uint64_t k = span_key(nt, i, j);
    auto [m, fresh] = memo_index_.try_emplace(k, memo_vals_.size());
    if (!fresh) return memo_vals_[m->second];
    std::size_t slot_index = memo_vals_.size();
    memo_vals_.emplace_back();  // cycle guard: re-entry sees no trees
    std::vector<Tree> out;
    const std::size_t prods = g_->productions().size();
    for (int pid : g_->productions_of(nt)) {
      if (!test_bit(done_, (i * prods + pid) * words_, j)) continue;
      const Production& p = g_->productions()[pid];
      if (p.action == Production::Action::IntLeaf) {
        out.push_back(Tree::integer(toks_[i]));
        continue;
      }
      if (p.action == Production::Action::VarLeaf) {
        out.push_back(Tree::variable(toks_[i], p.leaf_category));
        continue;
      }
      build(p, i, j, out);
    }
    if (out.size() > 1) {
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    memo_vals_[slot_index] = std::move(out);
    return memo_vals_[slot_index];
  }

 private:
  static std::uint64_t key(const EItem& it) {
    return (static_cast<std::uint64_t>(it.prod) << 40) | (static_cast<std::uint64_t>(it.dot) << 24) |
           static_cast<std::uint64_t>(it.origin);
  }

  void add(std::size_t col, EItem it) {
    (void)col;  // always the column being processed
    if (seen_.insert(key(it))) items_.push_back(it);
  }

  bool matches(const Symbol& s, std::size_t i) const {
    if (s.kind == Symbol::Kind::Terminal) return tok_ids_[i] == s.id;
    return g_->matches(s, toks_[i]);
  }

  void predict(std::size_t col, int nt) {
    const std::size_t nts = g_->nonterminal_count();
    if (predicted_[col * nts + nt]) return;
    for (int a : g_->prediction_closure(nt)) predicted_[col * nts + a] = 1;
  }

  bool is_predicted(std::size_t col, int nt) const { return predicted_[col * g_->nonterminal_count() + nt]; }

  // Implicit dot-0 items of predicted nonterminals consume token i.
  void scan_predicted(std::size_t i) {
    auto start = [&](const std::vector<int>& pids) {
      for (int pid : pids)
        if (is_predicted(i, g_->productions()[pid].lhs)) next_.push_back({pid, 1, static_cast<int>(i)});
    };
    if (tok_ids_[i] >= 0) start(g_->starting_with_terminal(tok_ids_[i]));
    if (is_integer_token(toks_[i])) start(g_->starting_with_integer());
    if (is_pool_variable(toks_[i])) start(g_->starting_with_variable());
  }

  void complete_item(const EItem& it, const Production& p, std::size_t j) {
    const std::size_t nts = g_->nonterminal_count();
    const std::size_t prods = g_->productions().size();
    set_bit(done_, (it.origin * prods + it.prod) * words_, j);
    set_bit(ends_, (it.origin * nts + p.lhs) * words_, j);
    for (int k = wait_head_[it.origin * nts + p.lhs]; k >= 0; k = wait_pool_[k].second) {
      const EItem& parent = wait_pool_[k].first;
      add(j, {parent.prod, parent.dot + 1, parent.origin});
    }
    for (int pid : g_->starting_with_nonterminal(p.lhs))
      if (is_predicted(it.origin, g_->productions()[pid].lhs)) add(j, {pid, 1, it.origin});
  }

  struct Cut {
    const Production* p;
    int end;
    int starts[kMaxRhs];
  };

  // Enumerates every way to cut [at, end) among rhs[pos..] and builds trees
  // for each complete cut.
  void cuts(Cut& c, std::size_t pos, int at, std::vector<Tree>& out) {
    const Production& p = *c.p;
    if (pos == p.rhs.size()) {
      if (at == c.end) emit(c, out);
      return;
    }
    int remaining = static_cast<int>(p.rhs.size() - pos - 1);  // every symbol covers >= 1 token
    if (at + 1 + remaining > c.end) return;
    const Symbol& s = p.rhs[pos];
    c.starts[pos] = at;
    if (s.kind != Symbol::Kind::Nonterminal) {
      if (matches(s, at)) cuts(c, pos + 1, at + 1, out);
      return;
    }
    const std::size_t base = (at * g_->nonterminal_count() + s.id) * words_;
    for (int k = at + 1; k + remaining <= c.end; ++k)
      if (test_bit(ends_, base, k)) cuts(c, pos + 1, k, out);
  }

  void emit(const Cut& c, std::vector<Tree>& out) {
    const Production& p = *c.p;
    const std::vector<Tree>* alts[kMaxRhs];
    std::size_t slot_of_arg[kMaxRhs];
    std::size_t count = 0;
    for (std::size_t q = 0; q < p.rhs.size(); ++q) {
      if (p.rhs[q].kind != Symbol::Kind::Nonterminal) continue;
      int end = q + 1 < p.rhs.size() ? c.starts[q + 1] : c.end;
      alts[count] = &trees(p.rhs[q].id, c.starts[q], end);
      if (alts[count]->empty()) return;
      slot_of_arg[p.args[q]] = count;
      ++count;
    }
    if (p.action == Production::Action::Pass) {
      out.insert(out.end(), alts[0]->begin(), alts[0]->end());
      return;
    }
    std::size_t idx[kMaxRhs] = {};
    while (true) {
      std::vector<Tree> kids;
      kids.reserve(count);
      for (std::size_t a = 0; a < count; ++a) kids.push_back((*alts[slot_of_arg[a]])[idx[slot_of_arg[a]]]);
      out.push_back(Tree::node(p.ctor, std::move(kids)));
      std::size_t a = count;
      while (a > 0 && ++idx[a - 1] == alts[a - 1]->size()) idx[--a] = 0;
      if (a == 0) break;
    }
  }

  void build(const Production& p, int i, int j, std::vector<Tree>& out) {
    Cut c;
    c.p = &p;
    c.end = j;
    cuts(c, 0, i, out);
  }

  static void set_bit(std::vector<std::uint64_t>& v, std::size_t base, std::size_t bit) {
    v[base + bit / 64] |= std::uint64_t{1} << (bit % 64);
  }
  static bool test_bit(const std::vector<std::uint64_t>& v, std::size_t base, std::size_t bit) {
    return (v[base + bit / 64] >> (bit % 64)) & 1;
  }

  static std::uint64_t span_key(int a, int i, int j) {
    return (static_cast<std::uint64_t>(a) << 40) | (static_cast<std::uint64_t>(i) << 20) |
           static_cast<std::uint64_t>(j);
  }

  const CompiledGrammar* g_ = nullptr;
  std::span<const std::string> toks_;
  std::vector<EItem> items_;           // all columns, contiguous
  std::vector<std::size_t> col_begin_;
  std::vector<EItem> next_;
  KeySet seen_;
  std::size_t words_ = 1;
  std::vector<int> wait_head_;                         // (column, nonterminal) -> list in wait_pool_
  std::vector<std::pair<EItem, int>> wait_pool_;
  std::vector<int> tok_ids_;
  std::vector<char> predicted_;                        // (column, nonterminal)
  std::vector<std::uint64_t> done_;                    // (start, production) -> bitset of ends
  std::vector<std::uint64_t> ends_;                    // (start, nonterminal) -> bitset of ends
  std::unordered_map<std::uint64_t, std::size_t> memo_index_;
  std::deque<std::vector<Tree>> memo_vals_;
};

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& t : s) out += (out.empty() ? "" : " ") + t;
  return out;
}

int start_or_throw(const CompiledGrammar& cg, const Category& cat) {
  int s = cg.start(cat);
  if (s < 0) throw Error(Errc::UnknownCategory, "no sentences of category " + cat, {{"category", cat}});
  return s;
}

}  // namespace

std::vector<Tree> parse(std::span<const std::string> tokens, const Category& cat, const CompiledGrammar& cg) {
  int s = start_or_throw(cg, cat);
  std::vector<std::string> toks(tokens.begin(), tokens.end());
  std::size_t given = toks.size();
  auto mark = cg.punctuation(cat);
  if (!toks.empty() && is_sentence_mark(toks.back()) && (!mark || *mark != toks.back())) toks.pop_back();
  if (mark && (toks.empty() || toks.back() != *mark)) toks.push_back(*mark);

  thread_local Chart chart;
  int dead = chart.run(cg, toks, s);
  auto fail = [&](std::size_t pos) -> Error {
    std::set<std::string> exp = chart.expected(pos);
    std::size_t shown = std::min(pos, given);
    std::string tok = pos < toks.size() ? toks[pos] : "";
    return Error(Errc::NoParse, "no parse at position " + std::to_string(shown) + (tok.empty() ? "" : " ('" + tok + "')"),
                 {{"position", std::to_string(shown)}, {"expected", join(exp)}, {"token", tok}});
  };
  if (dead >= 0) throw fail(static_cast<std::size_t>(dead));
  std::vector<Tree> out = chart.trees(s, 0, static_cast<int>(toks.size()));
  if (out.empty()) throw fail(toks.size());
  return out;
}

CompletionSet complete(std::span<const std::string> prefix, const Category& cat, const CompiledGrammar& cg) {
  int s = start_or_throw(cg, cat);
  thread_local Chart chart;
  CompletionSet out;
  if (chart.run(cg, prefix, s) >= 0) return out;
  int n = static_cast<int>(prefix.size());
  out.next_tokens = chart.expected(prefix.size());
  out.complete = chart.spans(s, 0, n) || chart.spans(cg.phrase(cat), 0, n);
  return out;
}

}  // namespace mgl
