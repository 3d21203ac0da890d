#include "mgl/word_problem.hpp"

#include <algorithm>
#include <boost/algorithm/string.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mgl/engine.hpp"
#include "mgl/error.hpp"

namespace mgl {

// ---------------------------------------------------------------------------
// Lexicon

namespace {

bool parse_bool(const std::string& s, bool& out) {
  std::string v = boost::to_lower_copy(s);
  if (v == "true" || v == "yes" || v == "1") return out = true, true;
  if (v == "false" || v == "no" || v == "0" || v == "-") return out = false, true;
  return false;
}

}  // namespace

Lexicon Lexicon::parse(std::istream& in, const std::string& source) {
  Lexicon lex;
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    return Error(Errc::LexiconError, source + ":" + std::to_string(lineno) + ": " + why,
                 {{"source", source}, {"line", std::to_string(lineno)}});
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    boost::trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    boost::split(f, line, boost::is_any_of("|"));
    if (f.size() != 5) throw bad("expected 5 fields, found " + std::to_string(f.size()));
    for (auto& x : f) boost::trim(x);
    LexEntry e;
    e.lemma = boost::to_lower_copy(f[0]);
    if (e.lemma.empty()) throw bad("empty lemma");
    if (f[1] != "common-noun" && f[1] != "other") throw bad("unknown part of speech " + f[1]);
    e.common_noun = f[1] == "common-noun";
    if (!f[2].empty() && f[2] != "-") {
      boost::split(e.hypernyms, f[2], boost::is_any_of(","));
      for (auto& h : e.hypernyms) boost::trim(h);
    }
    if (!parse_bool(f[3], e.location)) throw bad("location must be true or false");
    if (f[4] != "-") {
      try {
        std::size_t used = 0;
        long long n = std::stoll(f[4], &used);
        if (used != f[4].size() || n < 0) throw std::invalid_argument("");
        e.legs = n;
      } catch (const std::exception&) {
        throw bad("legs must be a non-negative integer or -");
      }
    }
    if (lex.entries_.count(e.lemma)) throw bad("duplicate lemma " + e.lemma);
    lex.entries_.emplace(e.lemma, std::move(e));
  }
  for (const auto& [lemma, e] : lex.entries_)
    for (const auto& h : e.hypernyms)
      if (!lex.entries_.count(h))
        throw Error(Errc::LexiconError, source + ": unknown hypernym " + h + " of " + lemma,
                    {{"source", source}, {"lemma", lemma}});

  // hypernym graph must be acyclic
  std::map<std::string, int> state;  // 1 visiting, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& l) {
    if (state[l] == 2) return;
    if (state[l] == 1)
      throw Error(Errc::LexiconError, source + ": hypernym cycle through " + l, {{"source", source}, {"lemma", l}});
    state[l] = 1;
    for (const auto& h : lex.entries_.at(l).hypernyms) visit(h);
    state[l] = 2;
  };
  for (const auto& [lemma, e] : lex.entries_) visit(lemma);
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string(), {{"path", path.string()}});
  return parse(in, path.string());
}

const LexEntry* Lexicon::find(const std::string& lemma) const {
  auto it = entries_.find(lemma);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::string> Lexicon::lemma_of(const std::string& word) const {
  std::string w = boost::to_lower_copy(word);
  if (entries_.count(w)) return w;
  if (w.size() > 1 && w.back() == 's' && entries_.count(w.substr(0, w.size() - 1))) return w.substr(0, w.size() - 1);
  return std::nullopt;
}

const LexEntry& Lexicon::require(const std::string& word) const {
  auto l = lemma_of(word);
  if (!l) {
    std::string w = boost::to_lower_copy(word);
    std::string stem = w.size() > 1 && w.back() == 's' ? w.substr(0, w.size() - 1) : w;
    throw Error(Errc::UnknownLemma, "unknown word " + stem, {{"word", stem}});
  }
  return entries_.at(*l);
}

bool Lexicon::is_a(const std::string& lemma, const std::string& hyper) const {
  const LexEntry* e = find(lemma);
  if (!e) return false;
  for (const auto& h : e->hypernyms)
    if (h == hyper || is_a(h, hyper)) return true;
  return false;
}

std::optional<std::string> Lexicon::common_hypernym(const std::vector<std::string>& lemmas) const {
  if (lemmas.empty()) return std::nullopt;
  // breadth-first from the first lemma, nearest ancestors first
  std::vector<std::string> frontier = find(lemmas[0]) ? find(lemmas[0])->hypernyms : std::vector<std::string>{};
  std::set<std::string> seen;
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& h : frontier) {
      if (!seen.insert(h).second) continue;
      bool all = std::all_of(lemmas.begin() + 1, lemmas.end(), [&](const std::string& l) { return is_a(l, h); });
      if (all) return h;
      for (const auto& g : find(h)->hypernyms) next.push_back(g);
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sets and constraints

namespace {

std::string child_text(const SetExpr& c, bool wrap_inter) {
  bool wrap = c.op == SetExpr::Op::Union || c.op == SetExpr::Op::Diff || (wrap_inter && c.op == SetExpr::Op::Inter);
  return wrap ? "(" + c.to_string() + ")" : c.to_string();
}

}  // namespace

std::string SetExpr::to_string() const {
  switch (op) {
    case Op::Entity:
    case Op::Instance:
      return name;
    case Op::In:
      return "IN(" + args[0].to_string() + ")";
    case Op::Inter:
      return child_text(args[0], false) + " ∩ " + child_text(args[1], false);
    case Op::Union: {
      std::string out;
      for (const auto& a : args) out += (out.empty() ? "" : " ∪ ") + child_text(a, true);
      return out;
    }
    case Op::Diff:
      return child_text(args[0], false) + " \\ " + child_text(args[1], true);
  }
  return {};
}

std::string Constraint::to_string() const {
  switch (kind) {
    case Kind::Cardinality:
      return "|" + set.to_string() + "| = " + std::to_string(value);
    case Kind::Lower:
      return "|" + set.to_string() + "| ≥ " + std::to_string(value);
    case Kind::Closure:
      return set.to_string() + " = ∅";
    case Kind::Subset:
      return set.to_string() + " ⊂ " + super.to_string();
  }
  return {};
}

const std::string* ConstraintSet::lemma_of(const std::string& entity) const {
  for (const auto& [sym, lemma] : entities)
    if (sym == entity) return &lemma;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Sentence patterns

namespace {

using Words = std::vector<std::string>;

struct Sentence {
  Words words;
  char end = '.';
  std::string text;
};

std::vector<Sentence> split_sentences(const std::string& text) {
  std::vector<Sentence> out;
  Sentence cur;
  std::string word;
  auto flush_word = [&] {
    if (!word.empty()) cur.words.push_back(boost::to_lower_copy(word));
    word.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      word += c;
      cur.text += c;
      continue;
    }
    flush_word();
    if (c == ',') cur.words.push_back(",");
    if (c == '.' || c == '?' || c == '!') {
      cur.end = c;
      if (!cur.words.empty()) out.push_back(std::move(cur));
      cur = Sentence{};
    } else if (c != '$') {
      cur.text += c;
    }
  }
  flush_word();
  if (!cur.words.empty()) out.push_back(std::move(cur));
  for (auto& s : out) boost::trim(s.text);
  return out;
}

bool is_number(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_det(const std::string& w) { return w == "a" || w == "an" || w == "the" || w == "one"; }

bool is_noun(const std::string& w) {
  static const std::set<std::string> function_words = {
      "a",   "an",   "the",  "and", ",",     "has", "have", "is",    "are",  "there", "they", "in",
      "how", "many", "other", "than", "no",  "of",  "with", "what", "which", "it",   "them"};
  return !function_words.count(w) && !is_number(w);
}

// Matches `pat` at `i`; "N" matches a noun, "#" a number, "a|b" alternatives,
// "?x" an optional word. Captures go to `caps`.
bool match(const Words& w, std::size_t& i, const std::vector<std::string>& pat, Words& caps) {
  std::size_t j = i;
  Words got;
  for (const auto& p : pat) {
    bool optional = p.size() > 1 && p[0] == '?';
    std::string q = optional ? p.substr(1) : p;
    bool ok = false;
    if (j < w.size()) {
      if (q == "N") ok = is_noun(w[j]);
      else if (q == "#") ok = is_number(w[j]);
      else if (q == "D") ok = is_det(w[j]);
      else {
        std::vector<std::string> alts;
        boost::split(alts, q, boost::is_any_of("|"));
        ok = std::find(alts.begin(), alts.end(), w[j]) != alts.end();
      }
    }
    if (ok) {
      if (q == "N" || q == "#" || q == "D") got.push_back(w[j]);
      ++j;
    } else if (optional) {
      if (q == "N" || q == "#" || q == "D") got.push_back("");
    } else {
      return false;
    }
  }
  i = j;
  caps.insert(caps.end(), got.begin(), got.end());
  return true;
}

// noun ("," noun)* "and" noun, or a single noun
bool match_list(const Words& w, std::size_t& i, Words& items) {
  std::size_t j = i;
  Words got;
  while (j < w.size() && is_noun(w[j])) {
    got.push_back(w[j++]);
    if (j < w.size() && (w[j] == "," || w[j] == "and")) {
      bool last = w[j] == "and";
      ++j;
      if (last) {
        if (j >= w.size() || !is_noun(w[j])) return false;
        got.push_back(w[j++]);
        break;
      }
    } else {
      break;
    }
  }
  if (got.empty()) return false;
  i = j;
  items = std::move(got);
  return true;
}

std::string join_list(const Words& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += k + 1 == items.size() ? " and " : ", ";
    out += items[k];
  }
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// One recognized explicit statement.
struct Fact {
  enum class Kind { Closure, Count, Attribute, Question };
  Kind kind;
  std::string det, place, whole, part;  // surface words
  Words items;
  long long number = 0;
};

std::string render(const Fact& f) {
  switch (f.kind) {
    case Fact::Kind::Closure:
      return capitalize(f.det) + " " + f.place + " has no " + f.whole + " other than " + join_list(f.items) + ".";
    case Fact::Kind::Count:
      return "There are " + std::to_string(f.number) + " " + f.whole + " in the " + f.place + ".";
    case Fact::Kind::Attribute:
      return "The " + f.whole + " in the " + f.place + " have " + std::to_string(f.number) + " " + f.part + ".";
    case Fact::Kind::Question:
      return "How many " + f.items[0] + " are there in the " + f.place + "?";
  }
  return {};
}

long long to_count(const std::string& w) {
  try {
    return std::stoll(w);
  } catch (const std::exception&) {
    throw Error(Errc::UnmatchedSentence, "number out of range: " + w, {{"sentence", w}});
  }
}

// Discourse state shared by consecutive sentences.
struct Context {
  std::string place;    // "farm", once a location is introduced
  std::string subject;  // last counted plural noun, for "they"
};

Error unmatched(const std::string& sentence, const std::string& why = "no pattern applies") {
  return Error(Errc::UnmatchedSentence, why + ": " + sentence, {{"sentence", sentence}});
}

// Reads the sentence `w` (possibly one clause of a conjunction) as facts.
std::vector<Fact> read_clause(const Words& w, const std::string& text, const Lexicon& lex, Context& ctx) {
  std::size_t i = 0;
  Words caps, items;
  auto at_end = [&] { return i == w.size(); };
  auto place_after = [&](std::size_t& k) -> std::string {
    Words p;
    std::size_t save = k;
    if (match(w, k, {"in", "the|a", "N"}, p)) return p[0];
    k = save;
    if (ctx.place.empty()) throw unmatched(text, "no location for \"there\"");
    return ctx.place;
  };
  auto set_place = [&](const std::string& noun) {
    const LexEntry& e = lex.require(noun);
    if (e.location) ctx.place = noun;
  };

  // <Det> <place> has no <whole> other than <items>
  if (match(w, i, {"?D", "N", "has|have", "no", "N", "other", "than"}, caps) && match_list(w, i, items) && at_end()) {
    set_place(caps[1]);
    ctx.subject = caps[2];
    Fact f{Fact::Kind::Closure, caps[0].empty() ? "a" : caps[0], caps[1], caps[2], "", items, 0};
    return {f};
  }
  // <Det> <place> has <items>
  i = 0, caps.clear(), items.clear();
  if (match(w, i, {"?D", "N", "has|have"}, caps) && match_list(w, i, items) && at_end() && items.size() >= 2) {
    std::vector<std::string> lemmas;
    for (const auto& it : items) lemmas.push_back(lex.require(it).lemma);
    auto h = lex.common_hypernym(lemmas);
    if (!h) throw unmatched(text, "no common hypernym for " + join_list(items));
    set_place(caps[1]);
    ctx.subject = *h + "s";
    Fact f{Fact::Kind::Closure, caps[0].empty() ? "a" : caps[0], caps[1], *h + "s", "", items, 0};
    return {f};
  }
  // there are <n> <whole> [in the <place>]
  i = 0, caps.clear();
  if (match(w, i, {"there", "are|is", "#", "N"}, caps)) {
    std::string place = place_after(i);
    if (at_end()) {
      ctx.subject = caps[1];
      return {Fact{Fact::Kind::Count, "", place, caps[1], "", {}, to_count(caps[0])}};
    }
  }
  // they have <n> <part>
  i = 0, caps.clear();
  if (match(w, i, {"they", "have|has", "#", "N"}, caps) && at_end()) {
    if (ctx.subject.empty() || ctx.place.empty()) throw unmatched(text, "nothing for \"they\" to refer to");
    return {Fact{Fact::Kind::Attribute, "", ctx.place, ctx.subject, caps[1], {}, to_count(caps[0])}};
  }
  // the <whole> in the <place> have <n> <part>
  i = 0, caps.clear();
  if (match(w, i, {"the", "N", "in", "the", "N", "have|has", "#", "N"}, caps) && at_end()) {
    ctx.subject = caps[0];
    return {Fact{Fact::Kind::Attribute, "", caps[1], caps[0], caps[3], {}, to_count(caps[2])}};
  }
  // how many <items> are there [in the <place>]
  i = 0, caps.clear(), items.clear();
  if (match(w, i, {"how", "many"}, caps) && match_list(w, i, items) && match(w, i, {"are|is", "there"}, caps)) {
    std::string place = place_after(i);
    if (at_end()) {
      std::vector<Fact> out;
      for (const auto& it : items) out.push_back(Fact{Fact::Kind::Question, "", place, "", "", {it}, 0});
      return out;
    }
  }
  throw unmatched(text);
}

// Splits "<clause> and they ..." into two clauses.
std::vector<Words> clauses(const Words& w) {
  for (std::size_t k = 1; k + 1 < w.size(); ++k)
    if (w[k] == "and" && w[k + 1] == "they") return {Words(w.begin(), w.begin() + k), Words(w.begin() + k + 1, w.end())};
  return {w};
}

std::vector<Fact> read_facts(const std::string& text, const Lexicon& lex, Context& ctx) {
  std::vector<Fact> facts;
  for (const auto& s : split_sentences(text))
    for (const auto& c : clauses(s.words))
      for (auto& f : read_clause(c, s.text, lex, ctx)) facts.push_back(std::move(f));
  return facts;
}

}  // namespace

std::vector<std::string> normalize(const std::string& text, const Lexicon& lex) {
  Context ctx;
  std::vector<std::string> out;
  for (const auto& f : read_facts(text, lex, ctx)) out.push_back(render(f));
  return out;
}

// ---------------------------------------------------------------------------
// Formalization

namespace {

class Formalizer {
 public:
  explicit Formalizer(const Lexicon& lex) : lex_(lex) {}

  std::string entity(const std::string& word) {
    const std::string& lemma = lex_.require(word).lemma;
    for (const auto& [sym, l] : cs.entities)
      if (l == lemma) return sym;
    std::string sym = capitalize(lemma.substr(0, 1));
    if (taken(sym)) sym = capitalize(lemma.substr(0, 2));
    for (int n = 2; taken(sym); ++n) sym = capitalize(lemma.substr(0, 1)) + std::to_string(n);
    cs.entities.emplace_back(sym, lemma);
    return sym;
  }

  std::string instance(const std::string& word) {
    std::string e = entity(word);
    for (const auto& [sym, ent] : cs.instances)
      if (ent == e) return sym;
    std::string sym = boost::to_lower_copy(e);
    while (taken(sym)) sym += "'";
    cs.instances.emplace_back(sym, e);
    return sym;
  }

  // |whole ∩ IN(place)|
  SetExpr located(const std::string& whole, const std::string& place) {
    return SetExpr::inter(SetExpr::entity(entity(whole)), SetExpr::in(SetExpr::instance(instance(place))));
  }

  void add(Constraint c) {
    if (std::find(cs.constraints.begin(), cs.constraints.end(), c) == cs.constraints.end())
      cs.constraints.push_back(std::move(c));
  }

  void apply(const Fact& f) {
    switch (f.kind) {
      case Fact::Kind::Closure: {
        instance(f.place);
        std::vector<SetExpr> members;
        for (const auto& it : f.items) {
          SetExpr x = located(it, f.place);
          add(Constraint{Constraint::Kind::Lower, x, {}, 1});
          members.push_back(SetExpr::entity(entity(it)));
        }
        std::string whole = entity(f.whole);
        add(Constraint{Constraint::Kind::Closure, SetExpr::diff(located(f.whole, f.place), SetExpr::set_union(members)),
                       {}, 0});
        for (const auto& it : f.items)
          if (lex_.is_a(lex_.require(it).lemma, lex_.require(f.whole).lemma))
            add(Constraint{Constraint::Kind::Subset, SetExpr::entity(entity(it)), SetExpr::entity(whole), 0});
        break;
      }
      case Fact::Kind::Count:
        add(Constraint{Constraint::Kind::Cardinality, located(f.whole, f.place), {}, f.number});
        break;
      case Fact::Kind::Attribute: {
        SetExpr owners = located(f.whole, f.place);
        add(Constraint{Constraint::Kind::Cardinality,
                       SetExpr::inter(SetExpr::entity(entity(f.part)), SetExpr::in(owners)), {}, f.number});
        break;
      }
      case Fact::Kind::Question: {
        SetExpr x = located(f.items[0], f.place);
        std::string e = entity(f.items[0]);
        for (const auto& u : cs.unknowns)
          if (u.set == x) return;
        std::string name = boost::to_lower_copy(e);
        while (taken(name)) name += "'";
        cs.unknowns.push_back(Unknown{name, *cs.lemma_of(e), x});
        break;
      }
    }
  }

  ConstraintSet cs;

 private:
  bool taken(const std::string& sym) const {
    for (const auto& [s, l] : cs.entities)
      if (s == sym) return true;
    for (const auto& [s, e] : cs.instances)
      if (s == sym) return true;
    for (const auto& u : cs.unknowns)
      if (u.name == sym) return true;
    return false;
  }

  const Lexicon& lex_;
};

}  // namespace

ConstraintSet formalize(const std::vector<std::string>& statements, const Lexicon& lex) {
  Formalizer fz(lex);
  Context ctx;
  for (const auto& s : statements)
    for (const auto& f : read_facts(s, lex, ctx)) fz.apply(f);
  if (fz.cs.unknowns.empty()) throw Error(Errc::NoQuestion, "the problem asks no how-many question");
  return fz.cs;
}

// ---------------------------------------------------------------------------
// Linear system

LinearSystem to_linear_system(const ConstraintSet& cs, const Lexicon& lex, bool no_min) {
  using Op = SetExpr::Op;
  // A ∩ IN(f) \ (D ∪ R) = ∅ whose members are exactly the unknowns
  std::set<std::string> unknown_entities;
  for (const auto& u : cs.unknowns) unknown_entities.insert(u.set.args[0].name);
  const SetExpr* population = nullptr;
  for (const auto& c : cs.constraints) {
    if (c.kind != Constraint::Kind::Closure || c.set.op != Op::Diff) continue;
    std::set<std::string> members;
    for (const auto& m : c.set.args[1].args) members.insert(m.name);
    bool same_place = std::all_of(cs.unknowns.begin(), cs.unknowns.end(),
                                  [&](const Unknown& u) { return u.set.args[1] == c.set.args[0].args[1]; });
    if (members == unknown_entities && same_place) population = &c.set.args[0];
  }
  if (!population) throw Error(Errc::NoClosure, "no closure statement partitions the counted population");

  LinearSystem ls;
  for (const auto& u : cs.unknowns) ls.variables.push_back(u.name);
  std::optional<long long> total;
  for (const auto& c : cs.constraints) {
    if (c.kind != Constraint::Kind::Cardinality) continue;
    if (c.set == *population) {
      total = c.value;
      ls.equations.push_back({std::vector<long long>(cs.unknowns.size(), 1), c.value});
    } else if (c.set.op == Op::Inter && c.set.args[1].op == Op::In && c.set.args[1].args[0] == *population) {
      const std::string& part = *cs.lemma_of(c.set.args[0].name);
      LinearEquation eq{{}, c.value};
      for (const auto& u : cs.unknowns) {
        const LexEntry& e = lex.require(u.lemma);
        if (part != "leg" || !e.legs)
          throw Error(Errc::MissingAttribute, "the lexicon has no " + part + " count for " + u.lemma,
                      {{"lemma", u.lemma}, {"attribute", part == "leg" ? "legs" : part}});
        eq.coeffs.push_back(*e.legs);
      }
      ls.equations.push_back(std::move(eq));
    }
  }
  if (!total)
    throw Error(Errc::UnboundedSystem, "the population " + population->to_string() + " is never counted",
                {{"set", population->to_string()}});
  for (const auto& u : cs.unknowns) {
    long long lo = 0;
    for (const auto& c : cs.constraints)
      if (c.kind == Constraint::Kind::Lower && c.set == u.set && !no_min) lo = std::max(lo, c.value);
    ls.lower.push_back(lo);
    ls.upper.push_back(*total);
  }
  return ls;
}

std::string LinearSystem::equation_text(std::size_t k) const {
  const LinearEquation& eq = equations.at(k);
  std::string out;
  for (std::size_t i = 0; i < eq.coeffs.size(); ++i) {
    long long c = eq.coeffs[i];
    if (c == 0) continue;
    if (!out.empty()) out += c < 0 ? " - " : " + ";
    else if (c < 0) out += "-";
    long long a = c < 0 ? -c : c;
    out += (a == 1 ? "" : std::to_string(a) + "*") + variables[i];
  }
  return (out.empty() ? "0" : out) + " = " + std::to_string(eq.rhs);
}

std::vector<Solution> solve(const LinearSystem& ls) {
  using Q = boost::multiprecision::mpq_rational;
  constexpr long long kMaxBox = 10'000'000;
  const std::size_t n = ls.variables.size();
  std::vector<std::vector<Q>> a;
  for (const auto& eq : ls.equations) {
    std::vector<Q> row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = j < eq.coeffs.size() ? eq.coeffs[j] : 0;
    row[n] = eq.rhs;
    a.push_back(std::move(row));
  }
  // reduced row echelon form
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[r], a[p]);
    Q lead = a[r][c];
    for (auto& x : a[r]) x /= lead;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k == r || a[k][c] == 0) continue;
      Q f = a[k][c];
      for (std::size_t j = 0; j <= n; ++j) a[k][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  for (std::size_t k = r; k < a.size(); ++k)
    if (a[k][n] != 0) return {};

  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < n; ++j)
    if (std::find(pivots.begin(), pivots.end(), j) == pivots.end()) free.push_back(j);
  long long box = 1;
  for (std::size_t j : free) {
    long long width = ls.upper[j] - ls.lower[j] + 1;
    if (width <= 0) return {};
    if (box > kMaxBox / width)
      throw Error(Errc::UnboundedSystem, "too many free assignments to enumerate", {{"variable", ls.variables[j]}});
    box *= width;
  }

  std::vector<Solution> out;
  std::vector<long long> x(n);
  for (std::size_t j : free) x[j] = ls.lower[j];
  while (true) {
    bool ok = true;
    for (std::size_t k = 0; k < pivots.size() && ok; ++k) {
      Q v = a[k][n];
      for (std::size_t j : free) v -= a[k][j] * x[j];
      if (boost::multiprecision::denominator(v) != 1) {
        ok = false;
        break;
      }
      long long iv = boost::multiprecision::numerator(v).convert_to<long long>();
      std::size_t pj = pivots[k];
      if (iv < ls.lower[pj] || iv > ls.upper[pj]) ok = false;
      x[pj] = iv;
    }
    if (ok) {
      Solution s;
      for (std::size_t j = 0; j < n; ++j) s.emplace_back(ls.variables[j], x[j]);
      out.push_back(std::move(s));
    }
    bool advanced = false;
    for (std::size_t k = free.size(); k-- > 0 && !advanced;) {
      if (++x[free[k]] <= ls.upper[free[k]]) advanced = true;
      else x[free[k]] = ls.lower[free[k]];
    }
    if (!advanced) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string render_answer(const std::vector<Solution>& solutions, const std::string& lang, const Engine& engine) {
  if (solutions.empty()) throw Error(Errc::NoSolutionToRender, "no solution to render");
  std::string out;
  for (const auto& s : solutions) {
    std::string line;
    for (const auto& [name, value] : s) {
      Tree prop = Tree::node(
          "mkProp", {Tree::node("eq_num", {Tree::node("Var2Num", {Tree::variable(name, "VarNum")}),
                                           Tree::node("IntLit", {Tree::integer(value)})})});
      line += (line.empty() ? "" : ", ") + engine.linearize(prop, lang);
    }
    out += (out.empty() ? "" : "\n") + line;
  }
  return out;
}

WordProblemResult solve_word_problem(const std::string& text, const Lexicon& lex, bool no_min) {
  WordProblemResult r;
  r.statements = normalize(text, lex);
  r.constraints = formalize(r.statements, lex);
  r.system = to_linear_system(r.constraints, lex, no_min);
  r.solutions = solve(r.system);
  return r;
}

}  // namespace mgl
