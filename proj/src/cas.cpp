#include "mgl/cas.hpp"

#include <functional>
#include <set>
#include <unordered_map>

#include "mgl/error.hpp"
#include "mgl/linearize.hpp"

namespace mgl {

struct Evaluator::Scope {
  const Bindings& global;
  std::vector<std::pair<std::string, std::optional<ExactExpr>>> local;  // nullopt: symbolic

  // nullptr when the variable is free
  const ExactExpr* lookup(const std::string& v, bool& bound) const {
    for (auto it = local.rbegin(); it != local.rend(); ++it)
      if (it->first == v) {
        bound = true;
        return it->second ? &*it->second : nullptr;
      }
    auto g = global.find(v);
    bound = g != global.end();
    return bound ? &g->second : nullptr;
  }
};

namespace {

enum class Op {
  Var2Num, IntLit, Plus, Minus, Times, Divide, Power, Abs, Sqrt, Summation,
  Pi, Gamma, At, IntegralOver,
};

const std::unordered_map<std::string, Op>& ops() {
  static const std::unordered_map<std::string, Op> table = {
      {"Var2Num", Op::Var2Num}, {"IntLit", Op::IntLit}, {"plus", Op::Plus},
      {"minus", Op::Minus},     {"times", Op::Times},   {"divide", Op::Divide},
      {"power", Op::Power},     {"abs", Op::Abs},       {"sqrt", Op::Sqrt},
      {"summation", Op::Summation}, {"pi", Op::Pi},     {"gammaConst", Op::Gamma},
      {"At", Op::At},           {"integralOver", Op::IntegralOver},
  };
  return table;
}

Tree int_tree(const BigInt& v) { return Tree::node("IntLit", {Tree::integer(v.str())}); }

Tree rational_tree(const Rational& q) {
  Tree n = int_tree(boost::multiprecision::numerator(q));
  if (boost::multiprecision::denominator(q) == 1) return n;
  return Tree::node("divide", {n, int_tree(boost::multiprecision::denominator(q))});
}

Tree exponent_tree(const Exponent& e) {
  Tree n = int_tree(e.numerator());
  if (e.denominator() == 1) return n;
  return Tree::node("divide", {n, int_tree(e.denominator())});
}

Tree atom_tree(const Atom& a) {
  switch (a.kind) {
    case Atom::Kind::Constant:
      return Tree::node(a.name == "pi" ? "pi" : "gammaConst");
    case Atom::Kind::Variable:
      return Tree::node("Var2Num", {Tree::variable(a.name, "VarNum")});
    case Atom::Kind::Opaque:
      break;
  }
  return a.opaque->tree();
}

Tree factor_tree(const Atom& a, const Exponent& e) {
  Tree base = atom_tree(a);
  if (e == Exponent(1)) return base;
  if (e == Exponent(1, 2)) return Tree::node("sqrt", {base});
  return Tree::node("power", {base, exponent_tree(e)});
}

// |t| as a tree, shaped like its CAS rendering.
Tree term_tree(const Term& t) {
  std::vector<Tree> num, den;
  if (t.radicand != 1) num.push_back(Tree::node("sqrt", {int_tree(t.radicand)}));
  for (const auto& f : t.factors) {
    if (f.exp.numerator() < 0)
      den.push_back(factor_tree(f.atom, -f.exp));
    else
      num.push_back(factor_tree(f.atom, f.exp));
  }
  Rational c = boost::multiprecision::abs(t.coef);
  std::optional<Tree> acc;
  if (c != 1 || num.empty()) acc = rational_tree(c);
  for (auto& n : num) acc = acc ? Tree::node("times", {*acc, n}) : n;
  for (auto& d : den) acc = Tree::node("divide", {*acc, d});
  return *acc;
}

Tree list_tree(const std::vector<Tree>& xs) {
  Tree acc = Tree::node("BaseValNum", {xs[xs.size() - 2], xs.back()});
  for (std::size_t i = xs.size() - 2; i-- > 0;) acc = Tree::node("ConsValNum", {xs[i], acc});
  return Tree::node("plus", {acc});
}

// Variables used as values in `t` that no enclosing binder captures.
void free_vars(const Tree& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (t.is_leaf()) return;
  const std::string& f = t.ctor();
  if (f == "Var2Num") {
    const std::string& v = t.child(0).token();
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) out.insert(v);
    return;
  }
  if (f == "summation") {
    for (int i = 1; i <= 2; ++i) free_vars(t.child(i), bound, out);
    bound.push_back(t.child(0).token());
    free_vars(t.child(3), bound, out);
    bound.pop_back();
    return;
  }
  if (f == "lambda") {
    bound.push_back(t.child(0).token());
    free_vars(t.child(1), bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& c : t.children()) free_vars(c, bound, out);
}

// cos(k * pi / 12) when it has a radical normal form.
std::optional<ExactExpr> cos_twelfths(long long k) {
  k %= 24;
  if (k < 0) k += 24;
  if (k > 12) k = 24 - k;
  Rational sign = 1;
  if (k > 6) {
    k = 12 - k;
    sign = -1;
  }
  switch (k) {
    case 0: return ExactExpr(sign);
    case 2: return ExactExpr(Term{sign / 2, 3, {}});
    case 3: return ExactExpr(Term{sign / 2, 2, {}});
    case 4: return ExactExpr(sign / 2);
    case 6: return ExactExpr();
    default: return std::nullopt;
  }
}

// e = q * pi, with 12q an integer.
std::optional<long long> pi_twelfths(const ExactExpr& e) {
  if (e.terms().size() != 1) return std::nullopt;
  const Term& t = e.terms()[0];
  if (t.radicand != 1 || t.factors.size() != 1) return std::nullopt;
  const Factor& f = t.factors[0];
  if (f.atom.kind != Atom::Kind::Constant || f.atom.name != "pi" || f.exp != Exponent(1)) return std::nullopt;
  Rational k = t.coef * 12;
  if (boost::multiprecision::denominator(k) != 1) return std::nullopt;
  BigInt n = boost::multiprecision::numerator(k) % 24;
  return static_cast<long long>(n);
}

constexpr long long kMaxSumTerms = 1000000;

}  // namespace

Evaluator::Evaluator(const ConcreteGrammar& cas) : cas_(cas), cfg_(compile_cfg(cas)) {}

std::string Evaluator::code(const Tree& t) const { return linearize_plain(t, cas_, Style::Descriptive); }

ExactExpr Evaluator::opaque(std::string ctor, std::optional<Tree> fn, std::vector<ExactExpr> args) const {
  int prec = cas_.template_for(ctor, Style::Descriptive).prec;
  auto term = std::make_shared<const OpaqueTerm>(this, std::move(ctor), std::move(fn), std::move(args), prec);
  return ExactExpr::atom(Atom{Atom::Kind::Opaque, {}, std::move(term)});
}

const Tree& OpaqueTerm::tree() const {
  std::call_once(tree_once_, [this] {
    std::vector<Tree> children;
    if (fn_) children.push_back(*fn_);
    for (const auto& a : args_) children.push_back(ev_->to_tree(a));
    tree_ = Tree::node(ctor_, std::move(children));
  });
  return *tree_;
}

const std::string& OpaqueTerm::code() const {
  std::call_once(code_once_, [this] { code_ = ev_->code(tree()); });
  return code_;
}

ExactExpr Evaluator::apply(const std::string& fn, const ExactExpr& arg) const {
  if (arg.is_zero()) return ExactExpr(fn == "cos" || fn == "cosh" ? 1 : 0);
  if (fn == "cos" || fn == "sin") {
    if (auto k = pi_twelfths(arg)) {
      auto v = cos_twelfths(fn == "cos" ? *k : 6 - *k);
      if (v) return *v;
    }
  }
  return opaque("At", Tree::node(fn), {arg});
}

ExactExpr Evaluator::simplify(const Tree& e, const Bindings& bindings) const {
  Scope s{bindings, {}};
  return eval(e, s);
}

ExactExpr Evaluator::eval(const Tree& t, Scope& s) const {
  if (t.is_integer_leaf()) return ExactExpr(Rational(BigInt(t.token())));
  if (t.is_leaf()) throw Error(Errc::UnsupportedExpression, "not a number: " + t.token(), {{"node", t.token()}});
  auto it = ops().find(t.ctor());
  if (it == ops().end())
    throw Error(Errc::UnsupportedExpression, "cannot evaluate " + t.ctor(), {{"node", t.ctor()}});
  switch (it->second) {
    case Op::Var2Num: {
      const std::string& v = t.child(0).token();
      bool bound = false;
      if (const ExactExpr* val = s.lookup(v, bound)) return *val;
      return ExactExpr::atom(Atom::variable(v));
    }
    case Op::IntLit:
      return eval(t.child(0), s);
    case Op::Plus: {
      ExactExpr acc;
      const Tree* list = &t.child(0);
      while (list->ctor() == "ConsValNum") {
        acc = acc + eval(list->child(0), s);
        list = &list->child(1);
      }
      return acc + eval(list->child(0), s) + eval(list->child(1), s);
    }
    case Op::Minus:
      return eval(t.child(0), s) - eval(t.child(1), s);
    case Op::Times:
      return eval(t.child(0), s) * eval(t.child(1), s);
    case Op::Divide: {
      ExactExpr a = eval(t.child(0), s), b = eval(t.child(1), s);
      if (auto inv = b.inverse()) return a * *inv;
      return opaque("divide", std::nullopt, {a, b});
    }
    case Op::Power: {
      ExactExpr a = eval(t.child(0), s), b = eval(t.child(1), s);
      if (a == ExactExpr(1)) return a;
      if (b.is_rational())
        if (auto r = a.pow(b.rational())) return *r;
      return opaque("power", std::nullopt, {a, b});
    }
    case Op::Abs: {
      ExactExpr a = eval(t.child(0), s);
      if (a.is_rational()) return ExactExpr(boost::multiprecision::abs(a.rational()));
      if (a.terms().size() == 1 && a.is_ground() && !a.has_opaque()) return a.terms()[0].coef < 0 ? -a : a;
      return opaque("abs", std::nullopt, {a});
    }
    case Op::Sqrt: {
      ExactExpr a = eval(t.child(0), s);
      if (auto r = a.sqrt()) return *r;
      return opaque("sqrt", std::nullopt, {a});
    }
    case Op::Summation: {
      ExactExpr lo = eval(t.child(1), s), hi = eval(t.child(2), s);
      return sum(t.child(3), t.child(0).token(), lo, hi, s);
    }
    case Op::Pi:
      return ExactExpr::pi();
    case Op::Gamma:
      return ExactExpr::atom(Atom::constant("euler_gamma"));
    case Op::At: {
      const Tree& f = t.child(0);
      ExactExpr a = eval(t.child(1), s);
      const std::string& fn = f.ctor();
      if (fn == "cos" || fn == "sin" || fn == "cosh" || fn == "tanh") return apply(fn, a);
      if (fn == "lambda") {
        s.local.emplace_back(f.child(0).token(), a);
        ExactExpr r = eval(f.child(1), s);
        s.local.pop_back();
        return r;
      }
      return opaque("At", f, {a});
    }
    case Op::IntegralOver:
      return integrate(t.child(0), t.child(1), s);
  }
  throw Error(Errc::UnsupportedExpression, "cannot evaluate " + t.ctor(), {{"node", t.ctor()}});
}

ExactExpr Evaluator::sum_range(const Tree& body, const std::string& var, const ExactExpr& lo, const ExactExpr& hi,
                               const Bindings& bindings) const {
  Scope s{bindings, {}};
  return sum(body, var, lo, hi, s);
}

ExactExpr Evaluator::sum(const Tree& body, const std::string& var, const ExactExpr& lo, const ExactExpr& hi,
                         Scope& s) const {
  if (!lo.is_integer() || !hi.is_integer())
    throw Error(Errc::NonGroundBound, "summation bounds must be integers",
                {{"lo", render_cas(lo)}, {"hi", render_cas(hi)}});
  std::vector<std::string> bound{var};
  std::set<std::string> free;
  free_vars(body, bound, free);
  for (const auto& v : free) {
    bool known = false;
    s.lookup(v, known);
    if (!known) throw Error(Errc::UnboundBodyVariable, "summation body mentions free variable " + v, {{"variable", v}});
  }
  BigInt a = boost::multiprecision::numerator(lo.rational());
  BigInt b = boost::multiprecision::numerator(hi.rational());
  ExactExpr acc;
  if (b < a) return acc;
  if (b - a >= kMaxSumTerms)
    throw Error(Errc::EvalError, "summation range too large", {{"terms", BigInt(b - a + 1).str()}});
  s.local.emplace_back(var, std::nullopt);
  for (BigInt i = a; i <= b; ++i) {
    s.local.back().second = ExactExpr(Rational(i));
    acc = acc + eval(body, s);
  }
  s.local.pop_back();
  return acc;
}

ExactExpr Evaluator::integrate_definite(const Tree& f, const Tree& interval, const Bindings& bindings) const {
  Scope s{bindings, {}};
  return integrate(f, interval, s);
}

ExactExpr Evaluator::integrate(const Tree& f, const Tree& interval, Scope& s) const {
  if (interval.is_leaf() || (interval.ctor() != "openInterval" && interval.ctor() != "closedInterval"))
    throw Error(Errc::UnsupportedExpression, "integration domain must be an interval",
                {{"node", interval.to_string()}});
  ExactExpr a = eval(interval.child(0), s), b = eval(interval.child(1), s);
  if (!a.is_ground() || !b.is_ground())
    throw Error(Errc::UnboundedInterval, "interval endpoints must be numbers",
                {{"from", render_cas(a)}, {"to", render_cas(b)}});
  auto unsupported = [&](const std::string& why) {
    return Error(Errc::UnsupportedIntegrand, "cannot integrate " + f.to_string() + ": " + why,
                 {{"node", f.to_string()}});
  };
  const std::string& fn = f.is_leaf() ? f.token() : f.ctor();
  if (fn == "cos") return apply("sin", b) - apply("sin", a);
  if (fn == "sin") return apply("cos", a) - apply("cos", b);
  if (fn != "lambda") throw unsupported("no antiderivative");

  const std::string v = f.child(0).token();
  s.local.emplace_back(v, std::nullopt);
  ExactExpr body = eval(f.child(1), s);
  s.local.pop_back();

  ExactExpr result;
  for (const auto& t : body.terms()) {
    Term rest{t.coef, t.radicand, {}};
    Exponent e = 0;
    for (const auto& fac : t.factors) {
      if (fac.atom.kind == Atom::Kind::Variable && fac.atom.name == v)
        e = fac.exp;
      else if (fac.atom.mentions(v))
        throw unsupported(fac.atom.code() + " is not a power of " + v);
      else
        rest.factors.push_back(fac);
    }
    if (e == Exponent(-1)) throw unsupported("exponent -1");
    if (e.denominator() > 2) throw unsupported("exponent denominator above 2");
    Exponent up = e + 1;
    Rational r(up.numerator(), up.denominator());
    auto hi = b.pow(r), lo = a.pow(r);
    if (!hi || !lo) throw unsupported("no exact value at the endpoints");
    ExactExpr scale(Term{rest.coef / r, rest.radicand, rest.factors});
    result = result + scale * (*hi - *lo);
  }
  return result;
}

Tree Evaluator::to_tree(const ExactExpr& e) const {
  if (e.is_zero()) return int_tree(0);
  std::optional<Tree> acc;
  std::vector<Tree> run;  // consecutive positive terms
  auto flush = [&] {
    if (run.empty()) return;
    if (acc) {
      for (auto& r : run) acc = list_tree({*acc, r});
    } else {
      acc = run.size() == 1 ? run[0] : list_tree(run);
    }
    run.clear();
  };
  for (const auto& t : display_order(e)) {
    if (t.coef > 0) {
      run.push_back(term_tree(t));
      continue;
    }
    flush();
    acc = Tree::node("minus", {acc ? *acc : int_tree(0), term_tree(t)});
  }
  flush();
  return *acc;
}

Tree Evaluator::parse_cas(const std::string& text, const Category& cat) const {
  auto tokens = tokenize(text, cas_);
  if (!tokens.empty() && tokens[0] == "-") tokens.insert(tokens.begin(), "0");
  return parse(tokens, cat, cfg_).front();
}

}  // namespace mgl
