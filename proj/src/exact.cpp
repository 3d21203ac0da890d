#include "mgl/exact.hpp"

#include <algorithm>
#include <cmath>

#include "mgl/concrete_grammar.hpp"
#include "mgl/error.hpp"

namespace mgl {

using boost::multiprecision::abs;

OpaqueTerm::OpaqueTerm(const Evaluator* ev, std::string ctor, std::optional<Tree> fn, std::vector<ExactExpr> args,
                       int prec)
    : ev_(ev), ctor_(std::move(ctor)), fn_(std::move(fn)), args_(std::move(args)), prec_(prec) {
  for (const auto& a : args_) a.collect_variables(variables_);
  if (fn_) {
    std::vector<Tree> stack{*fn_};
    while (!stack.empty()) {
      Tree t = stack.back();
      stack.pop_back();
      if (t.is_variable_leaf() && std::find(variables_.begin(), variables_.end(), t.token()) == variables_.end())
        variables_.push_back(t.token());
      for (const auto& c : t.children()) stack.push_back(c);
    }
  }
}

std::strong_ordering operator<=>(const OpaqueTerm& a, const OpaqueTerm& b) {
  if (auto c = a.ctor_ <=> b.ctor_; c != 0) return c;
  if (auto c = a.fn_.has_value() <=> b.fn_.has_value(); c != 0) return c;
  if (a.fn_)
    if (auto c = *a.fn_ <=> *b.fn_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.args_.begin(), a.args_.end(), b.args_.begin(), b.args_.end());
}

Atom Atom::constant(std::string name) { return Atom{Kind::Constant, std::move(name), nullptr}; }

Atom Atom::variable(std::string name) { return Atom{Kind::Variable, std::move(name), nullptr}; }

int Atom::prec() const { return kind == Kind::Opaque ? opaque->prec() : kAtomicPrec; }

bool Atom::has_variables() const {
  return kind == Kind::Variable || (kind == Kind::Opaque && !opaque->variables().empty());
}

bool Atom::mentions(const std::string& var) const {
  if (kind == Kind::Variable) return name == var;
  if (kind == Kind::Opaque) {
    const auto& vs = opaque->variables();
    return std::find(vs.begin(), vs.end(), var) != vs.end();
  }
  return false;
}

void Atom::collect_variables(std::vector<std::string>& out) const {
  auto add = [&](const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  if (kind == Kind::Variable) add(name);
  if (kind == Kind::Opaque)
    for (const auto& v : opaque->variables()) add(v);
}

bool operator==(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Atom::Kind::Opaque) return a.opaque == b.opaque || (*a.opaque <=> *b.opaque) == 0;
  return a.name == b.name;
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return a.kind <=> b.kind;
  if (a.kind == Atom::Kind::Opaque) return a.opaque == b.opaque ? std::strong_ordering::equal : *a.opaque <=> *b.opaque;
  // pi sorts before euler_gamma
  if (a.kind == Atom::Kind::Constant && a.name != b.name)
    return a.name == "pi" ? std::strong_ordering::less : b.name == "pi" ? std::strong_ordering::greater : a.name <=> b.name;
  return a.name <=> b.name;
}

bool Term::has_variables() const {
  for (const auto& f : factors)
    if (f.atom.has_variables()) return true;
  return false;
}

bool Term::mentions(const std::string& var) const {
  for (const auto& f : factors)
    if (f.atom.mentions(var)) return true;
  return false;
}

namespace {

bool exp_less(const Exponent& a, const Exponent& b) { return a < b; }

// Order of the normal form (not of display).
bool key_less(const Term& a, const Term& b) {
  if (a.radicand != b.radicand) return a.radicand < b.radicand;
  return std::lexicographical_compare(a.factors.begin(), a.factors.end(), b.factors.begin(), b.factors.end(),
                                      [](const Factor& x, const Factor& y) {
                                        if (auto c = x.atom <=> y.atom; c != 0) return c < 0;
                                        return exp_less(x.exp, y.exp);
                                      });
}

bool same_key(const Term& a, const Term& b) { return a.radicand == b.radicand && a.factors == b.factors; }

using Factors = boost::container::small_vector<Factor, 2>;

Factors merge_factors(const Factors& a, const Factors& b) {
  Factors out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].atom < b[j].atom)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].atom < a[i].atom) {
      out.push_back(b[j++]);
    } else {
      Exponent e = a[i].exp + b[j].exp;
      if (e.numerator() != 0) out.push_back(Factor{a[i].atom, e});
      ++i;
      ++j;
    }
  }
  return out;
}

Term multiply(const Term& a, const Term& b) {
  Term t;
  t.coef = a.coef * b.coef;
  if (a.radicand == 1) {
    t.radicand = b.radicand;
  } else if (b.radicand == 1) {
    t.radicand = a.radicand;
  } else {
    BigInt g = boost::multiprecision::gcd(a.radicand, b.radicand);
    t.coef *= Rational(g);
    t.radicand = (a.radicand / g) * (b.radicand / g);
  }
  t.factors = a.factors.empty() ? b.factors : b.factors.empty() ? a.factors : merge_factors(a.factors, b.factors);
  return t;
}

constexpr long long kMaxPower = 4096;
constexpr long long kMaxSumPower = 64;
constexpr long long kMaxRoot = 64;

BigInt ipow(const BigInt& b, long long k) { return boost::multiprecision::pow(b, static_cast<unsigned>(k)); }

std::optional<BigInt> exact_root(const BigInt& n, long long q) {
  if (n < 2) return n;
  unsigned bits = boost::multiprecision::msb(n) + 1;
  BigInt lo = 0, hi = BigInt(1) << (bits / q + 1);
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (ipow(mid, q) <= n)
      lo = mid;
    else
      hi = mid - 1;
  }
  if (ipow(lo, q) == n) return lo;
  return std::nullopt;
}

std::optional<long long> small(const BigInt& v, long long limit) {
  if (abs(v) > limit) return std::nullopt;
  return static_cast<long long>(v);
}

}  // namespace

std::optional<std::pair<BigInt, BigInt>> split_square(const BigInt& m) {
  BigInt rem = m, s = 1, f = 1;
  auto strip = [&](unsigned p) {
    int e = 0;
    while (rem % p == 0) {
      rem /= p;
      ++e;
    }
    for (int i = 0; i + 1 < e; i += 2) s *= p;
    if (e % 2) f *= p;
  };
  strip(2);
  unsigned p = 3;
  for (; p <= 10000 && BigInt(p) * p <= rem; p += 2) strip(p);
  if (rem == 1) return std::make_pair(s, f);
  if (BigInt(p) * p > rem) return std::make_pair(s, f * rem);
  BigInt r = boost::multiprecision::sqrt(rem);
  if (r * r == rem) return std::make_pair(s * r, f);
  if (rem < BigInt(1000000000000LL)) return std::make_pair(s, f * rem);
  return std::nullopt;
}

ExactExpr::ExactExpr(const Rational& q) {
  if (!q.is_zero()) terms_.push_back(Term{q, 1, {}});
}

ExactExpr::ExactExpr(Term t) {
  terms_.push_back(std::move(t));
  normalize();
}

ExactExpr ExactExpr::atom(Atom a) { return ExactExpr(Term{1, 1, {Factor{std::move(a), 1}}}); }

ExactExpr ExactExpr::pi() { return atom(Atom::constant("pi")); }

void ExactExpr::normalize() {
  if (terms_.size() <= 1) {
    if (!terms_.empty() && terms_[0].coef.is_zero()) terms_.clear();
    return;
  }
  std::sort(terms_.begin(), terms_.end(), key_less);
  Terms out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && same_key(out.back(), t))
      out.back().coef += t.coef;
    else
      out.push_back(std::move(t));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef.is_zero(); }), out.end());
  terms_ = std::move(out);
}

bool ExactExpr::is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].is_rational()); }

Rational ExactExpr::rational() const { return terms_.empty() ? Rational(0) : terms_[0].coef; }

bool ExactExpr::is_integer() const {
  return is_rational() && boost::multiprecision::denominator(rational()) == 1;
}

bool ExactExpr::is_ground() const {
  for (const auto& t : terms_)
    if (t.has_variables()) return false;
  return true;
}

bool ExactExpr::has_opaque() const {
  for (const auto& t : terms_)
    for (const auto& f : t.factors)
      if (f.atom.kind == Atom::Kind::Opaque) return true;
  return false;
}

void ExactExpr::collect_variables(std::vector<std::string>& out) const {
  for (const auto& t : terms_)
    for (const auto& f : t.factors) f.atom.collect_variables(out);
}

std::strong_ordering operator<=>(const ExactExpr& a, const ExactExpr& b) {
  return std::lexicographical_compare_three_way(
      a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end(), [](const Term& x, const Term& y) {
        if (key_less(x, y)) return std::strong_ordering::less;
        if (key_less(y, x)) return std::strong_ordering::greater;
        if (x.coef < y.coef) return std::strong_ordering::less;
        if (y.coef < x.coef) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
      });
}

bool ExactExpr::mentions(const std::string& var) const {
  for (const auto& t : terms_)
    if (t.mentions(var)) return true;
  return false;
}

long double ExactExpr::approx() const {
  long double sum = 0;
  for (const auto& t : terms_) {
    long double v = static_cast<long double>(t.coef);
    if (t.radicand != 1) v *= std::sqrt(static_cast<long double>(t.radicand));
    for (const auto& f : t.factors) {
      long double base;
      if (f.atom.kind == Atom::Kind::Constant && f.atom.name == "pi")
        base = 3.141592653589793238462643383279502884L;
      else if (f.atom.kind == Atom::Kind::Constant && f.atom.name == "euler_gamma")
        base = 0.577215664901532860606512090082402431L;
      else
        throw Error(Errc::EvalError, "no numeric value for " + f.atom.code(), {{"atom", f.atom.code()}});
      v *= std::pow(base, static_cast<long double>(f.exp.numerator()) / f.exp.denominator());
    }
    sum += v;
  }
  return sum;
}

ExactExpr ExactExpr::operator-() const {
  ExactExpr out = *this;
  for (auto& t : out.terms_) t.coef = -t.coef;
  return out;
}

ExactExpr operator+(const ExactExpr& a, const ExactExpr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  ExactExpr out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  out.terms_ = a.terms_;
  out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
  out.normalize();
  return out;
}

ExactExpr operator-(const ExactExpr& a, const ExactExpr& b) { return a + (-b); }

ExactExpr operator*(const ExactExpr& a, const ExactExpr& b) {
  ExactExpr out;
  if (a.is_zero() || b.is_zero()) return out;
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) out.terms_.push_back(multiply(x, y));
  out.normalize();
  return out;
}

std::optional<ExactExpr> ExactExpr::inverse() const {
  if (is_zero()) throw Error(Errc::DivisionByZero, "division by zero");
  if (terms_.size() != 1) return std::nullopt;
  const Term& t = terms_[0];
  Term inv;
  inv.coef = 1 / (t.coef * Rational(t.radicand));
  inv.radicand = t.radicand;
  for (const auto& f : t.factors) inv.factors.push_back(Factor{f.atom, -f.exp});
  return ExactExpr(std::move(inv));
}

std::optional<ExactExpr> ExactExpr::pow(long long k) const {
  if (k == 0) return ExactExpr(1);
  if (is_zero()) {
    if (k < 0) throw Error(Errc::DivisionByZero, "zero raised to a negative power");
    return ExactExpr();
  }
  if (k < 0) {
    auto inv = inverse();
    if (!inv) return std::nullopt;
    return inv->pow(-k);
  }
  if (terms_.size() == 1) {
    if (k > kMaxPower) return std::nullopt;
    const Term& t = terms_[0];
    Term out;
    out.coef = Rational(ipow(boost::multiprecision::numerator(t.coef), k),
                        ipow(boost::multiprecision::denominator(t.coef), k));
    if (t.radicand != 1) {
      out.coef *= Rational(ipow(t.radicand, k / 2));
      if (k % 2) out.radicand = t.radicand;
    }
    for (const auto& f : t.factors) out.factors.push_back(Factor{f.atom, f.exp * k});
    return ExactExpr(std::move(out));
  }
  if (k > kMaxSumPower) return std::nullopt;
  ExactExpr result(1), base = *this;
  for (long long e = k; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  return result;
}

std::optional<ExactExpr> ExactExpr::pow(const Rational& r) const {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) {
    auto k = small(num, kMaxPower);
    if (!k) {
      if (is_zero() && num > 0) return ExactExpr();
      if (*this == ExactExpr(1)) return ExactExpr(1);
      return std::nullopt;
    }
    return pow(*k);
  }
  if (is_zero()) {
    if (r < 0) throw Error(Errc::DivisionByZero, "zero raised to a negative power");
    return ExactExpr();
  }
  auto p = small(num, kMaxPower);
  auto q = small(den, kMaxRoot);
  if (!p || !q || terms_.size() != 1) return std::nullopt;
  const Term& t = terms_[0];
  if (t.radicand != 1 || t.coef < 0) return std::nullopt;
  ExactExpr base;
  auto rn = exact_root(boost::multiprecision::numerator(t.coef), *q);
  auto rd = exact_root(boost::multiprecision::denominator(t.coef), *q);
  if (rn && rd) {
    base = ExactExpr(Rational(*rn, *rd));
  } else if (*q == 2) {
    auto split = split_square(boost::multiprecision::numerator(t.coef) * boost::multiprecision::denominator(t.coef));
    if (!split) return std::nullopt;
    base = ExactExpr(Term{Rational(split->first, boost::multiprecision::denominator(t.coef)), split->second, {}});
  } else {
    return std::nullopt;
  }
  auto powered = base.pow(*p);
  if (!powered) return std::nullopt;
  Term rest{1, 1, {}};
  Exponent e(*p, *q);
  for (const auto& f : t.factors) rest.factors.push_back(Factor{f.atom, f.exp * e});
  return *powered * ExactExpr(std::move(rest));
}

std::optional<ExactExpr> ExactExpr::sqrt() const { return pow(Rational(1, 2)); }

namespace {

std::string rational_text(const Rational& q) {
  std::string s = boost::multiprecision::numerator(q).str();
  if (boost::multiprecision::denominator(q) != 1) s += "/" + boost::multiprecision::denominator(q).str();
  return s;
}

std::string exponent_text(const Exponent& e) {
  if (e.denominator() == 1) return std::to_string(e.numerator());
  return "(" + std::to_string(e.numerator()) + "/" + std::to_string(e.denominator()) + ")";
}

std::string wrap(const Atom& a, int min_prec) {
  return a.prec() >= min_prec ? a.code() : "(" + a.code() + ")";
}

// min_prec: 2 for the leading factor of a product, 3 after "*" or "/".
std::string factor_text(const Factor& f, int min_prec) {
  Exponent e = f.exp.numerator() < 0 ? -f.exp : f.exp;
  if (e == Exponent(1)) return wrap(f.atom, min_prec);
  if (e == Exponent(1, 2)) return "sqrt(" + f.atom.code() + ")";
  return wrap(f.atom, 4) + "^" + exponent_text(e);
}

// |t| in CAS syntax.
std::string term_text(const Term& t) {
  if (abs(t.coef) == 1 && t.radicand == 1 && t.factors.size() == 1 && t.factors[0].exp == Exponent(1))
    return t.factors[0].atom.code();
  Rational c = abs(t.coef);
  bool lead = c == 1 && t.radicand == 1;
  for (const auto& f : t.factors) lead = lead && f.exp.numerator() < 0;
  std::string out;
  if (c != 1 || lead) out = rational_text(c);
  if (t.radicand != 1) out += (out.empty() ? "" : "*") + std::string("sqrt(") + t.radicand.str() + ")";
  for (const auto& f : t.factors)
    if (f.exp.numerator() > 0) out += (out.empty() ? "" : "*") + factor_text(f, out.empty() ? 2 : 3);
  for (const auto& f : t.factors)
    if (f.exp.numerator() < 0) out += "/" + factor_text(f, 3);
  return out;
}

int group(const Term& t) { return t.has_variables() ? 0 : t.is_rational() ? 2 : 1; }

long long degree(const Term& t) {
  long long d = 0;
  for (const auto& f : t.factors)
    if (f.atom.kind == Atom::Kind::Variable) d += f.exp.numerator() / f.exp.denominator();
  return d;
}

}  // namespace

std::vector<Term> display_order(const ExactExpr& e) {
  std::vector<Term> ts(e.terms().begin(), e.terms().end());
  std::stable_sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) {
    if (group(a) != group(b)) return group(a) < group(b);
    if (group(a) == 0) {
      if (degree(a) != degree(b)) return degree(a) > degree(b);
      if (!(a.factors == b.factors)) {
        std::vector<Atom> va, vb;
        for (const auto& f : a.factors)
          if (f.atom.kind == Atom::Kind::Variable) va.push_back(f.atom);
        for (const auto& f : b.factors)
          if (f.atom.kind == Atom::Kind::Variable) vb.push_back(f.atom);
        if (va != vb) return va < vb;
      }
    }
    if ((a.radicand != 1) != (b.radicand != 1)) return a.radicand != 1;
    if (abs(a.coef) != abs(b.coef)) return abs(a.coef) > abs(b.coef);
    return key_less(a, b);
  });
  return ts;
}

std::string render_cas(const ExactExpr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : display_order(e)) {
    bool neg = t.coef < 0;
    if (first)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    out += term_text(t);
    first = false;
  }
  return out;
}

}  // namespace mgl
