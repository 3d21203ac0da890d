#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/container/small_vector.hpp>
#include <boost/rational.hpp>
#include <compare>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mgl/tree.hpp"

namespace mgl {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using Exponent = boost::rational<long long>;

class Evaluator;
class ExactExpr;

/// Operation the evaluator could not fold, kept symbolically over its
/// simplified arguments. The tree and CAS code are built on first use.
class OpaqueTerm {
 public:
  OpaqueTerm(const Evaluator* ev, std::string ctor, std::optional<Tree> fn, std::vector<ExactExpr> args,
             int prec);

  const std::string& ctor() const { return ctor_; }
  /// Function argument of At.
  const std::optional<Tree>& fn() const { return fn_; }
  const std::vector<ExactExpr>& args() const { return args_; }
  /// Precedence of the CAS template of ctor.
  int prec() const { return prec_; }
  const std::vector<std::string>& variables() const { return variables_; }

  const Tree& tree() const;
  const std::string& code() const;

  friend std::strong_ordering operator<=>(const OpaqueTerm& a, const OpaqueTerm& b);

 private:
  const Evaluator* ev_;
  std::string ctor_;
  std::optional<Tree> fn_;
  std::vector<ExactExpr> args_;
  int prec_;
  std::vector<std::string> variables_;
  mutable std::once_flag tree_once_, code_once_;
  mutable std::optional<Tree> tree_;
  mutable std::string code_;
};

/// Symbolic factor of a term: a named constant, a free variable, or an
/// opaque subtree that could not be simplified.
struct Atom {
  enum class Kind { Constant, Variable, Opaque };

  Kind kind = Kind::Variable;
  std::string name;                           // Constant, Variable
  std::shared_ptr<const OpaqueTerm> opaque;  // Opaque

  static Atom constant(std::string name);
  static Atom variable(std::string name);

  /// CAS code of the factor.
  const std::string& code() const { return kind == Kind::Opaque ? opaque->code() : name; }
  /// Precedence of code(); names are atomic.
  int prec() const;
  bool has_variables() const;
  bool mentions(const std::string& var) const;

  /// Variables occurring in the atom.
  void collect_variables(std::vector<std::string>& out) const;

  friend bool operator==(const Atom& a, const Atom& b);
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

struct Factor {
  Atom atom;
  Exponent exp;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// coef * sqrt(radicand) * product of atom^exp, radicand squarefree.
struct Term {
  Rational coef;
  BigInt radicand = 1;
  boost::container::small_vector<Factor, 2> factors;  // sorted by atom, exponents non-zero

  bool is_rational() const { return radicand == 1 && factors.empty(); }
  bool has_variables() const;
  bool mentions(const std::string& var) const;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Exact value in normal form: a sum of terms with distinct radicand and
/// factor signatures. Ground values without opaque atoms compare decidably.
class ExactExpr {
 public:
  using Terms = boost::container::small_vector<Term, 2>;

  ExactExpr() = default;
  ExactExpr(long long v) : ExactExpr(Rational(v)) {}
  ExactExpr(const Rational& q);
  explicit ExactExpr(Term t);
  static ExactExpr atom(Atom a);
  static ExactExpr pi();

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  /// Rational value; requires is_rational().
  Rational rational() const;
  bool is_integer() const;
  /// No free variables (opaque atoms and constants allowed).
  bool is_ground() const;
  bool has_opaque() const;
  bool mentions(const std::string& var) const;
  void collect_variables(std::vector<std::string>& out) const;

  /// Numeric value of a ground expression without opaque atoms.
  long double approx() const;

  ExactExpr operator-() const;
  friend ExactExpr operator+(const ExactExpr& a, const ExactExpr& b);
  friend ExactExpr operator-(const ExactExpr& a, const ExactExpr& b);
  friend ExactExpr operator*(const ExactExpr& a, const ExactExpr& b);
  friend bool operator==(const ExactExpr& a, const ExactExpr& b) { return a.terms_ == b.terms_; }
  /// Total order on normal forms (structural, not numeric).
  friend std::strong_ordering operator<=>(const ExactExpr& a, const ExactExpr& b);

  /// Multiplicative inverse of a single non-zero term; nullopt for sums.
  /// Throws DivisionByZero on zero.
  std::optional<ExactExpr> inverse() const;
  /// Integer power; nullopt when the result would leave the normal form
  /// (negative powers of sums, very large exponents).
  std::optional<ExactExpr> pow(long long k) const;
  /// Rational power; nullopt when no exact normal form exists.
  std::optional<ExactExpr> pow(const Rational& r) const;
  /// Principal square root of a non-negative rational or monomial.
  std::optional<ExactExpr> sqrt() const;

 private:
  void normalize();
  Terms terms_;
};

/// Sage-style rendering: "4/3*sqrt(2) - 2/3", "x + y", "1/2*pi", "0".
/// Terms with variables come first, then irrational terms by descending
/// coefficient magnitude, then the rational constant.
std::string render_cas(const ExactExpr& e);

/// Terms in rendering order.
std::vector<Term> display_order(const ExactExpr& e);

/// m = s^2 * f with f squarefree; nullopt when m is too large to factor.
std::optional<std::pair<BigInt, BigInt>> split_square(const BigInt& m);

}  // namespace mgl
