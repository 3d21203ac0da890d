#pragma once

#include <map>
#include <string>

#include "mgl/exact.hpp"
#include "mgl/parser.hpp"

namespace mgl {

using Bindings = std::map<std::string, ExactExpr>;

/// Built-in exact evaluator for ValNum trees. Subtrees without a normal
/// form become opaque atoms carrying their CAS code, so nothing is ever
/// approximated.
class Evaluator {
 public:
  /// `cas` is the CAS-syntax concrete grammar; it must outlive the evaluator.
  explicit Evaluator(const ConcreteGrammar& cas);

  /// Substitutes bindings and folds exact arithmetic. Throws
  /// DivisionByZero, UnsupportedExpression, and the summation and
  /// integration errors.
  ExactExpr simplify(const Tree& e, const Bindings& bindings = {}) const;

  /// Sum of `body` for `var` = lo..hi by iterated substitution. Throws
  /// NonGroundBound, UnboundBodyVariable.
  ExactExpr sum_range(const Tree& body, const std::string& var, const ExactExpr& lo, const ExactExpr& hi,
                      const Bindings& bindings = {}) const;

  /// Exact definite integral of cos, sin, or a lambda whose body is a
  /// combination of powers v^(p/q), q in {1, 2}, p/q != -1. Throws
  /// UnsupportedIntegrand, UnboundedInterval.
  ExactExpr integrate_definite(const Tree& f, const Tree& interval, const Bindings& bindings = {}) const;

  /// ValNum tree whose simplification is `e` (operator-style shape).
  Tree to_tree(const ExactExpr& e) const;

  /// CAS syntax of a tree.
  std::string code(const Tree& t) const;

  /// Reads CAS syntax back into a tree ("-2/3" is read as "0 - 2/3").
  /// Throws UnknownToken, NoParse.
  Tree parse_cas(const std::string& text, const Category& cat = "ValNum") const;

  const ConcreteGrammar& grammar() const { return cas_; }

 private:
  struct Scope;
  ExactExpr eval(const Tree& t, Scope& s) const;
  ExactExpr sum(const Tree& body, const std::string& var, const ExactExpr& lo, const ExactExpr& hi, Scope& s) const;
  ExactExpr integrate(const Tree& f, const Tree& interval, Scope& s) const;
  ExactExpr opaque(std::string ctor, std::optional<Tree> fn, std::vector<ExactExpr> args) const;
  ExactExpr apply(const std::string& fn, const ExactExpr& arg) const;

  const ConcreteGrammar& cas_;
  CompiledGrammar cfg_;
};

}  // namespace mgl
