#pragma once

#include "hvcg/error.hpp"
#include "hvcg/rational.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hvcg {

/// Name of the distinguished flow-time symbol in concrete syntax.
inline constexpr const char* kTimeSymbol = "time";

struct ExprNode;

/// Symbolic real-valued term. Immutable; copies share structure.
///
/// Variables are program state (assignable), parameters are symbolic
/// constants that carry assumptions, and Time is the bound variable of
/// flows and evolution quantifiers.
class Expr {
public:
  enum class Kind { Const, Var, Param, Time, Add, Sub, Mul, Div, Neg, Pow, Exp, Ln };

  Expr();  // the constant 0

  static Expr constant(const Rational& value);
  static Expr constant(long long value) { return constant(Rational(value)); }
  static Expr var(const std::string& name);
  static Expr param(const std::string& name);
  static Expr time();
  static Expr pow(const Expr& base, unsigned exponent);
  static Expr exp(const Expr& arg);
  static Expr ln(const Expr& arg);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  Kind kind() const;
  const Rational& value() const;       // Const
  const std::string& name() const;     // Var, Param
  unsigned exponent() const;           // Pow
  const Expr& lhs() const;             // binary nodes, Pow base, unary argument
  const Expr& rhs() const;             // binary nodes
  const Expr& arg() const { return lhs(); }

  bool is_const() const { return kind() == Kind::Const; }
  bool is_const(long long v) const { return is_const() && value() == v; }

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  const void* identity() const { return node_.get(); }

private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

enum class Rel { Eq, Ne, Lt, Le, Gt, Ge };

Rel negate(Rel r);
/// Relation obtained by swapping operands: a < b  <=>  b > a.
Rel swap(Rel r);
const char* rel_symbol(Rel r);

/// Time domain [0, upper] or [0, inf) when upper is empty.
struct TimeDomain {
  std::optional<Expr> upper;

  bool bounded() const { return upper.has_value(); }
  friend bool operator==(const TimeDomain& a, const TimeDomain& b);
};

/// Closed-form flow: for each listed variable, its value after `time`
/// starting from the current state. Unlisted variables stay constant.
struct Flow {
  std::vector<std::pair<std::string, Expr>> bindings;

  const Expr* find(const std::string& var) const;
  /// The value of `var` along the flow (identity when unlisted).
  Expr at(const std::string& var) const;
  friend bool operator==(const Flow& a, const Flow& b) { return a.bindings == b.bindings; }
};

struct PredNode;

/// Quantifier-free formula over real atoms, plus the evolution
/// precondition form `after`, which denotes
///   forall t in U. (forall s in [0,t]. G(flow s)) -> Q(flow t).
class Pred {
public:
  enum class Kind { True, False, Atom, Not, And, Or, Implies, After };

  Pred();  // true

  static Pred truth();
  static Pred falsity();
  static Pred atom(Rel rel, const Expr& lhs, const Expr& rhs);
  static Pred negation(const Pred& p);
  static Pred conj(std::vector<Pred> parts);
  static Pred disj(std::vector<Pred> parts);
  static Pred implies(const Pred& a, const Pred& b);
  static Pred after(Flow flow, const Pred& guard, TimeDomain domain, const Pred& post);

  friend Pred operator&&(const Pred& a, const Pred& b) { return conj({a, b}); }
  friend Pred operator||(const Pred& a, const Pred& b) { return disj({a, b}); }
  friend Pred operator!(const Pred& a) { return negation(a); }

  Kind kind() const;
  Rel rel() const;                              // Atom
  const Expr& lhs() const;                      // Atom
  const Expr& rhs() const;                      // Atom
  const std::vector<Pred>& parts() const;       // Not (1), And, Or, Implies (2)
  const Flow& flow() const;                     // After
  const Pred& guard() const;                    // After
  const TimeDomain& domain() const;             // After
  const Pred& post() const;                     // After

  friend bool operator==(const Pred& a, const Pred& b);
  friend bool operator!=(const Pred& a, const Pred& b) { return !(a == b); }

  const void* identity() const { return node_.get(); }

private:
  explicit Pred(std::shared_ptr<const PredNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const PredNode> node_;
};

struct ExprNode {
  Expr::Kind kind;
  Rational value;
  std::string name;
  unsigned exponent = 0;
  std::vector<Expr> args;
};

struct PredNode {
  Pred::Kind kind;
  Rel rel = Rel::Eq;
  Expr lhs, rhs;
  std::vector<Pred> parts;
  Flow flow;
  TimeDomain domain;
};

// ---------------------------------------------------------------------------
// Valuations and evaluation

using Values = std::map<std::string, double>;
using ExactValues = std::map<std::string, Rational>;

struct Valuation {
  const Values* vars = nullptr;
  const Values* params = nullptr;
  double time = 0.0;
};

double eval(const Expr& e, const Valuation& v);
/// Throws EvalError for partial operations and for `after` (quantified).
bool eval(const Pred& p, const Valuation& v);

/// Exact evaluation. Returns nullopt when the term needs exp/ln of a
/// value other than 0/1. Division by zero throws.
std::optional<Rational> eval_exact(const Expr& e, const ExactValues& vars,
                                   const ExactValues& params,
                                   const std::optional<Rational>& time = std::nullopt);
/// Exact truth value, or nullopt when some atom is not exactly computable.
std::optional<bool> eval_exact(const Pred& p, const ExactValues& vars,
                               const ExactValues& params,
                               const std::optional<Rational>& time = std::nullopt);

// ---------------------------------------------------------------------------
// Substitution

struct Substitution {
  std::map<std::string, Expr> vars;
  std::map<std::string, Expr> params;
  std::optional<Expr> time;

  bool empty() const { return vars.empty() && params.empty() && !time; }
};

Expr substitute(const Expr& e, const Substitution& s);
/// Inside `after`, variables are substituted in the flow bodies only (the
/// guard and post are evaluated at flow states); time is bound there.
Pred substitute(const Pred& p, const Substitution& s);

// ---------------------------------------------------------------------------
// Queries

std::set<std::string> free_vars(const Expr& e);
std::set<std::string> free_vars(const Pred& p);
std::set<std::string> free_params(const Expr& e);
std::set<std::string> free_params(const Pred& p);
bool mentions_time(const Expr& e);
bool contains_after(const Pred& p);

/// Syntactic approximation of semantic non-dependence: `var` does not occur.
bool not_depends(const std::string& var, const Expr& e);
bool not_depends(const std::string& var, const Pred& p);

/// Negation normal form: negations pushed to atoms (flipping relations),
/// implications rewritten. Negated `after` nodes are kept as is.
Pred nnf(const Pred& p);

/// Top-level conjuncts (flattening nested conjunctions).
std::vector<Pred> conjuncts(const Pred& p);

std::string to_string(const Expr& e);
std::string to_string(const Pred& p);
std::ostream& operator<<(std::ostream& os, const Expr& e);
std::ostream& operator<<(std::ostream& os, const Pred& p);

} // namespace hvcg
