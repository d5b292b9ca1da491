#pragma once

#include "hvcg/expr.hpp"

#include <map>
#include <optional>
#include <string>

namespace hvcg {

/// Power product over atom keys. Keys encode the atom class:
/// "x" variable, "@g" parameter, "#time" the time symbol, and
/// "exp(...)" / "ln(...)" opaque transcendental atoms.
using Monomial = std::map<std::string, unsigned>;

/// Multivariate polynomial with rational coefficients in a canonical
/// sorted representation. Zero coefficients are never stored.
class Poly {
public:
  Poly() = default;
  static Poly constant(const Rational& c);
  static Poly atom(const std::string& key, const Expr& expr);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  const std::map<std::string, Expr>& atoms() const { return atoms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // coefficient of the empty monomial
  unsigned degree_in(const std::string& key) const;
  bool mentions(const std::string& key) const { return degree_in(key) > 0; }
  /// Keys of the transcendental atoms (exp/ln) occurring in this polynomial.
  bool has_transcendental() const;

  /// Splits p = c·key + r when p has degree <= 1 in key.
  std::optional<std::pair<Poly, Poly>> linear_split(const std::string& key) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(const Rational& c) const;
  Poly pow(unsigned n) const;

  /// Monomial that divides every term (componentwise minimum exponent).
  Monomial common_monomial() const;
  Poly divide_monomial(const Monomial& m) const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Positive c with a == c·b, if any.
  static std::optional<Rational> ratio(const Poly& a, const Poly& b);

  Expr to_expr() const;
  std::string canonical() const;

private:
  std::map<Monomial, Rational> terms_;
  std::map<std::string, Expr> atoms_;

  void add_term(const Monomial& m, const Rational& c);
  void merge_atoms(const Poly& o);
};

/// Quotient of polynomials; the generalized normal form used by the
/// equality checks in certify and the ring step of discharge.
struct RatFunc {
  Poly num;
  Poly den = Poly::constant(1);

  bool is_zero() const { return num.is_zero(); }
  bool is_polynomial() const { return den.is_constant(); }
  Expr to_expr() const;
  std::string canonical() const;
};

/// Normal form of an arbitrary expression. exp(0) and ln(1) fold;
/// other exp/ln applications become atoms keyed by the canonical text
/// of their normalized argument. Never fails: division by a polynomial
/// yields a proper fraction (definedness is the caller's concern).
RatFunc normalize(const Expr& e);

/// Strict polynomial normal form; nullopt when exp, ln, or division by
/// a non-constant (or zero) term occurs.
std::optional<Poly> poly_normalize(const Expr& e);

/// a and b have the same normal form (decides equality of polynomials;
/// sound, incomplete beyond that).
bool same_normal_form(const Expr& a, const Expr& b);

std::string atom_key_var(const std::string& name);
std::string atom_key_param(const std::string& name);
std::string atom_key_time();

} // namespace hvcg
