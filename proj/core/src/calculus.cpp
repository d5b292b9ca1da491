#include "hvcg/calculus.hpp"

namespace hvcg {

namespace {

bool is_zero(const Expr& e) { return e.is_const() && e.value() == 0; }
bool is_one(const Expr& e) { return e.is_const() && e.value() == 1; }

Expr s_add(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(Rational(a.value() + b.value()));
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  if (b.kind() == Expr::Kind::Neg) return a - b.arg();
  return a + b;
}

Expr s_sub(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(Rational(a.value() - b.value()));
  if (is_zero(b)) return a;
  if (is_zero(a)) return b.kind() == Expr::Kind::Neg ? b.arg() : -b;
  if (b.kind() == Expr::Kind::Neg) return a + b.arg();
  return a - b;
}

Expr s_neg(const Expr& a) {
  if (a.is_const()) return Expr::constant(Rational(-a.value()));
  if (a.kind() == Expr::Kind::Neg) return a.arg();
  return -a;
}

Expr s_mul(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(Rational(a.value() * b.value()));
  if (is_zero(a) || is_zero(b)) return Expr::constant(0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  if (a.is_const(-1)) return s_neg(b);
  if (b.is_const(-1)) return s_neg(a);
  if (a.kind() == Expr::Kind::Neg) return s_neg(s_mul(a.arg(), b));
  if (b.kind() == Expr::Kind::Neg) return s_neg(s_mul(a, b.arg()));
  return a * b;
}

Expr s_div(const Expr& a, const Expr& b) {
  if (b.is_const() && b.value() != 0) {
    if (a.is_const()) return Expr::constant(Rational(a.value() / b.value()));
    if (is_one(b)) return a;
  }
  if (is_zero(a) && b.is_const() && b.value() != 0) return a;
  return a / b;
}

Expr s_pow(const Expr& a, unsigned n) {
  if (n == 0) return Expr::constant(1);
  if (n == 1) return a;
  if (a.is_const()) {
    Rational r = 1;
    for (unsigned i = 0; i < n; ++i) r *= a.value();
    return Expr::constant(r);
  }
  return Expr::pow(a, n);
}

} // namespace

Expr simplify(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const:
  case K::Var:
  case K::Param:
  case K::Time: return e;
  case K::Add: return s_add(simplify(e.lhs()), simplify(e.rhs()));
  case K::Sub: return s_sub(simplify(e.lhs()), simplify(e.rhs()));
  case K::Mul: return s_mul(simplify(e.lhs()), simplify(e.rhs()));
  case K::Div: return s_div(simplify(e.lhs()), simplify(e.rhs()));
  case K::Neg: return s_neg(simplify(e.arg()));
  case K::Pow: return s_pow(simplify(e.lhs()), e.exponent());
  case K::Exp: {
    Expr a = simplify(e.arg());
    if (is_zero(a)) return Expr::constant(1);
    return Expr::exp(a);
  }
  case K::Ln: {
    Expr a = simplify(e.arg());
    if (is_one(a)) return Expr::constant(0);
    return Expr::ln(a);
  }
  }
  return e;
}

namespace {

// leaf(e) gives the derivative of a leaf node.
template <typename Leaf>
Expr derive(const Expr& e, const Leaf& leaf) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const:
  case K::Var:
  case K::Param:
  case K::Time: return leaf(e);
  case K::Add: return s_add(derive(e.lhs(), leaf), derive(e.rhs(), leaf));
  case K::Sub: return s_sub(derive(e.lhs(), leaf), derive(e.rhs(), leaf));
  case K::Mul:
    return s_add(s_mul(derive(e.lhs(), leaf), e.rhs()), s_mul(e.lhs(), derive(e.rhs(), leaf)));
  case K::Div: {
    // (u/v)' = (u'v - uv') / v^2
    Expr du = derive(e.lhs(), leaf);
    Expr dv = derive(e.rhs(), leaf);
    if (is_zero(dv)) return s_div(du, e.rhs());
    return s_div(s_sub(s_mul(du, e.rhs()), s_mul(e.lhs(), dv)), s_pow(e.rhs(), 2));
  }
  case K::Neg: return s_neg(derive(e.arg(), leaf));
  case K::Pow: {
    unsigned n = e.exponent();
    if (n == 0) return Expr::constant(0);
    Expr db = derive(e.lhs(), leaf);
    return s_mul(s_mul(Expr::constant(static_cast<long long>(n)), s_pow(e.lhs(), n - 1)), db);
  }
  case K::Exp: return s_mul(e, derive(e.arg(), leaf));
  case K::Ln: return s_div(derive(e.arg(), leaf), e.arg());
  }
  return Expr::constant(0);
}

} // namespace

Expr differentiate(const Expr& e, const std::string& var) {
  return derive(e, [&](const Expr& l) {
    return Expr::constant(l.kind() == Expr::Kind::Var && l.name() == var ? 1 : 0);
  });
}

Expr differentiate_time(const Expr& e) {
  return derive(e, [](const Expr& l) { return Expr::constant(l.kind() == Expr::Kind::Time ? 1 : 0); });
}

Expr lie_derivative(const Expr& mu, const VectorField& f) {
  Expr sum = Expr::constant(0);
  for (const auto& v : free_vars(mu)) {
    auto it = f.find(v);
    if (it == f.end()) continue;
    sum = s_add(sum, s_mul(differentiate(mu, v), it->second));
  }
  return simplify(sum);
}

} // namespace hvcg
