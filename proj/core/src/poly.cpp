#include "hvcg/poly.hpp"

#include <sstream>

namespace hvcg {

std::string atom_key_var(const std::string& name) { return name; }
std::string atom_key_param(const std::string& name) { return "@" + name; }
std::string atom_key_time() { return "#time"; }

Poly Poly::constant(const Rational& c) {
  Poly p;
  p.add_term({}, c);
  return p;
}

Poly Poly::atom(const std::string& key, const Expr& expr) {
  Poly p;
  p.add_term({{key, 1u}}, Rational(1));
  p.atoms_.emplace(key, expr);
  return p;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Poly::merge_atoms(const Poly& o) {
  for (const auto& kv : o.atoms_) atoms_.insert(kv);
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

unsigned Poly::degree_in(const std::string& key) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) {
    auto it = m.find(key);
    if (it != m.end()) d = std::max(d, it->second);
  }
  return d;
}

bool Poly::has_transcendental() const {
  for (const auto& [key, e] : atoms_) {
    if (key.rfind("exp(", 0) == 0 || key.rfind("ln(", 0) == 0) {
      if (degree_in(key) > 0) return true;
    }
  }
  return false;
}

std::optional<std::pair<Poly, Poly>> Poly::linear_split(const std::string& key) const {
  if (degree_in(key) > 1) return std::nullopt;
  Poly coef, rest;
  for (const auto& [m, c] : terms_) {
    auto it = m.find(key);
    if (it == m.end()) {
      rest.add_term(m, c);
    } else {
      Monomial reduced = m;
      reduced.erase(key);
      coef.add_term(reduced, c);
    }
  }
  coef.atoms_ = atoms_;
  rest.atoms_ = atoms_;
  return std::make_pair(coef, rest);
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  r.merge_atoms(o);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const { return scaled(Rational(-1)); }

Poly Poly::scaled(const Rational& c) const {
  Poly r;
  r.atoms_ = atoms_;
  if (c == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : o.terms_) {
      Monomial m = m1;
      for (const auto& [k, e] : m2) m[k] += e;
      r.add_term(m, c1 * c2);
    }
  }
  r.atoms_ = atoms_;
  r.merge_atoms(o);
  return r;
}

Poly Poly::pow(unsigned n) const {
  Poly r = constant(1);
  r.atoms_ = atoms_;
  Poly base = *this;
  while (n) {
    if (n & 1u) r = r * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return r;
}

Monomial Poly::common_monomial() const {
  if (terms_.empty()) return {};
  Monomial common = terms_.begin()->first;
  for (const auto& [m, c] : terms_) {
    for (auto it = common.begin(); it != common.end();) {
      auto f = m.find(it->first);
      if (f == m.end()) {
        it = common.erase(it);
      } else {
        it->second = std::min(it->second, f->second);
        ++it;
      }
    }
  }
  return common;
}

Poly Poly::divide_monomial(const Monomial& d) const {
  Poly r;
  r.atoms_ = atoms_;
  for (const auto& [m, c] : terms_) {
    Monomial q = m;
    for (const auto& [k, e] : d) {
      auto it = q.find(k);
      if (it == q.end() || it->second < e) throw Error("monomial does not divide polynomial");
      it->second -= e;
      if (it->second == 0) q.erase(it);
    }
    r.add_term(q, c);
  }
  return r;
}

std::optional<Rational> Poly::ratio(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size() || b.terms_.empty()) return std::nullopt;
  std::optional<Rational> k;
  auto ia = a.terms_.begin();
  for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ib, ++ia) {
    if (ia->first != ib->first) return std::nullopt;
    Rational q = ia->second / ib->second;
    if (!k) k = q;
    else if (*k != q) return std::nullopt;
  }
  if (!k || *k <= 0) return std::nullopt;
  return k;
}

Expr Poly::to_expr() const {
  if (terms_.empty()) return Expr::constant(Rational(0));
  std::optional<Expr> sum;
  // Highest-degree terms first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    std::optional<Expr> prod;
    for (const auto& [key, e] : m) {
      auto at = atoms_.find(key);
      if (at == atoms_.end()) throw Error("unknown atom '" + key + "'");
      Expr f = e == 1 ? at->second : Expr::pow(at->second, e);
      prod = prod ? *prod * f : f;
    }
    Rational mag = c < 0 ? Rational(-c) : c;
    Expr term = !prod ? Expr::constant(mag) : (mag == 1 ? *prod : Expr::constant(mag) * *prod);
    if (!sum) sum = c < 0 ? -term : term;
    else sum = c < 0 ? *sum - term : *sum + term;
  }
  return *sum;
}

std::string Poly::canonical() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << format_rational(c);
    for (const auto& [key, e] : m) {
      os << "*" << key;
      if (e != 1) os << "^" << e;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

RatFunc make_rat(Poly num, Poly den) {
  if (num.is_zero()) return RatFunc{Poly(), Poly::constant(1)};
  if (den.is_constant()) {
    Rational d = den.constant_value();
    if (d == 0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero in normal form");
    return RatFunc{num.scaled(Rational(1) / d), Poly::constant(1)};
  }
  Monomial cn = num.common_monomial();
  Monomial cd = den.common_monomial();
  Monomial g;
  for (const auto& [k, e] : cn) {
    auto it = cd.find(k);
    if (it != cd.end()) g[k] = std::min(e, it->second);
  }
  if (!g.empty()) {
    num = num.divide_monomial(g);
    den = den.divide_monomial(g);
  }
  if (auto k = Poly::ratio(num, den)) return RatFunc{Poly::constant(*k), Poly::constant(1)};
  if (auto k = Poly::ratio(-num, den)) return RatFunc{Poly::constant(-*k), Poly::constant(1)};
  if (den.is_constant()) return make_rat(num, den);
  // Scale so the leading coefficient of the denominator is 1.
  Rational lead = den.terms().rbegin()->second;
  return RatFunc{num.scaled(Rational(1) / lead), den.scaled(Rational(1) / lead)};
}

RatFunc add(const RatFunc& a, const RatFunc& b) {
  if (a.den == b.den) return make_rat(a.num + b.num, a.den);
  return make_rat(a.num * b.den + b.num * a.den, a.den * b.den);
}

RatFunc mul(const RatFunc& a, const RatFunc& b) { return make_rat(a.num * b.num, a.den * b.den); }

RatFunc div(const RatFunc& a, const RatFunc& b) {
  if (b.num.is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero in normal form");
  return make_rat(a.num * b.den, a.den * b.num);
}

RatFunc neg(const RatFunc& a) { return RatFunc{-a.num, a.den}; }

RatFunc constant_rat(const Rational& c) { return RatFunc{Poly::constant(c), Poly::constant(1)}; }

} // namespace

Expr RatFunc::to_expr() const {
  if (den.is_constant()) return num.scaled(Rational(1) / den.constant_value()).to_expr();
  return num.to_expr() / den.to_expr();
}

std::string RatFunc::canonical() const {
  if (den.is_constant()) return num.canonical();
  return "(" + num.canonical() + ")/(" + den.canonical() + ")";
}

RatFunc normalize(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const: return constant_rat(e.value());
  case K::Var: return RatFunc{Poly::atom(atom_key_var(e.name()), e), Poly::constant(1)};
  case K::Param: return RatFunc{Poly::atom(atom_key_param(e.name()), e), Poly::constant(1)};
  case K::Time: return RatFunc{Poly::atom(atom_key_time(), e), Poly::constant(1)};
  case K::Add: return add(normalize(e.lhs()), normalize(e.rhs()));
  case K::Sub: return add(normalize(e.lhs()), neg(normalize(e.rhs())));
  case K::Mul: return mul(normalize(e.lhs()), normalize(e.rhs()));
  case K::Div: return div(normalize(e.lhs()), normalize(e.rhs()));
  case K::Neg: return neg(normalize(e.arg()));
  case K::Pow: {
    RatFunc b = normalize(e.lhs());
    return make_rat(b.num.pow(e.exponent()), b.den.pow(e.exponent()));
  }
  case K::Exp: {
    RatFunc a = normalize(e.arg());
    if (a.is_zero()) return constant_rat(Rational(1));
    std::string key = "exp(" + a.canonical() + ")";
    return RatFunc{Poly::atom(key, Expr::exp(a.to_expr())), Poly::constant(1)};
  }
  case K::Ln: {
    RatFunc a = normalize(e.arg());
    if (a.is_polynomial() && a.num.is_constant() && a.num.constant_value() == 1) return constant_rat(Rational(0));
    std::string key = "ln(" + a.canonical() + ")";
    return RatFunc{Poly::atom(key, Expr::ln(a.to_expr())), Poly::constant(1)};
  }
  }
  return constant_rat(Rational(0));
}

std::optional<Poly> poly_normalize(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const: return Poly::constant(e.value());
  case K::Var: return Poly::atom(atom_key_var(e.name()), e);
  case K::Param: return Poly::atom(atom_key_param(e.name()), e);
  case K::Time: return Poly::atom(atom_key_time(), e);
  case K::Add:
  case K::Sub:
  case K::Mul: {
    auto a = poly_normalize(e.lhs());
    auto b = poly_normalize(e.rhs());
    if (!a || !b) return std::nullopt;
    if (e.kind() == K::Add) return *a + *b;
    if (e.kind() == K::Sub) return *a - *b;
    return *a * *b;
  }
  case K::Div: {
    auto a = poly_normalize(e.lhs());
    auto b = poly_normalize(e.rhs());
    if (!a || !b || !b->is_constant() || b->constant_value() == 0) return std::nullopt;
    return a->scaled(Rational(1) / b->constant_value());
  }
  case K::Neg: {
    auto a = poly_normalize(e.arg());
    if (!a) return std::nullopt;
    return -*a;
  }
  case K::Pow: {
    auto a = poly_normalize(e.lhs());
    if (!a) return std::nullopt;
    return a->pow(e.exponent());
  }
  case K::Exp:
  case K::Ln: return std::nullopt;
  }
  return std::nullopt;
}

bool same_normal_form(const Expr& a, const Expr& b) {
  try {
    return normalize(a - b).is_zero();
  } catch (const EvalError&) {
    return false;
  }
}

} // namespace hvcg
