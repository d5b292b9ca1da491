#include "hvcg/interval.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <limits>

namespace hvcg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class RoundingMode {
public:
  explicit RoundingMode(int mode) : saved_(std::fegetround()) { std::fesetround(mode); }
  ~RoundingMode() { std::fesetround(saved_); }
  RoundingMode(const RoundingMode&) = delete;
  RoundingMode& operator=(const RoundingMode&) = delete;

private:
  int saved_;
};

// Products with the 0 * inf = 0 convention.
double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  RoundingMode m(FE_DOWNWARD);
  return a * b;
}

double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  RoundingMode m(FE_UPWARD);
  return a * b;
}

double div_down(double a, double b) {
  if (a == 0.0) return 0.0;
  if (std::isinf(a) && std::isinf(b)) return -kInf;
  RoundingMode m(FE_DOWNWARD);
  return a / b;
}

double div_up(double a, double b) {
  if (a == 0.0) return 0.0;
  if (std::isinf(a) && std::isinf(b)) return kInf;
  RoundingMode m(FE_UPWARD);
  return a / b;
}

double down(double v) { return std::nextafter(v, -kInf); }
double up(double v) { return std::nextafter(v, kInf); }

} // namespace

Interval Interval::entire() { return {-kInf, kInf}; }

Interval Interval::enclose(const Rational& r) {
  double d = to_double(r);
  if (std::isfinite(d) && from_double(d) == r) return point(d);
  return {down(d), up(d)};
}

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

double Interval::width() const {
  if (!bounded()) return kInf;
  RoundingMode m(FE_UPWARD);
  return hi - lo;
}

double Interval::mid() const {
  if (lo == -kInf && hi == kInf) return 0.0;
  if (lo == -kInf) return hi >= 0 ? -1.0 - hi : 2.0 * hi - 1.0;
  if (hi == kInf) return lo <= 0 ? 1.0 - lo : 2.0 * lo + 1.0;
  return lo + (hi - lo) / 2.0;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval r;
  {
    RoundingMode m(FE_DOWNWARD);
    r.lo = a.lo + b.lo;
  }
  {
    RoundingMode m(FE_UPWARD);
    r.hi = a.hi + b.hi;
  }
  return r;
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval operator*(const Interval& a, const Interval& b) {
  double lo = std::min({mul_down(a.lo, b.lo), mul_down(a.lo, b.hi), mul_down(a.hi, b.lo), mul_down(a.hi, b.hi)});
  double hi = std::max({mul_up(a.lo, b.lo), mul_up(a.lo, b.hi), mul_up(a.hi, b.lo), mul_up(a.hi, b.hi)});
  return {lo, hi};
}

std::optional<Interval> divide(const Interval& a, const Interval& b) {
  if (b.contains_zero()) return std::nullopt;
  double lo = std::min({div_down(a.lo, b.lo), div_down(a.lo, b.hi), div_down(a.hi, b.lo), div_down(a.hi, b.hi)});
  double hi = std::max({div_up(a.lo, b.lo), div_up(a.lo, b.hi), div_up(a.hi, b.lo), div_up(a.hi, b.hi)});
  return Interval{lo, hi};
}

namespace {

// x^n for x >= 0 with rounding in the given direction.
double pow_nonneg(double x, unsigned n, bool upward) {
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r = upward ? mul_up(r, x) : mul_down(r, x);
  return r;
}

} // namespace

Interval ipow(const Interval& a, unsigned n) {
  if (n == 0) return Interval::point(1.0);
  if (a.lo >= 0) return {pow_nonneg(a.lo, n, false), pow_nonneg(a.hi, n, true)};
  if (a.hi <= 0) {
    Interval p{pow_nonneg(-a.hi, n, false), pow_nonneg(-a.lo, n, true)};
    return n % 2 == 0 ? p : -p;
  }
  // 0 in the interior
  double m = std::max(-a.lo, a.hi);
  if (n % 2 == 0) return {0.0, pow_nonneg(m, n, true)};
  return {-pow_nonneg(-a.lo, n, true), pow_nonneg(a.hi, n, true)};
}

Interval iexp(const Interval& a) {
  auto lower = [](double x) {
    if (x == 0.0) return 1.0;
    if (x == -kInf) return 0.0;
    return std::max(0.0, down(std::exp(x)));
  };
  auto upper = [](double x) {
    if (x == 0.0) return 1.0;
    if (x == kInf) return kInf;
    return up(std::exp(x));
  };
  return {lower(a.lo), upper(a.hi)};
}

std::optional<Interval> iln(const Interval& a) {
  if (!(a.lo > 0.0)) return std::nullopt;
  auto lower = [](double x) { return x == 1.0 ? 0.0 : down(std::log(x)); };
  auto upper = [](double x) {
    if (x == kInf) return kInf;
    return x == 1.0 ? 0.0 : up(std::log(x));
  };
  return Interval{lower(a.lo), upper(a.hi)};
}

Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (r.lo > r.hi) return std::nullopt;
  return r;
}

std::optional<Interval> eval_interval(const Expr& e, const Box& box) {
  using K = Expr::Kind;
  switch (e.kind()) {
  case K::Const: return Interval::enclose(e.value());
  case K::Var: {
    auto it = box.vars.find(e.name());
    return it == box.vars.end() ? Interval::entire() : it->second;
  }
  case K::Param: {
    auto it = box.params.find(e.name());
    return it == box.params.end() ? Interval::entire() : it->second;
  }
  case K::Time: return box.time ? *box.time : Interval{0.0, kInf};
  case K::Add:
  case K::Sub:
  case K::Mul:
  case K::Div: {
    auto a = eval_interval(e.lhs(), box);
    if (!a) return std::nullopt;
    auto b = eval_interval(e.rhs(), box);
    if (!b) return std::nullopt;
    if (e.kind() == K::Add) return *a + *b;
    if (e.kind() == K::Sub) return *a - *b;
    if (e.kind() == K::Mul) {
      // x * x is a square
      if (e.lhs() == e.rhs()) return ipow(*a, 2);
      return *a * *b;
    }
    return divide(*a, *b);
  }
  case K::Neg: {
    auto a = eval_interval(e.arg(), box);
    if (!a) return std::nullopt;
    return -*a;
  }
  case K::Pow: {
    auto a = eval_interval(e.lhs(), box);
    if (!a) return std::nullopt;
    return ipow(*a, e.exponent());
  }
  case K::Exp: {
    auto a = eval_interval(e.arg(), box);
    if (!a) return std::nullopt;
    return iexp(*a);
  }
  case K::Ln: {
    auto a = eval_interval(e.arg(), box);
    if (!a) return std::nullopt;
    return iln(*a);
  }
  }
  return std::nullopt;
}

Tri tri_not(Tri a) {
  if (a == Tri::True) return Tri::False;
  if (a == Tri::False) return Tri::True;
  return Tri::Unknown;
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Unknown;
}

Tri tri_or(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::False && b == Tri::False) return Tri::False;
  return Tri::Unknown;
}

Tri compare(Rel rel, const Interval& a, const Interval& b) {
  switch (rel) {
  case Rel::Lt:
    if (a.hi < b.lo) return Tri::True;
    if (a.lo >= b.hi) return Tri::False;
    return Tri::Unknown;
  case Rel::Le:
    if (a.hi <= b.lo) return Tri::True;
    if (a.lo > b.hi) return Tri::False;
    return Tri::Unknown;
  case Rel::Gt: return compare(Rel::Lt, b, a);
  case Rel::Ge: return compare(Rel::Le, b, a);
  case Rel::Eq:
    if (a.is_point() && b.is_point() && a.lo == b.lo) return Tri::True;
    if (a.hi < b.lo || b.hi < a.lo) return Tri::False;
    return Tri::Unknown;
  case Rel::Ne: return tri_not(compare(Rel::Eq, a, b));
  }
  return Tri::Unknown;
}

Tri eval_interval(const Pred& p, const Box& box) {
  using K = Pred::Kind;
  switch (p.kind()) {
  case K::True: return Tri::True;
  case K::False: return Tri::False;
  case K::Atom: {
    auto a = eval_interval(p.lhs(), box);
    auto b = eval_interval(p.rhs(), box);
    if (!a || !b) return Tri::Unknown;
    return compare(p.rel(), *a, *b);
  }
  case K::Not: return tri_not(eval_interval(p.parts()[0], box));
  case K::And: {
    Tri r = Tri::True;
    for (const auto& q : p.parts()) {
      r = tri_and(r, eval_interval(q, box));
      if (r == Tri::False) break;
    }
    return r;
  }
  case K::Or: {
    Tri r = Tri::False;
    for (const auto& q : p.parts()) {
      r = tri_or(r, eval_interval(q, box));
      if (r == Tri::True) break;
    }
    return r;
  }
  case K::Implies: return tri_or(tri_not(eval_interval(p.parts()[0], box)), eval_interval(p.parts()[1], box));
  case K::After: return Tri::Unknown;
  }
  return Tri::Unknown;
}

} // namespace hvcg
