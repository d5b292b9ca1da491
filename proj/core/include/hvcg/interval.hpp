#pragma once

#include "hvcg/expr.hpp"

#include <map>
#include <optional>
#include <string>

namespace hvcg {

/// Closed interval with double endpoints (possibly infinite), computed
/// with outward rounding. 0 * inf is taken as 0.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double v) { return {v, v}; }
  static Interval entire();
  static Interval enclose(const Rational& r);

  bool is_point() const { return lo == hi; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
  bool bounded() const;
  double width() const;
  double mid() const;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
/// nullopt when the divisor contains 0.
std::optional<Interval> divide(const Interval& a, const Interval& b);
Interval ipow(const Interval& a, unsigned n);
Interval iexp(const Interval& a);
/// nullopt unless the argument is strictly positive.
std::optional<Interval> iln(const Interval& a);
Interval hull(const Interval& a, const Interval& b);
std::optional<Interval> intersect(const Interval& a, const Interval& b);

/// Interval valuation of variables, parameters and time.
struct Box {
  std::map<std::string, Interval> vars;
  std::map<std::string, Interval> params;
  std::optional<Interval> time;
};

/// nullopt when some partial operation may be undefined on the box.
std::optional<Interval> eval_interval(const Expr& e, const Box& box);

enum class Tri { False, True, Unknown };

Tri tri_not(Tri a);
Tri tri_and(Tri a, Tri b);
Tri tri_or(Tri a, Tri b);

/// Three-valued truth over the box: True/False only when certain for
/// every point (and every atom is defined throughout).
Tri eval_interval(const Pred& p, const Box& box);
Tri compare(Rel rel, const Interval& a, const Interval& b);

} // namespace hvcg
