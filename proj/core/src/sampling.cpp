#include "hvcg/sampling.hpp"

#include "reasoning.hpp"

#include <cmath>

namespace hvcg {

std::optional<ExactValues> sample_satisfying(const Pred& p, const std::vector<std::string>& vars,
                                             const ExactValues& params, std::mt19937_64& rng,
                                             const std::map<std::string, std::pair<Rational, Rational>>& bounds,
                                             int attempts) {
  Substitution s;
  for (const auto& [k, v] : params) s.params[k] = Expr::constant(v);
  Pred inst = s.empty() ? p : substitute(p, s);
  detail::Problem base;
  detail::assume(base, inst);
  base.goal = Pred::truth();

  const double scales[] = {1.0, 10.0, 1000.0};
  int used = 0;
  while (used < attempts) {
    // pick one disjunct per disjunctive hypothesis, at random
    detail::Problem q = base;
    for (int depth = 0; depth < 16; ++depth) {
      detail::simplify(q);
      if (q.contradiction || q.ors.empty()) break;
      Pred o = q.ors.front();
      q.ors.erase(q.ors.begin());
      const auto& ds = o.parts();
      detail::assume(q, ds[std::uniform_int_distribution<std::size_t>(0, ds.size() - 1)(rng)]);
    }
    if (q.contradiction) {
      used += 64;
      continue;
    }
    Box box = detail::initial_box(q, bounds);
    for (const auto& v : vars)
      if (!box.vars.count(v)) box.vars[v] = bounds.count(v) ? Interval{to_double(bounds.at(v).first), to_double(bounds.at(v).second)} : Interval::entire();
    if (!detail::contract(box, q.atoms)) {
      used += 64;
      continue;
    }
    auto keys = detail::box_keys(box);
    for (int i = 0; i < 64 && used < attempts; ++i, ++used) {
      double scale = scales[std::uniform_int_distribution<int>(0, 2)(rng)];
      ExactValues point;
      bool ok = true;
      for (const auto& key : keys) {
        if (key[0] == '@' || key[0] == '#') continue;
        const Interval& iv = *detail::slot(box, key);
        auto v = detail::grid_sample(iv, scale, rng);
        if (!v) v = detail::grid_sample(iv, 1000.0, rng);
        if (!v && std::isfinite(iv.lo)) v = from_double(iv.lo);
        if (!v) {
          ok = false;
          break;
        }
        point[key] = *v;
      }
      if (!ok || !detail::reconstruct(q.eliminated, point, params, std::nullopt)) continue;
      if (detail::tri_eval(p, detail::point_box(point, params, std::nullopt), std::nullopt) != Tri::True) continue;
      ExactValues out;
      for (const auto& v : vars) out[v] = point.count(v) ? point.at(v) : Rational(0);
      return out;
    }
  }
  return std::nullopt;
}

} // namespace hvcg
