#include "hvcg/dynamics.hpp"

#include "hvcg/error.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace hvcg {

namespace {

// Sample count for [0, end] at step h; tolerates end being a rounded multiple of h.
long long sample_count(double end, double h) {
  if (end < 0) return 0;
  return static_cast<long long>(std::floor(end / h + 1e-9)) + 1;
}

void check_finite(const Store& s) {
  for (const auto& [k, v] : s.values())
    if (!std::isfinite(v)) throw EvalError(EvalError::Kind::Overflow, "state variable '" + k + "' is not finite");
}

} // namespace

double domain_end(const TimeDomain& U, const Store& s, const Values& params, double horizon, bool* truncated) {
  if (truncated) *truncated = false;
  if (!U.upper) {
    if (truncated) *truncated = true;
    return horizon;
  }
  double end = eval(*U.upper, Valuation{&s.values(), &params, 0.0});
  if (end > horizon) {
    if (truncated) *truncated = true;
    return horizon;
  }
  return end;
}

namespace {

// Guard read at a sampled state; undefined atoms count as false.
bool guard_holds(const Pred* guard, const Store& st, const Values& params);

// Both samplers stop right after the first sample at which `stop_unless`
// fails, so a guarded orbit does not walk to the horizon.
Trajectory integrate_until(const VectorField& f, const Store& s, const TimeDomain& U, double h, const Values& params,
                           double horizon, const Pred* stop_unless) {
  if (!(h > 0)) throw Error("integration step must be positive");
  Trajectory traj;
  traj.step = h;
  double end = domain_end(U, s, params, horizon, &traj.truncated);
  long long n = sample_count(end, h);

  std::vector<std::string> names;
  std::vector<Expr> rhs;
  for (const auto& [x, e] : f) {
    if (!s.declares(x)) throw EvalError(EvalError::Kind::Unbound, "field variable '" + x + "' is not declared");
    names.push_back(x);
    rhs.push_back(e);
  }
  const std::size_t dim = names.size();

  Values cur = s.values();
  auto deriv = [&](const Values& at) {
    std::vector<double> d(dim);
    Valuation val{&at, &params, 0.0};
    for (std::size_t i = 0; i < dim; ++i) d[i] = eval(rhs[i], val);
    return d;
  };
  auto shifted = [&](const Values& base, const std::vector<double>& k, double scale) {
    Values r = base;
    for (std::size_t i = 0; i < dim; ++i) r[names[i]] += scale * k[i];
    return r;
  };

  traj.samples.emplace_back(0.0, s);
  for (long long i = 1; i < n; ++i) {
    auto k1 = deriv(cur);
    auto k2 = deriv(shifted(cur, k1, h / 2));
    auto k3 = deriv(shifted(cur, k2, h / 2));
    auto k4 = deriv(shifted(cur, k3, h));
    for (std::size_t j = 0; j < dim; ++j) cur[names[j]] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    Store next(s.declared(), cur);
    check_finite(next);
    traj.samples.emplace_back(static_cast<double>(i) * h, std::move(next));
    if (stop_unless && !guard_holds(stop_unless, traj.samples.back().second, params)) break;
  }
  return traj;
}

Trajectory sample_flow_until(const Flow& flow, const Store& s, const TimeDomain& U, double h, const Values& params,
                             double horizon, const Pred* stop_unless) {
  if (!(h > 0)) throw Error("sampling step must be positive");
  Trajectory traj;
  traj.step = h;
  double end = domain_end(U, s, params, horizon, &traj.truncated);
  long long n = sample_count(end, h);
  for (long long i = 0; i < n; ++i) {
    double t = static_cast<double>(i) * h;
    Valuation val{&s.values(), &params, t};
    Store next = s;
    for (const auto& [x, e] : flow.bindings) next = next.put(x, eval(e, val));
    check_finite(next);
    traj.samples.emplace_back(t, std::move(next));
    if (stop_unless && !guard_holds(stop_unless, traj.samples.back().second, params)) break;
  }
  return traj;
}

bool guard_holds(const Pred* guard, const Store& st, const Values& params) { return holds(*guard, st, params); }

} // namespace

Trajectory integrate(const VectorField& f, const Store& s, const TimeDomain& U, double h, const Values& params,
                     double horizon) {
  return integrate_until(f, s, U, h, params, horizon, nullptr);
}

Trajectory sample_flow(const Flow& flow, const Store& s, const TimeDomain& U, double h, const Values& params,
                       double horizon) {
  return sample_flow_until(flow, s, U, h, params, horizon, nullptr);
}

bool holds(const Pred& p, const Store& s, const Values& params, double time) {
  try {
    return eval(p, Valuation{&s.values(), &params, time});
  } catch (const EvalError& e) {
    if (e.kind() == EvalError::Kind::DivisionByZero || e.kind() == EvalError::Kind::LnDomain) return false;
    throw;
  }
}

OrbitSample guarded_orbit(const Program& evolution, const Store& s, const Values& params, const SimConfig& config) {
  Trajectory traj;
  const Pred* guard = nullptr;
  if (evolution.kind() == Program::Kind::Ode) {
    const OdeSpec& o = evolution.ode_spec();
    traj = integrate_until(o.vector_field(), s, o.domain, config.step, params, config.horizon, &o.guard);
    guard = &o.guard;
  } else if (evolution.kind() == Program::Kind::Evol) {
    const EvolSpec& e = evolution.evol_spec();
    traj = sample_flow_until(e.flow, s, e.domain, config.step, params, config.horizon, &e.guard);
    guard = &e.guard;
  } else {
    throw Error("guarded_orbit expects an evolution command");
  }
  OrbitSample out;
  out.origin = s;
  out.truncated = traj.truncated;
  for (auto& [t, st] : traj.samples) {
    if (!holds(*guard, st, params)) {
      out.guard_failure = t;
      break;
    }
    out.reachable.emplace_back(t, std::move(st));
  }
  return out;
}

namespace {

struct Interpreter {
  std::mt19937_64& rng;
  int star_bound;
  const Values& params;
  const SimConfig& config;
  int steps = 0;
  Trajectory trace;
  double clock = 0.0;

  void record(const Store& s) {
    if (config.record) trace.samples.emplace_back(clock, s);
  }

  // nullopt marks an infeasible run
  std::optional<Store> run(const Program& p, const Store& s) {
    ++steps;
    using K = Program::Kind;
    switch (p.kind()) {
    case K::Assign: {
      Store out = update_apply(p.update(), s, params);
      record(out);
      return out;
    }
    case K::Test: return holds(p.pred(), s, params) ? std::optional<Store>(s) : std::nullopt;
    case K::Assert: return s;
    case K::Seq: {
      std::optional<Store> cur = s;
      for (const auto& c : p.children()) {
        cur = run(c, *cur);
        if (!cur) return std::nullopt;
      }
      return cur;
    }
    case K::Choice: {
      std::uniform_int_distribution<std::size_t> pick(0, p.children().size() - 1);
      return run(p.children()[pick(rng)], s);
    }
    case K::Star:
    case K::Loop: {
      std::uniform_int_distribution<int> count(0, star_bound);
      int n = count(rng);
      std::optional<Store> cur = s;
      for (int i = 0; i < n && cur; ++i) cur = run(p.children()[0], *cur);
      return cur;
    }
    case K::If: return run(holds(p.pred(), s, params) ? p.children()[0] : p.children()[1], s);
    case K::While: {
      std::optional<Store> cur = s;
      for (int i = 0; cur && holds(p.pred(), *cur, params); ++i) {
        if (i >= 100000) return std::nullopt;  // treated as divergent
        cur = run(p.children()[0], *cur);
      }
      return cur;
    }
    case K::Ode:
    case K::Evol: {
      OrbitSample orbit = guarded_orbit(p, s, params, config);
      if (orbit.reachable.empty()) return std::nullopt;
      std::uniform_int_distribution<std::size_t> pick(0, orbit.reachable.size() - 1);
      std::size_t k = pick(rng);
      if (config.record)
        for (std::size_t i = 1; i <= k; ++i) trace.samples.emplace_back(clock + orbit.reachable[i].first, orbit.reachable[i].second);
      clock += orbit.reachable[k].first;
      return orbit.reachable[k].second;
    }
    case K::Spec: throw Error("specification statements are not executable");
    }
    return std::nullopt;
  }
};

} // namespace

RunResult interpret(const Program& prog, const Store& s, std::mt19937_64& rng, int star_bound, const Values& params,
                    const SimConfig& config) {
  if (star_bound < 0) throw Error("star bound must be non-negative");
  Interpreter in{rng, star_bound, params, config, 0, {}, 0.0};
  in.trace.step = config.step;
  in.record(s);
  auto out = in.run(prog, s);
  RunResult r;
  r.steps = in.steps;
  r.trace = std::move(in.trace);
  r.feasible = out.has_value();
  r.final = out ? *out : s;
  return r;
}

std::string to_csv(const Trajectory& t) {
  std::ostringstream os;
  os.precision(17);
  os << "time";
  std::vector<std::string> names;
  if (!t.samples.empty()) names = t.samples.front().second.declared();
  for (const auto& n : names) os << "," << n;
  os << "\n";
  for (const auto& [time, s] : t.samples) {
    os << time;
    for (const auto& n : names) os << "," << s.get(n);
    os << "\n";
  }
  return os.str();
}

namespace {

struct FiniteModel {
  const std::vector<Store>& states;
  const Values& params;
  kat::FinSpace space;

  int index_of(const Store& s) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == s) return static_cast<int>(i);
    throw Error("successor state outside the enumerated finite space");
  }

  kat::FinTest test(const Pred& p) const {
    kat::FinTest t{space, 0};
    for (int i = 0; i < space.size; ++i)
      if (holds(p, states[i], params)) t.member |= kat::StateSet{1} << i;
    return t;
  }

  kat::FinTransformer sem(const Program& p) const {
    using K = Program::Kind;
    switch (p.kind()) {
    case K::Assign: {
      kat::FinTransformer f = kat::zero(space);
      for (int i = 0; i < space.size; ++i)
        f.image[i] = kat::StateSet{1} << index_of(update_apply(p.update(), states[i], params));
      return f;
    }
    case K::Test: return kat::as_transformer(test(p.pred()));
    case K::Assert: return kat::unit(space);
    case K::Seq: {
      kat::FinTransformer f = kat::unit(space);
      for (const auto& c : p.children()) f = kat::kleisli_compose(f, sem(c));
      return f;
    }
    case K::Choice: {
      kat::FinTransformer f = kat::zero(space);
      for (const auto& c : p.children()) f = kat::choice(f, sem(c));
      return f;
    }
    case K::Star:
    case K::Loop: return kat::star(sem(p.children()[0]));
    case K::If: return kat::if_then_else(test(p.pred()), sem(p.children()[0]), sem(p.children()[1]));
    case K::While: return kat::while_do(test(p.pred()), sem(p.children()[0]));
    case K::Spec: return kat::spec_statement(test(p.pre()), test(p.post()));
    case K::Ode:
    case K::Evol: throw Error("finite semantics covers discrete programs only");
    }
    throw Error("unreachable program kind");
  }
};

} // namespace

kat::FinTransformer finite_semantics(const Program& prog, const std::vector<Store>& states, const Values& params) {
  if (states.empty() || states.size() > static_cast<std::size_t>(kat::kMaxStates))
    throw Error("finite state list must have 1..16 entries");
  FiniteModel m{states, params, kat::FinSpace{static_cast<int>(states.size())}};
  return m.sem(prog);
}

kat::FinTest finite_test(const Pred& p, const std::vector<Store>& states, const Values& params) {
  if (states.empty() || states.size() > static_cast<std::size_t>(kat::kMaxStates))
    throw Error("finite state list must have 1..16 entries");
  FiniteModel m{states, params, kat::FinSpace{static_cast<int>(states.size())}};
  return m.test(p);
}

} // namespace hvcg
