#pragma once

#include "hvcg/calculus.hpp"
#include "hvcg/kat.hpp"
#include "hvcg/program.hpp"
#include "hvcg/store.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hvcg {

/// Samples (time, state) at times i*h, strictly increasing from 0.
struct Trajectory {
  double step = 0.0;
  std::vector<std::pair<double, Store>> samples;
  bool truncated = false;  // unbounded domain cut at the horizon
};

struct SimConfig {
  double step = 1e-3;
  double horizon = 100.0;
  /// Record the visited states of interpret() in RunResult::trace.
  bool record = false;
};

/// Upper end of a time domain at state s (the horizon when unbounded).
double domain_end(const TimeDomain& U, const Store& s, const Values& params, double horizon, bool* truncated = nullptr);

/// Classical RK4 over the field's variables; other variables stay put.
/// Throws EvalError(Overflow) when the state stops being finite.
Trajectory integrate(const VectorField& f, const Store& s, const TimeDomain& U, double h,
                     const Values& params = {}, double horizon = 100.0);

/// Closed-form flow sampled at the same time grid.
Trajectory sample_flow(const Flow& flow, const Store& s, const TimeDomain& U, double h,
                       const Values& params = {}, double horizon = 100.0);

struct OrbitSample {
  Store origin;
  /// States whose whole sampled guard history holds.
  std::vector<std::pair<double, Store>> reachable;
  /// First sampled time at which the guard failed (or was undefined).
  std::optional<double> guard_failure;
  bool truncated = false;
};

/// Guarded orbit of an Ode (integrated) or Evol (flow evaluated) node.
OrbitSample guarded_orbit(const Program& evolution, const Store& s, const Values& params = {},
                          const SimConfig& config = {});

/// Guard truth with undefined atoms read as false.
bool holds(const Pred& p, const Store& s, const Values& params, double time = 0.0);

struct RunResult {
  bool feasible = true;
  Store final;
  int steps = 0;
  /// Hybrid time trajectory: flow samples up to the chosen exit time and
  /// the state after every discrete step, against accumulated flow time.
  Trajectory trace;
};

/// One random execution. Tests that fail make the run infeasible.
RunResult interpret(const Program& prog, const Store& s, std::mt19937_64& rng, int star_bound,
                    const Values& params = {}, const SimConfig& config = {});

/// CSV with header `time,v1,v2,...` in declaration order.
std::string to_csv(const Trajectory& t);

/// Exact finite semantics of a discrete program (assignments, tests,
/// choice, star, and their sugar) over an enumerated state list.
/// Throws Error when a successor falls outside the enumeration or the
/// program has continuous parts.
kat::FinTransformer finite_semantics(const Program& prog, const std::vector<Store>& states,
                                     const Values& params = {});
kat::FinTest finite_test(const Pred& p, const std::vector<Store>& states, const Values& params = {});

} // namespace hvcg
