#pragma once

#include "hvcg/expr.hpp"
#include "hvcg/vc.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace hvcg {

enum class ProofStatus { Proved, Falsified, Unknown };

const char* to_string(ProofStatus s);

/// Concrete point refuting a VC. `time` is the flow time of an
/// evolution goal.
struct Counterexample {
  ExactValues vars;
  ExactValues params;
  std::optional<Rational> time;
};

struct ProofResult {
  ProofStatus status = ProofStatus::Unknown;
  std::string method;  // ring, interval, certificate, sampling
  std::optional<Counterexample> witness;
  long long splits = 0;
  std::string detail;
};

/// Proving box and budgets. Parameters listed in `instance` are fixed;
/// `bounds` restricts variables (and uninstantiated parameters).
struct ProverConfig {
  std::map<std::string, Rational> instance;
  std::map<std::string, std::pair<Rational, Rational>> bounds;
  long long budget = 100000;  // interval box splits per VC
  int samples = 10000;
  std::uint64_t seed = 1;
};

/// Sound, incomplete: ring normalization with hypothesis rewriting,
/// guard-history instantiation, interval branch-and-bound. Never
/// returns Falsified.
ProofResult prove(const VC& vc, const ProverConfig& config = {});

/// Randomized search for a counterexample; every reported witness is
/// re-checked rigorously against the original VC. Never returns Proved.
ProofResult falsify(const VC& vc, const ProverConfig& config = {});

/// prove, then falsify when unproved.
ProofResult discharge(const VC& vc, const ProverConfig& config = {});

/// Rigorous check that the witness satisfies every hypothesis and
/// violates the goal (with the whole guard history for evolution goals).
bool check_counterexample(const VC& vc, const Counterexample& cex, const ProverConfig& config = {});

} // namespace hvcg
