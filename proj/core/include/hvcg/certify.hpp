#pragma once

#include "hvcg/calculus.hpp"
#include "hvcg/expr.hpp"
#include "hvcg/vc.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hvcg {

struct CertifyContext {
  Pred assumptions;                             // parameter assumptions
  std::map<std::string, Rational> instance;     // parameter values for numeric checks and discharge
  std::uint64_t seed = 7;
  int numeric_points = 1000;
  /// Box for sampled Lipschitz constants of non-affine fields.
  std::map<std::string, std::pair<double, double>> lipschitz_box;
  /// Guard as a hypothesis of derivative obligations.
  bool guard_hypothesis = true;
};

enum class MatchStatus { Symbolic, Numeric, Failed };
enum class LipschitzStatus { SymbolicAffine, NumericSampled, Unchecked };

const char* to_string(MatchStatus s);
const char* to_string(LipschitzStatus s);

struct FlowCertificate {
  VectorField field;
  Flow flow;
  TimeDomain domain;
  MatchStatus derivative = MatchStatus::Failed;
  bool initial_condition = false;
  LipschitzStatus lipschitz = LipschitzStatus::Unchecked;
  std::optional<Expr> lipschitz_constant;  // symbolic L for affine fields
  std::optional<double> lipschitz_value;   // L at the instance, or the sampled bound
  std::vector<std::string> notes;

  bool certified() const { return derivative != MatchStatus::Failed && initial_condition; }
  std::string summary() const;
};

/// Flow certification: derivative match, initial condition, Lipschitz.
FlowCertificate certify_flow(const VectorField& f, const Flow& phi, const TimeDomain& U,
                             const CertifyContext& ctx = {});

/// Derivative obligations of one invariant atom.
struct AtomObligation {
  Pred atom;
  std::string rule;  // eq, less, leq, neq, trivial, unsupported
  std::vector<VC> obligations;
  std::string resolution = "pending";  // proved, unresolved, unsupported, pending
};

struct InvariantCertificate {
  Pred candidate;  // in negation normal form
  std::vector<AtomObligation> atoms;
  bool valid = false;
};

enum class TimeDirection { Forward, Backward };

/// Obligations for a single atom. Forward time is the only direction
/// reachable from domains starting at 0.
AtomObligation atom_obligations(const Pred& atom, const VectorField& f, const std::vector<Pred>& hyps,
                                TimeDirection dir = TimeDirection::Forward);

/// Splits the NNF of I with (h-inv-mult)/(h-inv-plus) and emits the
/// per-atom derivative obligations without resolving them.
std::vector<AtomObligation> dinv_obligations(const Pred& I, const VectorField& f, const Pred& G,
                                             const CertifyContext& ctx = {});

/// dinv_obligations plus discharge of every obligation.
InvariantCertificate diff_invariant(const Pred& I, const VectorField& f, const Pred& G, const TimeDomain& U,
                                    const CertifyContext& ctx = {});

/// Sign of a parameter from its assumptions (or instance value): +1, -1,
/// or 0 when unknown.
int parameter_sign(const std::string& name, const Pred& assumptions, const std::map<std::string, Rational>& instance);

} // namespace hvcg
