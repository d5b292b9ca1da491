#pragma once

#include "hvcg/expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hvcg {

/// Arithmetic proof obligation: hypotheses ⊢ goal. Evolution VCs carry
/// an `after` subformula in the goal; its time binder and guard history
/// are part of that node. Flow-certificate VCs have no arithmetic content
/// and are settled by certify.
struct VC {
  std::string id;
  std::string origin;
  std::vector<Pred> hypotheses;
  Pred goal;

  bool is_certificate = false;
  bool certificate_ok = false;
  std::string certificate_detail;
};

/// Description of the time binder of an evolution VC: the first `after`
/// node found in the goal.
struct TimeBinder {
  TimeDomain domain;
  Pred guard_history;  // guard evaluated along the flow at every tau <= t
};

std::optional<TimeBinder> time_binder(const VC& vc);

} // namespace hvcg
