#pragma once

#include "hvcg/certify.hpp"
#include "hvcg/program.hpp"
#include "hvcg/vc.hpp"

#include <string>
#include <vector>

namespace hvcg {

/// Collects VCs during a backward traversal. Parameter assumptions are
/// prepended to every emitted VC.
class VcSink {
public:
  explicit VcSink(Pred assumptions = Pred::truth(), CertifyContext ctx = {});

  /// Emits hyps ⊢ goal. Goals with several evolution preconditions are
  /// split so each evolution gets its own VC.
  void emit(std::vector<Pred> hyps, const Pred& goal, const std::string& origin);
  void emit_certificate(const FlowCertificate& cert, const std::string& origin);

  const Pred& assumptions() const { return assumptions_; }
  const CertifyContext& context() const { return ctx_; }
  std::vector<VC>& vcs() { return vcs_; }

private:
  void split(std::vector<Pred> hyps, const Pred& goal, const std::string& origin);

  Pred assumptions_;
  CertifyContext ctx_;
  std::vector<VC> vcs_;
};

/// Weakest precondition of post under prog; side obligations (loop
/// invariants, midpoints, flow certificates, differential invariants)
/// are emitted into the sink. Throws AnnotationError for missing
/// invariants or evolution annotations.
Pred weakest_pre(const Program& prog, const Pred& post, VcSink& sink);

/// VCs of {pre} prog {post}: the entry VC pre ⊢ wp first, then side
/// obligations in emission order. Ids are vc1, vc2, ...
std::vector<VC> generate(const HoareGoal& goal, const Pred& assumptions = Pred::truth(),
                         const CertifyContext& ctx = {});

} // namespace hvcg
