#pragma once

#include "hvcg/certify.hpp"
#include "hvcg/error.hpp"
#include "hvcg/parser.hpp"
#include "hvcg/program.hpp"
#include "hvcg/vc.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hvcg {

/// A law application failed to match, or replay did not reach the target.
class RefinementError : public Error {
public:
  RefinementError(const std::string& msg, int line) : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// Laws of the catalog, by script name.
const std::vector<std::string>& refinement_laws();

/// One script line: `step <law> at <path> [with <witness>]`. The witness
/// is kept as text and parsed against the model scope when applied.
struct RefinementStep {
  std::string law;
  std::vector<std::size_t> path;  // empty = root
  std::string witness;
  int line = 0;
};

struct RefinementScript {
  std::vector<RefinementStep> steps;
};

/// Parses a script. `let NAME = text` lines define whole-word macros
/// expanded textually in later lines; `//` starts a comment.
RefinementScript parse_script(std::string_view text);

std::string format_path(const std::vector<std::size_t>& path);

struct StepResult {
  Program term;
  std::vector<VC> vcs;  // side conditions, ids unset
};

/// Rewrites the Spec node at step.path by the law. Throws
/// RefinementError on a law-shape mismatch or an invalid position.
StepResult apply_step(const Program& term, const RefinementStep& step, const Scope& scope,
                      const Pred& assumptions = Pred::truth(), const CertifyContext& ctx = {});

struct ReplayResult {
  Program final_term;
  std::vector<VC> vcs;             // ids vc1, vc2, ...
  std::vector<std::string> trace;  // printed term after each step
};

/// Applies the steps left to right starting from [pre, post]. The final
/// term must be Spec-free and equal to the target.
ReplayResult replay(const Pred& pre, const Pred& post, const Program& target, const RefinementScript& script,
                    const Scope& scope, const Pred& assumptions = Pred::truth(), const CertifyContext& ctx = {});

/// Equality up to expression normalization, atom orientation, and the
/// order of conjuncts and disjuncts.
bool equivalent_up_to_normalization(const Pred& a, const Pred& b);

} // namespace hvcg
