#include "hvcg/vcgen.hpp"

#include "hvcg/error.hpp"
#include "hvcg/parser.hpp"

namespace hvcg {

VcSink::VcSink(Pred assumptions, CertifyContext ctx) : assumptions_(std::move(assumptions)), ctx_(std::move(ctx)) {
  if (ctx_.assumptions.kind() == Pred::Kind::True) ctx_.assumptions = assumptions_;
}

void VcSink::emit(std::vector<Pred> hyps, const Pred& goal, const std::string& origin) {
  if (assumptions_.kind() != Pred::Kind::True) hyps.insert(hyps.begin(), assumptions_);
  split(std::move(hyps), goal, origin);
}

void VcSink::split(std::vector<Pred> hyps, const Pred& goal, const std::string& origin) {
  if (contains_after(goal)) {
    if (goal.kind() == Pred::Kind::Implies) {
      hyps.push_back(goal.parts()[0]);
      split(std::move(hyps), goal.parts()[1], origin);
      return;
    }
    if (goal.kind() == Pred::Kind::And) {
      std::vector<Pred> plain;
      for (const auto& p : goal.parts())
        if (!contains_after(p)) plain.push_back(p);
      if (!plain.empty()) split(hyps, Pred::conj(plain), origin);
      for (const auto& p : goal.parts())
        if (contains_after(p)) split(hyps, p, origin);
      return;
    }
  }
  VC vc;
  vc.origin = origin;
  vc.hypotheses = std::move(hyps);
  vc.goal = goal;
  vcs_.push_back(std::move(vc));
}

void VcSink::emit_certificate(const FlowCertificate& cert, const std::string& origin) {
  VC vc;
  vc.origin = origin;
  vc.is_certificate = true;
  vc.certificate_ok = cert.certified();
  vc.certificate_detail = cert.summary();
  vcs_.push_back(std::move(vc));
}

namespace {

const Pred* first_after(const Pred& p) {
  if (p.kind() == Pred::Kind::After) return &p;
  if (p.kind() == Pred::Kind::Not || p.kind() == Pred::Kind::And || p.kind() == Pred::Kind::Or ||
      p.kind() == Pred::Kind::Implies)
    for (const auto& q : p.parts())
      if (const Pred* a = first_after(q)) return a;
  return nullptr;
}

std::string describe(const Program& p) {
  std::string s = print_program(p);
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

} // namespace

std::optional<TimeBinder> time_binder(const VC& vc) {
  if (vc.is_certificate) return std::nullopt;
  const Pred* a = first_after(vc.goal);
  if (!a) return std::nullopt;
  Substitution along;
  for (const auto& [x, e] : a->flow().bindings) along.vars[x] = e;
  return TimeBinder{a->domain(), substitute(a->guard(), along)};
}

Pred weakest_pre(const Program& prog, const Pred& post, VcSink& sink) {
  using K = Program::Kind;
  switch (prog.kind()) {
  case K::Assign: return subst_update(prog.update(), post);
  case K::Test: return Pred::implies(prog.pred(), post);
  case K::Assert:
    sink.emit({prog.pred()}, post, "midpoint " + to_string(prog.pred()));
    return prog.pred();
  case K::Seq: {
    Pred q = post;
    const auto& cs = prog.children();
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) q = weakest_pre(*it, q, sink);
    return q;
  }
  case K::Choice: {
    std::vector<Pred> parts;
    for (const auto& c : prog.children()) parts.push_back(weakest_pre(c, post, sink));
    return Pred::conj(std::move(parts));
  }
  case K::If: {
    Pred a = weakest_pre(prog.children()[0], post, sink);
    Pred b = weakest_pre(prog.children()[1], post, sink);
    return Pred::conj({Pred::implies(prog.pred(), a), Pred::implies(!prog.pred(), b)});
  }
  case K::While: {
    if (!prog.inv()) throw AnnotationError("while loop without invariant: " + describe(prog));
    const Pred& i = *prog.inv();
    Pred body = weakest_pre(prog.children()[0], i, sink);
    sink.emit({i, prog.pred()}, body, "while-invariant preserved");
    sink.emit({i, !prog.pred()}, post, "while-invariant exit");
    return i;
  }
  case K::Loop: {
    const Pred& i = *prog.inv();
    Pred body = weakest_pre(prog.children()[0], i, sink);
    sink.emit({i}, body, "loop-invariant preserved");
    sink.emit({i}, post, "loop-invariant exit");
    return i;
  }
  case K::Star: throw AnnotationError("iteration without invariant (use loop ... inv): " + describe(prog));
  case K::Spec:
    sink.emit({prog.post()}, post, "specification post");
    return prog.pre();
  case K::Evol: {
    const EvolSpec& e = prog.evol_spec();
    return Pred::after(e.flow, e.guard, e.domain, post);
  }
  case K::Ode: {
    const OdeSpec& o = prog.ode_spec();
    if (o.solution) {
      FlowCertificate cert = certify_flow(o.vector_field(), *o.solution, o.domain, sink.context());
      sink.emit_certificate(cert, "flow certificate " + describe(prog));
      return Pred::after(*o.solution, o.guard, o.domain, post);
    }
    if (o.dinv) {
      auto atoms = dinv_obligations(*o.dinv, o.vector_field(), o.guard, sink.context());
      for (const auto& a : atoms) {
        if (a.rule == "unsupported")
          throw AnnotationError("differential invariant atom not supported: " + to_string(a.atom));
        for (const auto& vc : a.obligations) {
          // obligations already carry the assumptions
          VC copy = vc;
          copy.id.clear();
          sink.vcs().push_back(copy);
        }
      }
      std::vector<Pred> hyps{*o.dinv};
      if (o.guard.kind() != Pred::Kind::True) hyps.push_back(o.guard);
      sink.emit(hyps, post, "dinv exit (I & G -> Q)");
      return *o.dinv;
    }
    throw AnnotationError("evolution command needs a solution or a dinv annotation: " + describe(prog));
  }
  }
  throw Error("unreachable program kind");
}

std::vector<VC> generate(const HoareGoal& goal, const Pred& assumptions, const CertifyContext& ctx) {
  VcSink sink(assumptions, ctx);
  Pred wp = weakest_pre(goal.program, goal.post, sink);
  VcSink entry(assumptions, ctx);
  entry.emit({goal.pre}, wp, "entry (pre -> wp)");
  std::vector<VC> out = std::move(entry.vcs());
  for (auto& vc : sink.vcs()) out.push_back(std::move(vc));
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = "vc" + std::to_string(i + 1);
  return out;
}

} // namespace hvcg
