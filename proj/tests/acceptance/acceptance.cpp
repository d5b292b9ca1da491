// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
#include "commands.hpp"
#include "hvcg/calculus.hpp"
#include "hvcg/certify.hpp"
#include "hvcg/store.hpp"
#include "support/corpus.hpp"
#include "support/laws.hpp"
#include "support/random_expr.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hvcg;

namespace {

constexpr long long kAlgebraInstances = 10000;
constexpr int kAlgebraMaxN = 4;
constexpr int kExtremalityMaxN = 3;
constexpr int kStoreSamples = 1000;
constexpr int kDerivativeExprs = 100;
constexpr double kDerivativeTol = 1e-6;
constexpr long long kSplitBudget = 100000;
constexpr int kMonteCarloRuns = 1000;
constexpr int kMinMutants = 3;

constexpr double kAlgebraSeconds = 120;
constexpr double kStoreSeconds = 30;
constexpr double kCertifySeconds = 10;
constexpr double kEndToEndSeconds = 300;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (!pass) detail << "; ";
    else detail.str("");
    pass = false;
    detail << why;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void within(Outcome& o, double elapsed, double limit) {
  if (elapsed >= limit) o.fail("took " + std::to_string(elapsed) + " s, limit " + std::to_string(limit) + " s");
}

// ---------------------------------------------------------------------------

Outcome algebra_oracle() {
  Outcome o;
  auto t0 = Clock::now();
  long long laws = 0;
  for (const auto& suite : {laws::kat_axioms(), laws::hoare_rules(), laws::refinement_rules()}) {
    laws += static_cast<long long>(suite.size());
    for (const auto& f : laws::run_laws(suite, kAlgebraInstances, 20240101, kAlgebraMaxN))
      o.fail(f.law + " failed on " + std::to_string(f.count) + " instances");
  }
  for (int n = 1; n <= kExtremalityMaxN; ++n)
    if (long long bad = laws::spec_extremality_failures(n)) o.fail("extremality at n=" + std::to_string(n) + ": " + std::to_string(bad));
  double el = seconds_since(t0);
  within(o, el, kAlgebraSeconds);
  if (o.pass)
    o.detail << laws << " laws x " << kAlgebraInstances << " instances (n <= " << kAlgebraMaxN
             << "), extremality exhaustive at n <= " << kExtremalityMaxN << ", " << el << " s";
  return o;
}

Outcome store_laws() {
  Outcome o;
  auto t0 = Clock::now();
  const std::vector<std::string> vars{"x", "y", "v", "t"};
  Scope scope{{vars.begin(), vars.end()}, {"g"}};
  Values params{{"g", -1.0}};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d(-10, 10);
  auto random_store = [&] {
    Values v;
    for (const auto& n : vars) v[n] = d(rng);
    return Store(vars, v);
  };
  auto ex = [&](const char* s) { return parse_expr(s, scope); };
  auto run = [&](const std::vector<StateUpdate>& prog, Store s) {
    for (const auto& u : prog) s = update_apply(u, s, params);
    return s;
  };
  auto close = [](const Store& a, const Store& b) {
    for (const auto& n : a.declared())
      if (std::fabs(a.get(n) - b.get(n)) > 1e-9 * std::max(1.0, std::fabs(a.get(n)))) return false;
    return true;
  };
  long long fails[9] = {};
  const char* names[9] = {"get-put", "put-put", "put-get", "update cancellation", "update commutation",
                          "assign skip", "assign compose", "assign commute", "assign test"};
  const Expr e = ex("x*y + 1"), f = ex("x - 2*y"), ev = ex("y + 3"), gv = ex("t*t + g");
  const Pred P = parse_pred("x > y", scope);
  for (int k = 0; k < kStoreSamples; ++k) {
    Store s = random_store();
    double a = d(rng), b = d(rng);
    for (const auto& n : vars) {
      Lens x(n);
      fails[0] += x.get(x.put(s, a)) != a;
      fails[1] += !(x.put(x.put(s, b), a) == x.put(s, a));
      fails[2] += !(x.put(s, x.get(s)) == s);
    }
    // two puts of independent lenses commute, a later put cancels an earlier one
    Lens x("x"), y("y");
    fails[3] += !(x.put(x.put(s, a), b) == x.put(s, b));
    fails[4] += !(x.put(y.put(s, b), a) == y.put(x.put(s, a), b));
    fails[5] += !(run({StateUpdate({{"x", ex("x")}})}, s) == s);
    Store c1 = run({StateUpdate({{"x", e}}), StateUpdate({{"x", f}})}, s);
    Store c2 = run({StateUpdate({{"x", subst_update(StateUpdate({{"x", e}}), f)}})}, s);
    fails[6] += !close(c1, c2);
    fails[7] += !(run({StateUpdate({{"x", ev}}), StateUpdate({{"v", gv}})}, s) ==
                  run({StateUpdate({{"v", gv}}), StateUpdate({{"x", ev}})}, s));
    StateUpdate xe({{"x", e}});
    Store moved = run({xe}, s);
    fails[8] += eval(P, Valuation{&moved.values(), &params, 0.0}) != eval(subst_update(xe, P), Valuation{&s.values(), &params, 0.0});
  }
  for (int i = 0; i < 9; ++i)
    if (fails[i]) o.fail(std::string(names[i]) + " failed " + std::to_string(fails[i]) + " times");
  double el = seconds_since(t0);
  within(o, el, kStoreSeconds);
  if (o.pass) o.detail << "9 laws x " << kStoreSamples << " stores, " << el << " s";
  return o;
}

Outcome differentiation() {
  Outcome o;
  std::mt19937_64 rng(1717);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  double worst = 0;
  int bad = 0, evaluated = 0;
  for (int k = 0; k < kDerivativeExprs; ++k) {
    Expr e = gen::smooth(rng, 4);
    Expr de = differentiate_time(e);
    Values vars{{"x", d(rng)}, {"y", d(rng)}};
    Values params{{"a", d(rng)}};
    double t0 = d(rng);
    auto at = [&](const Expr& ex, double t) { return eval(ex, Valuation{&vars, &params, t}); };
    double h = 1e-5 * std::max(1.0, std::fabs(t0));
    double num = (at(e, t0 + h) - at(e, t0 - h)) / (2 * h);
    double sym = at(de, t0);
    double rel = std::fabs(sym - num) / std::max(1.0, std::fabs(sym));
    worst = std::max(worst, rel);
    ++evaluated;
    if (rel > kDerivativeTol) ++bad;
  }
  if (bad) o.fail(std::to_string(bad) + " of " + std::to_string(evaluated) + " exceed " + std::to_string(kDerivativeTol));
  o.detail << (o.pass ? "" : "; ") << evaluated << " expressions, worst relative error " << worst;
  return o;
}

void collect_odes(const Program& p, std::vector<OdeSpec>& out) {
  if (p.kind() == Program::Kind::Ode) out.push_back(p.ode_spec());
  if (p.kind() == Program::Kind::Ode || p.kind() == Program::Kind::Evol || p.kind() == Program::Kind::Assign ||
      p.kind() == Program::Kind::Test || p.kind() == Program::Kind::Spec)
    return;
  for (const auto& c : p.children()) collect_odes(c, out);
}

void collect_evols(const Program& p, std::vector<EvolSpec>& out) {
  if (p.kind() == Program::Kind::Evol) out.push_back(p.evol_spec());
  if (p.kind() == Program::Kind::Ode || p.kind() == Program::Kind::Evol || p.kind() == Program::Kind::Assign ||
      p.kind() == Program::Kind::Test || p.kind() == Program::Kind::Spec)
    return;
  for (const auto& c : p.children()) collect_evols(c, out);
}

Outcome flow_certification() {
  Outcome o;
  auto t0 = Clock::now();
  // thermostat: both branches, symbolic derivative match, affine L = a
  Model th = corpus::model("thermostat.hyb");
  std::vector<OdeSpec> odes;
  collect_odes(th.hoare->program, odes);
  if (odes.size() != 2) o.fail("thermostat: expected 2 ODEs, found " + std::to_string(odes.size()));
  for (const auto& ode : odes) {
    FlowCertificate c = certify_flow(ode.vector_field(), *ode.solution, ode.domain, corpus::certify_context(th));
    if (!c.certified() || c.derivative != MatchStatus::Symbolic) o.fail("thermostat flow: " + c.summary());
    if (c.lipschitz != LipschitzStatus::SymbolicAffine || !c.lipschitz_constant || to_string(*c.lipschitz_constant) != "a")
      o.fail("thermostat Lipschitz: " + c.summary());
  }
  // bouncing ball: the evol flow solves x' = v, v' = g
  Model ball = corpus::model("bouncing_ball.hyb");
  std::vector<EvolSpec> evols;
  collect_evols(ball.hoare->program, evols);
  Scope bs = Scope::of(ball);
  VectorField bf{{"x", parse_expr("v", bs)}, {"v", parse_expr("g", bs)}};
  if (evols.size() != 1) o.fail("ball: expected one evolution");
  else {
    FlowCertificate c = certify_flow(bf, evols[0].flow, evols[0].domain, corpus::certify_context(ball));
    if (!c.certified() || c.derivative != MatchStatus::Symbolic) o.fail("ball flow: " + c.summary());
  }
  // water tank: the dinv annotations of both branches
  Model tank = corpus::model("tank_dinv.hyb");
  std::vector<OdeSpec> tank_odes;
  collect_odes(tank.hoare->program, tank_odes);
  int invariants = 0;
  for (const auto& ode : tank_odes) {
    if (!ode.dinv) continue;
    ++invariants;
    InvariantCertificate c = diff_invariant(*ode.dinv, ode.vector_field(), ode.guard, ode.domain, corpus::certify_context(tank));
    if (!c.valid) o.fail("tank dI not certified: " + to_string(*ode.dinv));
  }
  if (invariants != 2) o.fail("tank: expected 2 invariants, found " + std::to_string(invariants));
  double el = seconds_since(t0);
  within(o, el, kCertifySeconds);
  if (o.pass) o.detail << "thermostat 2 flows (symbolic, L = a), ball flow, tank 2 dI, " << el << " s";
  return o;
}

cli::RunConfig run_config(const char* command, const std::string& file) {
  cli::RunConfig c;
  c.command = command;
  c.files = {corpus::path(file)};
  return c;
}

Outcome end_to_end() {
  Outcome o;
  auto t0 = Clock::now();
  // instances satisfy every declared assumption (load rejects violations with exit 2)
  for (const char* f : {"bouncing_ball.hyb", "tank_dinv.hyb", "thermostat.hyb"}) {
    Model m = corpus::model(f);
    for (const auto& decl : m.params) {
      auto v = eval_exact(decl.assume, {}, m.instance);
      if (!v || !*v) o.fail(std::string(f) + ": assumption of " + decl.name + " not satisfied by the instance");
    }
    cli::RunConfig cfg = run_config("verify", f);
    cfg.budget = kSplitBudget;
    cli::CommandResult r = cli::run_command(cfg);
    if (r.exit_code != 0) o.fail(std::string(f) + " exit " + std::to_string(r.exit_code));
    long long max_splits = 0;
    for (const auto& vc : r.report["files"][0]["vcs"]) {
      std::string method = vc["method"];
      max_splits = std::max<long long>(max_splits, vc["splits"].get<long long>());
      if (vc["status"] != "proved") o.fail(std::string(f) + " " + vc["id"].get<std::string>() + " " + vc["status"].get<std::string>());
      if (method != "ring" && method != "interval" && method != "certificate")
        o.fail(std::string(f) + " " + vc["id"].get<std::string>() + " proved by " + method);
    }
    if (max_splits > kSplitBudget) o.fail(std::string(f) + " used " + std::to_string(max_splits) + " splits");
    o.detail << (o.detail.tellp() > 0 ? ", " : "") << f << " " << r.report["files"][0]["summary"]["proved"] << "/"
             << r.report["files"][0]["summary"]["total"] << " (max splits " << max_splits << ")";
  }
  double el = seconds_since(t0);
  within(o, el, kEndToEndSeconds);
  if (o.pass) o.detail << ", " << el << " s";
  return o;
}

Outcome refinement_replay() {
  Outcome o;
  for (const char* f : {"thermostat_refine.hyb", "tank_refine.hyb"}) {
    cli::CommandResult r = cli::run_command(run_config("refine", f));
    const auto& file = r.report["files"][0];
    if (r.exit_code != 0) o.fail(std::string(f) + " exit " + std::to_string(r.exit_code));
    if (file.value("replay", "") != "reached target") o.fail(std::string(f) + " did not reach the target");
    // the report's final term must print exactly like the target program
    Model m = corpus::model(f);
    if (file.value("final_term", "") != print_program(m.refine->target)) o.fail(std::string(f) + " final term differs");
    if (o.pass)
      o.detail << (o.detail.tellp() > 0 ? ", " : "") << f << " " << file["steps"] << " steps, "
               << file["summary"]["proved"] << "/" << file["summary"]["total"] << " side conditions";
  }
  return o;
}

Outcome soundness_differential() {
  Outcome o;
  for (const char* f : {"bouncing_ball.hyb", "tank_dinv.hyb", "thermostat.hyb"}) {
    cli::RunConfig cfg = run_config("simulate", f);
    cfg.runs = kMonteCarloRuns;
    cfg.seed = 2024;
    cli::CommandResult r = cli::run_command(cfg);
    const auto& sim = r.report["files"][0]["simulation"];
    int violations = sim.value("violations", -1), feasible = sim.value("feasible", 0);
    if (r.exit_code != 0 || violations != 0) o.fail(std::string(f) + ": " + std::to_string(violations) + " violations");
    o.detail << (o.detail.tellp() > 0 ? ", " : "") << f << " " << violations << " violations in " << feasible << " feasible runs";
  }
  int mutants = 0;
  for (const char* f : {"bouncing_ball_mutant.hyb", "tank_mutant.hyb", "thermostat_mutant.hyb"}) {
    cli::CommandResult r = cli::run_command(run_config("verify", f));
    bool witness = false;
    for (const auto& vc : r.report["files"][0]["vcs"])
      if (vc["status"] == "falsified" && !vc["counterexample"].is_null()) witness = true;
    if (r.exit_code == 1 && witness) ++mutants;
    else o.fail(std::string(f) + ": exit " + std::to_string(r.exit_code) + (witness ? "" : ", no counterexample"));
  }
  if (mutants < kMinMutants) o.fail("only " + std::to_string(mutants) + " mutants falsified");
  o.detail << "; " << mutants << " mutants falsified with exit 1";
  return o;
}

Outcome prover_consistency() {
  Outcome o;
  std::vector<std::pair<std::string, std::vector<VC>>> sets;
  for (const char* f : {"bouncing_ball.hyb", "tank_dinv.hyb", "thermostat.hyb", "bouncing_ball_mutant.hyb",
                        "tank_mutant.hyb", "thermostat_mutant.hyb"})
    sets.emplace_back(f, corpus::hoare_vcs(corpus::model(f)));
  for (auto [f, ref] : std::vector<std::pair<const char*, const char*>>{{"thermostat_refine.hyb", "thermostat.ref"},
                                                                         {"thermostat_refine.hyb", "thermostat_weak_midpoint.ref"},
                                                                         {"tank_refine.hyb", "tank.ref"},
                                                                         {"bouncing_ball_refine.hyb", "bouncing_ball.ref"}})
    sets.emplace_back(std::string(f) + "+" + ref, corpus::replay_with(corpus::model(f), ref).vcs);
  int total = 0, proved = 0, falsified = 0;
  for (const auto& [name, vcs] : sets) {
    std::string model_file = name.substr(0, name.find('+'));
    ProverConfig cfg = corpus::prover_config(corpus::model(model_file));
    for (const auto& vc : vcs) {
      if (vc.is_certificate) continue;
      ++total;
      ProofResult p = prove(vc, cfg);
      ProofResult q = falsify(vc, cfg);
      proved += p.status == ProofStatus::Proved;
      falsified += q.status == ProofStatus::Falsified;
      if (p.status == ProofStatus::Proved && q.status == ProofStatus::Falsified) o.fail(name + " " + vc.id + " proved and falsified");
    }
  }
  if (o.pass) o.detail << total << " VCs, " << proved << " proved, " << falsified << " falsified, none both";
  return o;
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"algebra oracle", algebra_oracle},
      {"lens/store laws", store_laws},
      {"differentiation", differentiation},
      {"flow certification", flow_certification},
      {"end-to-end verification", end_to_end},
      {"refinement replay", refinement_replay},
      {"soundness differential", soundness_differential},
      {"prover consistency", prover_consistency},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
