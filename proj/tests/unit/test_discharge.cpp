#include "hvcg/discharge.hpp"
#include "support/corpus.hpp"

#include <doctest.h>

#include <random>

using namespace hvcg;

namespace {

const Scope kScope{{"x", "y", "v"}, {"g", "h"}};

Pred pr(const char* s) { return parse_pred(s, kScope); }

VC vc_of(std::vector<const char*> hyps, const char* goal) {
  VC vc;
  vc.id = "vc1";
  vc.origin = "test";
  for (const char* h : hyps) vc.hypotheses.push_back(pr(h));
  vc.goal = pr(goal);
  return vc;
}

ProverConfig box(std::map<std::string, std::pair<Rational, Rational>> bounds, long long budget = 100000) {
  ProverConfig cfg;
  cfg.bounds = std::move(bounds);
  cfg.budget = budget;
  return cfg;
}

} // namespace

TEST_SUITE("discharge") {

TEST_CASE("ring normalization with a hypothesis") {
  ProofResult r = prove(vc_of({"x = 1"}, "x + 1 = 2"));
  CHECK(r.status == ProofStatus::Proved);
  CHECK(r.method == "ring");
  CHECK(prove(vc_of({}, "(x + y)^2 = x^2 + 2*x*y + y^2")).status == ProofStatus::Proved);
}

TEST_CASE("bouncing ball arithmetic") {
  Model m = corpus::model("bouncing_ball.hyb");
  auto vcs = corpus::hoare_vcs(m);
  ProverConfig cfg = corpus::prover_config(m);
  REQUIRE(vcs.size() == 3);
  for (const auto& vc : vcs) {
    ProofResult r = prove(vc, cfg);
    INFO(vc.origin);
    CHECK(r.status == ProofStatus::Proved);
    CHECK((r.method == "ring" || r.method == "interval"));
  }
}

TEST_CASE("thermostat evolution VCs within the split budget") {
  Model m = corpus::model("thermostat.hyb");
  ProverConfig cfg = corpus::prover_config(m);
  int evolutions = 0;
  for (const auto& vc : corpus::hoare_vcs(m)) {
    if (!time_binder(vc)) continue;
    ++evolutions;
    ProofResult r = prove(vc, cfg);
    INFO(vc.origin << ": " << r.detail);
    CHECK(r.status == ProofStatus::Proved);
    CHECK(r.splits <= 100000);
  }
  CHECK(evolutions == 2);
}

TEST_CASE("false goals are falsified with a checked witness") {
  ProofResult r = discharge(vc_of({}, "false"));
  CHECK(r.status == ProofStatus::Falsified);
  ProofResult s = discharge(vc_of({"x >= 0"}, "x*x < 4"), box({{"x", {0, 10}}}));
  REQUIRE(s.status == ProofStatus::Falsified);
  REQUIRE(s.witness);
  CHECK(s.witness->vars.at("x") * s.witness->vars.at("x") >= Rational(4));
  CHECK(check_counterexample(vc_of({"x >= 0"}, "x*x < 4"), *s.witness));
}

TEST_CASE("tank mutant is falsified") {
  Model m = corpus::model("tank_mutant.hyb");
  ProverConfig cfg = corpus::prover_config(m);
  int falsified = 0;
  for (const auto& vc : corpus::hoare_vcs(m)) {
    ProofResult r = corpus::settle(vc, cfg);
    if (r.status == ProofStatus::Falsified) {
      ++falsified;
      REQUIRE(r.witness);
      CHECK(check_counterexample(vc, *r.witness, cfg));
    }
  }
  CHECK(falsified >= 1);
}

TEST_CASE("valid goals are never falsified") {
  CHECK(falsify(vc_of({"x >= 0"}, "x + 1 > 0"), box({{"x", {-5, 5}}})).status == ProofStatus::Unknown);
  CHECK(falsify(vc_of({"g < 0"}, "g*x*x <= 0"), box({{"x", {-5, 5}}, {"g", {-5, 5}}})).status ==
        ProofStatus::Unknown);
}

TEST_CASE("interval proofs hold on random points") {
  VC vc = vc_of({"0 <= x", "x <= 1", "0 <= y", "y <= 1"}, "x*y <= (x + y)/2 + 1/100");
  ProverConfig cfg = box({{"x", {-2, 2}}, {"y", {-2, 2}}});
  ProofResult r = prove(vc, cfg);
  REQUIRE(r.status == ProofStatus::Proved);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0, 1);
  int bad = 0;
  for (int k = 0; k < 10000; ++k) {
    Values vars{{"x", d(rng)}, {"y", d(rng)}};
    Valuation v{&vars, nullptr, 0.0};
    bad += !eval(vc.goal, v);
  }
  CHECK(bad == 0);
}

TEST_CASE("a larger budget never loses a proof") {
  VC vc = vc_of({"0 <= x", "x <= 1"}, "x*(1 - x) <= 1/4 + 1/1000");
  ProofResult small = prove(vc, box({{"x", {0, 1}}}, 20));
  ProofResult large = prove(vc, box({{"x", {0, 1}}}, 20000));
  CHECK(large.status == ProofStatus::Proved);
  if (small.status == ProofStatus::Proved) CHECK(large.splits <= 20000);
  CHECK(prove(vc, box({{"x", {0, 1}}}, 0)).status != ProofStatus::Falsified);
}

TEST_CASE("prove and falsify never disagree on the corpus") {
  for (const char* f : {"bouncing_ball.hyb", "tank_dinv.hyb", "thermostat.hyb", "bouncing_ball_mutant.hyb",
                        "tank_mutant.hyb", "thermostat_mutant.hyb"}) {
    Model m = corpus::model(f);
    ProverConfig cfg = corpus::prover_config(m);
    for (const auto& vc : corpus::hoare_vcs(m)) {
      if (vc.is_certificate) continue;
      ProofResult p = prove(vc, cfg);
      ProofResult q = falsify(vc, cfg);
      INFO(f << " " << vc.id);
      CHECK(p.status != ProofStatus::Falsified);
      CHECK(q.status != ProofStatus::Proved);
      CHECK_FALSE((p.status == ProofStatus::Proved && q.status == ProofStatus::Falsified));
    }
  }
}

}
