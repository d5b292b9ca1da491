#include "support/corpus.hpp"

#include <benchmark/benchmark.h>

using namespace hvcg;

namespace {

// Branch-and-bound on a tight quadratic bound; the budget limits splits.
void BM_IntervalQuadratic(benchmark::State& state) {
  Scope scope{{"x", "y"}, {}};
  VC vc;
  vc.hypotheses = {parse_pred("0 <= x & x <= 1 & 0 <= y & y <= 1", scope)};
  vc.goal = parse_pred("x*(1 - x) + y*(1 - y) <= 1/2 + 1/1000", scope);
  ProverConfig cfg;
  cfg.budget = state.range(0);
  cfg.bounds = {{"x", {0, 1}}, {"y", {0, 1}}};
  long long splits = 0;
  for (auto _ : state) {
    ProofResult r = prove(vc, cfg);
    splits = r.splits;
    benchmark::DoNotOptimize(r);
  }
  state.counters["splits"] = static_cast<double>(splits);
}
BENCHMARK(BM_IntervalQuadratic)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

// Whole-file discharge of the corpus examples.
void BM_DischargeCorpus(benchmark::State& state, const char* file) {
  Model m = corpus::model(file);
  std::vector<VC> vcs = corpus::hoare_vcs(m);
  ProverConfig cfg = corpus::prover_config(m);
  for (auto _ : state)
    for (const auto& vc : vcs) benchmark::DoNotOptimize(corpus::settle(vc, cfg));
  state.counters["vcs"] = static_cast<double>(vcs.size());
}
BENCHMARK_CAPTURE(BM_DischargeCorpus, bouncing_ball, "bouncing_ball.hyb")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DischargeCorpus, thermostat, "thermostat.hyb")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DischargeCorpus, tank, "tank_dinv.hyb")->Unit(benchmark::kMillisecond);

void BM_GenerateVcs(benchmark::State& state) {
  Model m = corpus::model("tank_dinv.hyb");
  for (auto _ : state) benchmark::DoNotOptimize(corpus::hoare_vcs(m));
}
BENCHMARK(BM_GenerateVcs);

} // namespace
