#include "support/laws.hpp"

#include <benchmark/benchmark.h>

using namespace hvcg::kat;

namespace {

// Reflexive-transitive closure of a random transformer on n states.
void BM_Star(benchmark::State& state) {
  std::mt19937_64 rng(1);
  FinSpace s{static_cast<int>(state.range(0))};
  FinTransformer f = hvcg::laws::random_sparse(s, rng);
  for (auto _ : state) benchmark::DoNotOptimize(star(f));
}
BENCHMARK(BM_Star)->Arg(4)->Arg(8)->Arg(16);

void BM_WhileDo(benchmark::State& state) {
  std::mt19937_64 rng(2);
  FinSpace s{static_cast<int>(state.range(0))};
  FinTransformer f = hvcg::laws::random_transformer(s, rng);
  FinTest p = hvcg::laws::random_test(s, rng);
  for (auto _ : state) benchmark::DoNotOptimize(while_do(p, f));
}
BENCHMARK(BM_WhileDo)->Arg(4)->Arg(16);

void BM_Extremality(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hvcg::laws::spec_extremality_failures(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Extremality)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

} // namespace
