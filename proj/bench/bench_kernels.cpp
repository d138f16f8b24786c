#include <benchmark/benchmark.h>

#include "fellstab/stabilization.hpp"
#include "kgraph_suite.hpp"
#include "suite.hpp"

using namespace fellstab;

namespace {

Exec policy(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_ValidateGroupoid(benchmark::State& st) {
  const auto g = pair_groupoid(12);
  for (auto _ : st) benchmark::DoNotOptimize(validate_groupoid(g, policy(st)));
}

void BM_ValidateBundle(benchmark::State& st) {
  const auto b = from_cocycle(pair_groupoid(6), suite::trivial);
  for (auto _ : st) benchmark::DoNotOptimize(validate_bundle(b, kDefaultTolerance, policy(st)));
}

void BM_SectionAlgebra(benchmark::State& st) {
  const auto b = from_cocycle(pair_groupoid(6), suite::trivial);
  for (auto _ : st) benchmark::DoNotOptimize(section_algebra(b, policy(st)));
}

void BM_Associativity(benchmark::State& st) {
  const auto a = section_algebra(from_cocycle(pair_groupoid(4), suite::trivial)).algebra;
  for (auto _ : st) benchmark::DoNotOptimize(associativity_residual(a, policy(st)));
}

void BM_Stabilize(benchmark::State& st) {
  const auto b = from_cocycle(pair_groupoid(3), suite::trivial);
  StabilizeOptions opt;
  opt.exec = policy(st);
  for (auto _ : st) benchmark::DoNotOptimize(stabilize(b, opt));
}

void BM_Aperiodicity(benchmark::State& st) {
  const auto s = suite::product(suite::two_loops(), suite::two_loops());
  for (auto _ : st) benchmark::DoNotOptimize(aperiodicity(s, SearchLimits{4, 200000}, policy(st)));
}

void BM_StrongAperiodicity(benchmark::State& st) {
  const auto s = suite::disjoint(suite::chain(2), suite::two_loops());
  for (auto _ : st) benchmark::DoNotOptimize(strong_aperiodicity(s, {}, policy(st)));
}

}  // namespace

// Argument 0 is the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_ValidateGroupoid)->Arg(0)->Arg(1);
BENCHMARK(BM_ValidateBundle)->Arg(0)->Arg(1);
BENCHMARK(BM_SectionAlgebra)->Arg(0)->Arg(1);
BENCHMARK(BM_Associativity)->Arg(0)->Arg(1);
BENCHMARK(BM_Stabilize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Aperiodicity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StrongAperiodicity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
