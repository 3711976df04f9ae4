// Microbenchmarks for the history evaluation: dense O(n_T^2) convolution vs
// the exponential-sum recurrence, on the scalar linear decay problem.

#include <benchmark/benchmark.h>

#include <cmath>

#include "fracstep/fast_history.hpp"
#include "fracstep/harness.hpp"
#include "fracstep/stepper.hpp"

namespace {

using namespace fracstep;

SchemeConfig make_scheme(double alpha, int log2_n_t) {
  SchemeConfig s;
  s.gf = GeneratingFunction::fbdf2(alpha);
  s.tau = std::ldexp(1.0, -log2_n_t);
  s.n_T = 1 << log2_n_t;
  return s;
}

void BM_DirectHistory(benchmark::State& state) {
  const int log2_n_t = static_cast<int>(state.range(0));
  const PresetProblem pp = make_preset(Preset::Case1Scalar, 0.5, 1, 1.0);
  const SchemeConfig scheme = make_scheme(0.5, log2_n_t);
  const std::vector<int> snaps = {scheme.n_T};
  for (auto _ : state) {
    Trajectory t = run_direct(pp.problem, scheme, snaps);
    benchmark::DoNotOptimize(t.at(scheme.n_T)[0]);
  }
}
BENCHMARK(BM_DirectHistory)->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_FastHistory(benchmark::State& state) {
  const int log2_n_t = static_cast<int>(state.range(0));
  const PresetProblem pp = make_preset(Preset::Case1Scalar, 0.5, 1, 1.0);
  const SchemeConfig scheme = make_scheme(0.5, log2_n_t);
  const ExpSumApprox approx = build_exp_sum(scheme.gf, scheme.tau, scheme.n_T, 16, 1e-10);
  const std::vector<int> snaps = {scheme.n_T};
  for (auto _ : state) {
    Trajectory t = run_fast(pp.problem, scheme, approx, snaps);
    benchmark::DoNotOptimize(t.at(scheme.n_T)[0]);
  }
}
BENCHMARK(BM_FastHistory)->Arg(10)->Arg(12)->Arg(14)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_ExpSumBuild(benchmark::State& state) {
  const int log2_n_t = static_cast<int>(state.range(0));
  const SchemeConfig scheme = make_scheme(0.5, log2_n_t);
  for (auto _ : state) {
    ExpSumApprox a = build_exp_sum(scheme.gf, scheme.tau, scheme.n_T, 16, 1e-10);
    benchmark::DoNotOptimize(a.Q);
  }
}
BENCHMARK(BM_ExpSumBuild)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
