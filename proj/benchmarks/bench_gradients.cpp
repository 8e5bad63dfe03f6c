#include <benchmark/benchmark.h>

#include "vfgrad/library.hpp"
#include "vfgrad/verify.hpp"

namespace {

using vfgrad::Vector;

vfgrad::SolveOptions solver_path() {
  vfgrad::SolveOptions o;
  o.use_oracle = false;
  o.starts = 1;
  return o;
}

// One adjoint gradient against a 2q-point central-difference stencil.
void BM_AdjointBilevel(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto p = vfgrad::library("bilevel_quad", {{"q", q}});
  const Vector th = Vector::LinSpaced(q, -0.5, 0.5);
  const auto opts = solver_path();
  for (auto _ : state) benchmark::DoNotOptimize(vfgrad::adjoint_gradient(p, th, opts).u);
}
BENCHMARK(BM_AdjointBilevel)->Arg(1)->Arg(2)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_FiniteDiffBilevel(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto p = vfgrad::library("bilevel_quad", {{"q", q}});
  const Vector th = Vector::LinSpaced(q, -0.5, 0.5);
  const auto opts = solver_path();
  for (auto _ : state) benchmark::DoNotOptimize(vfgrad::finite_diff_gradient(p, th, 1e-5, opts).gradient);
}
BENCHMARK(BM_FiniteDiffBilevel)->Arg(1)->Arg(2)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_SolveSocNorm(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto p = vfgrad::library("soc_norm", {{"q", q}});
  const Vector th = Vector::Constant(q, 0.3);
  const auto opts = solver_path();
  for (auto _ : state) benchmark::DoNotOptimize(vfgrad::solve_primal_dual(p, th, opts).x);
}
BENCHMARK(BM_SolveSocNorm)->Arg(2)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_ChainRuleOracle(benchmark::State& state) {
  const auto p = vfgrad::library("soc_norm", {{"q", 2}});
  const auto curve = vfgrad::CurveSpec::line(Vector::Constant(2, -1.0), Vector::Constant(2, 0.7));
  vfgrad::ChainRuleOptions opts;
  opts.parallel = false;
  for (auto _ : state) benchmark::DoNotOptimize(vfgrad::chain_rule_check(p, curve, opts).pass_fraction);
}
BENCHMARK(BM_ChainRuleOracle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
