#include <benchmark/benchmark.h>

#include <random>

#include "vfgrad/cones.hpp"

namespace {

using vfgrad::Vector;

Vector random_point(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

void BM_ProjectSecondOrder(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto k = vfgrad::Cone::SecondOrder(n);
  const Vector z = random_point(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(vfgrad::project(k, z));
}
BENCHMARK(BM_ProjectSecondOrder)->Arg(3)->Arg(33)->Arg(513);

void BM_ProjectProduct(benchmark::State& state) {
  const auto k = vfgrad::Cone::Product({vfgrad::Cone::NonpositiveOrthant(16), vfgrad::Cone::SecondOrder(9),
                                        vfgrad::Cone::Zero(4)});
  const Vector z = random_point(29, 2);
  for (auto _ : state) benchmark::DoNotOptimize(vfgrad::project(k, z));
}
BENCHMARK(BM_ProjectProduct);

}  // namespace
