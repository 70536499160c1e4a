#include <vector>

#include <benchmark/benchmark.h>

#include "floquet_sep/cone.hpp"
#include "floquet_sep/semiflow.hpp"
#include "floquet_sep/spectrum.hpp"

using namespace floquet_sep;

namespace {

Driver coupled(int n) {
  Matrix A = Matrix::Constant(n, n, 5.0);
  A.diagonal().array() = -5.0 * (n - 1);
  return Driver::constant(A, Matrix::Identity(n, n));
}

Driver switching() {
  Matrix A0(2, 2), B0(2, 2), A1(2, 2), B1(2, 2);
  A0 << -1, 0.5, 0.5, -1;
  B0 << 0.5, 0.2, 0.2, 0.5;
  A1 << -2, 1, 0.2, -0.5;
  B1 << 0.1, 0.4, 0.4, 0.1;
  return Driver::iid_switching(7, {{A0, B0}, {A1, B1}}, 1.0);
}

void BM_StepUnit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const Semiflow flow(coupled(n), m);
  Segment u = Segment::constant(Eigen::VectorXd::Ones(n), m);
  for (auto _ : state) {
    u = flow.step_unit(u);
    u.flat() /= u.flat().norm();
    benchmark::DoNotOptimize(u.flat().data());
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_StepUnit)->Args({2, 50})->Args({2, 200})->Args({4, 200})->Args({8, 200});

void BM_StepUnitSwitching(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Semiflow flow(switching(), m);
  Segment u = Segment::constant(Eigen::VectorXd::Ones(2), m);
  double t0 = 0.0;
  for (auto _ : state) {
    u = flow.step_unit(u, t0);
    u.flat() /= u.flat().norm();
    t0 += 1.0;
    benchmark::DoNotOptimize(u.flat().data());
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_StepUnitSwitching)->Arg(50)->Arg(200);

void BM_Discretize(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Semiflow flow(coupled(2), m);
  for (auto _ : state) benchmark::DoNotOptimize(flow.discretize(1.0).data());
}
BENCHMARK(BM_Discretize)->Arg(20)->Arg(50)->Arg(100);

void BM_TopLyapunov(benchmark::State& state) {
  const Semiflow flow(coupled(2), 50);
  const Segment u = Segment::constant(Eigen::VectorXd::Ones(2), 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(top_lyapunov(flow, u, 200.0, 1.0, SpaceNorm::C()).lambda1);
  }
}
BENCHMARK(BM_TopLyapunov)->Unit(benchmark::kMillisecond);

void BM_PullbackFloquet(benchmark::State& state) {
  const Semiflow flow(switching(), 20);
  const Segment u = Segment::constant(Eigen::VectorXd::Ones(2), 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pullback_floquet(flow, 40.0, u, SpaceNorm::C()).residual);
  }
}
BENCHMARK(BM_PullbackFloquet)->Unit(benchmark::kMillisecond);

void BM_Oseledets(benchmark::State& state) {
  const Semiflow flow(switching(), static_cast<int>(state.range(0)));
  OseledetsOptions opts;
  opts.k = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oseledets_split(flow, 1.0, 200.0, SpaceNorm::C(), opts).lambdas.data());
  }
}
BENCHMARK(BM_Oseledets)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Irreducibility(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Driver d = coupled(n);
  for (auto _ : state) benchmark::DoNotOptimize(check_irreducibility(d, 1).satisfied);
}
BENCHMARK(BM_Irreducibility)->Arg(3)->Arg(6)->Arg(8);

}  // namespace
BENCHMARK_MAIN();
