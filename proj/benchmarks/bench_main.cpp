#include <benchmark/benchmark.h>

#include "hjlab/characteristics.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/variational.hpp"
#include "hjlab/viscosity.hpp"
#include "hjlab/wavefront.hpp"

using namespace hjlab;

static void BM_Flow(benchmark::State& state) {
  const Hamiltonian H = saddle();
  PhaseState s{vec({0.1, -0.2}), vec({0.3, 0.4})};
  for (auto _ : state) {
    s = flow(H, 1e-3, s);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Flow);

static void BM_Front1D(benchmark::State& state) {
  const Hamiltonian H = cubic_wave();
  const InitialCondition u0 = abs_kink();
  for (auto _ : state) {
    const Front f = build_front_1d(H, u0, 0.1);
    benchmark::DoNotOptimize(f.sample(static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_Front1D)->Arg(256)->Arg(4096);

static void BM_Sections1D(benchmark::State& state) {
  const Hamiltonian H = cubic_wave();
  const Front f = build_front_1d(H, abs_kink(), 0.1);
  const auto q = make_axis(-1, 1, 2.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_continuous_sections(f, q));
}
BENCHMARK(BM_Sections1D)->Arg(500)->Arg(2000);

static void BM_Viscosity1D(benchmark::State& state) {
  const Hamiltonian H = half_square(1);
  const InitialCondition u0 = abs_kink();
  GridScheme scheme;
  scheme.axes = {make_axis(-1, 1, 2.0 / static_cast<double>(state.range(0)))};
  for (auto _ : state) benchmark::DoNotOptimize(viscosity_solve(H, u0, 0.5, scheme));
}
BENCHMARK(BM_Viscosity1D)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_Viscosity2D(benchmark::State& state) {
  const Hamiltonian H = saddle();
  const InitialCondition u0 = saddle_data(0.75, 1);
  const double dx = 0.8 / static_cast<double>(state.range(0));
  GridScheme scheme;
  scheme.axes = {make_axis(-0.6, 0.2, dx), make_axis(-0.4, 0.4, dx)};
  for (auto _ : state) benchmark::DoNotOptimize(viscosity_solve(H, u0, 0.05, scheme));
}
BENCHMARK(BM_Viscosity2D)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Envelope(benchmark::State& state) {
  const Hamiltonian H = saddle();
  const EnvelopeFamily F = saddle_family(0.75, 1);
  const double dx = 0.84 / static_cast<double>(state.range(0));
  const std::vector<std::vector<double>> axes{make_axis(-1, -0.16, dx), make_axis(-0.5, 0.5, dx)};
  for (auto _ : state) benchmark::DoNotOptimize(envelope_solve(H, F, 0.1, axes));
}
BENCHMARK(BM_Envelope)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_LaxOleinik(benchmark::State& state) {
  const Hamiltonian H = half_square(1);
  const InitialCondition u0 = abs_kink();
  const auto q = make_axis(-1, 1, 2.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lax_oleinik(H, u0, 0.5, q));
}
BENCHMARK(BM_LaxOleinik)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_Mollified(benchmark::State& state) {
  const Mollified m(saddle_data(0.75, 1), 1e-2, static_cast<int>(state.range(0)));
  const Vec q = vec({-0.3, 0.05});
  for (auto _ : state) {
    double v;
    m.jet(q, &v, nullptr, nullptr);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Mollified)->Arg(17)->Arg(33);

static void BM_Hausdorff(benchmark::State& state) {
  PointSet X, Y;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / n;
    X.push_back(vec({s, s * s, 0.0}));
    Y.push_back(vec({s, s * s + 1e-3, 1e-3}));
  }
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_distance(X, Y));
}
BENCHMARK(BM_Hausdorff)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
