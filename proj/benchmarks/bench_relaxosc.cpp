// Microbenchmarks for the hot paths: fast-orbit integration (the unit of
// work behind every scan), full root scans, the balance-function conjugate,
// one return-map loop of the stiff full system, and the polyline Hausdorff
// distance used when comparing cycles with predictions.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include <relaxosc/criteria.hpp>
#include <relaxosc/fast_orbit.hpp>
#include <relaxosc/full_sim.hpp>
#include <relaxosc/geometry.hpp>
#include <relaxosc/model.hpp>

using namespace relaxosc;

namespace {

ModelSpec h2_cycle() { return ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 1.0); }
ModelSpec h4_pair() { return ModelSpec::holling4(4.0, 3.0, 0.1, 2.0, 0.75); }

void BM_FastOrbitScalars(benchmark::State& state) {
  ModelSpec spec = h2_cycle();
  double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    FastOrbit orb = fast_orbit_scalars(spec, 2.0, tol);
    benchmark::DoNotOptimize(orb.chi);
  }
}
BENCHMARK(BM_FastOrbitScalars)->Arg(8)->Arg(10)->Arg(12);

void BM_FastOrbitSampled(benchmark::State& state) {
  ModelSpec spec = h2_cycle();
  for (auto _ : state) {
    FastOrbit orb = fast_orbit(spec, 2.0, 1e-10);
    benchmark::DoNotOptimize(orb.samples.data());
  }
}
BENCHMARK(BM_FastOrbitSampled);

void BM_ChiRootScan(benchmark::State& state) {
  ModelSpec spec = h4_pair();
  int gridN = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ChiScanResult scan = scan_chi_roots(spec, gridN, 1e-8);
    benchmark::DoNotOptimize(scan.roots.data());
  }
}
BENCHMARK(BM_ChiRootScan)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BalanceConjugate(benchmark::State& state) {
  ModelSpec spec = h2_cycle();
  double y = 4.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(H_conjugate(spec, y));
  }
}
BENCHMARK(BM_BalanceConjugate);

void BM_ReturnMapLoop(benchmark::State& state) {
  ModelSpec spec = h2_cycle();
  for (auto _ : state) {
    benchmark::DoNotOptimize(isocline_return_map(spec, 1e-2, 2.3, 1e-8));
  }
}
BENCHMARK(BM_ReturnMapLoop)->Unit(benchmark::kMillisecond);

void BM_HausdorffDistance(benchmark::State& state) {
  // Two offset ellipse-ish polylines with the sample counts a measured
  // loop typically carries.
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<geometry::Point> a, b;
  a.reserve(n);
  b.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = 6.283185307179586 * static_cast<double>(i) /
               static_cast<double>(n - 1);
    a.push_back({2.0 * std::cos(t), std::sin(t)});
    b.push_back({2.0 * std::cos(t) + 0.05, 1.1 * std::sin(t)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::hausdorff_distance(a, b));
  }
}
BENCHMARK(BM_HausdorffDistance)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
