#include <cmath>
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "heatinv/bessel.hpp"
#include "heatinv/eigensystem.hpp"
#include "heatinv/forward.hpp"
#include "heatinv/inversion.hpp"
#include "heatinv/solvers.hpp"
#include "heatinv/sources.hpp"

using namespace heatinv;

namespace {

const std::vector<double> kAngles{0.0, 13.0 * std::numbers::pi / 32.0};

StepSource e1_q() { return StepSource({{0.0, 1.0}, {1.0 / 3.0, 1.0}, {2.0 / 3.0, -0.5}}); }

const EigenBasis& basis(double lambda_max) {
  static const EigenBasis b300 = enumerate_basis(300.0);
  static const EigenBasis b700 = enumerate_basis(700.0);
  return lambda_max <= 300.0 ? b300 : b700;
}

void BM_BesselJ(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel::j(m, x));
    x = x < 30.0 ? x + 0.37 : 0.1;
  }
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(5)->Arg(20);

void BM_BesselZeros(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bessel::zeros(3, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BesselZeros)->Arg(5)->Arg(20);

void BM_EnumerateBasis(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_basis(static_cast<double>(state.range(0))));
}
BENCHMARK(BM_EnumerateBasis)->Arg(300)->Arg(700)->Unit(benchmark::kMillisecond);

void BM_ProjectStar(benchmark::State& state) {
  const StarSource shape(0.5, {0.0, 0.2, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(project_star(shape, basis(300.0)));
}
BENCHMARK(BM_ProjectStar)->Unit(benchmark::kMillisecond);

void BM_AssemblePOperator(benchmark::State& state) {
  const TimeGrid grid(1.0, 0.01);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_p_operator(e1_q(), kAngles, grid, basis(700.0), n));
  }
}
BENCHMARK(BM_AssemblePOperator)->Arg(3)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_AssembleQOperator(benchmark::State& state) {
  const TimeGrid grid(1.0, 0.01);
  const SpectralSource p{Eigen::VectorXd::Ones(state.range(0)) / std::sqrt(double(state.range(0)))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_q_operator(p, kAngles, grid, basis(700.0)));
  }
}
BENCHMARK(BM_AssembleQOperator)->Arg(3)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_AlternateE1(benchmark::State& state) {
  Eigen::VectorXd pv(3);
  pv << 5.0, 2.0, 1.0;
  const SpectralSource p{pv / std::sqrt(30.0)};
  const auto data = synthesize(p, e1_q(), kAngles, TimeGrid(1.0, 0.01), basis(700.0), 0.01, 1);
  AlternatingConfig cfg;
  cfg.modes = 3;
  for (auto _ : state) benchmark::DoNotOptimize(alternate(data, cfg, basis(700.0), nullptr));
}
BENCHMARK(BM_AlternateE1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
