#include <memory>
#include <numbers>

#include <benchmark/benchmark.h>

#include "reebpinch/connecting_ode.hpp"
#include "reebpinch/contact_dynamics.hpp"
#include "reebpinch/orbit_search.hpp"
#include "reebpinch/radial_profile.hpp"

using namespace reebpinch;

namespace {

const profile::CoreParams kCore = profile::make_core(1.5, 0.5, 0.8);

void BM_BuildProfile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(profile::build_profile(kCore));
}
BENCHMARK(BM_BuildProfile)->Unit(benchmark::kMillisecond);

void BM_VerifyProfile(benchmark::State& state) {
  const auto p = profile::build_profile(kCore);
  for (auto _ : state) benchmark::DoNotOptimize(profile::verify_profile(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_VerifyProfile)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_IntegrateConnecting(benchmark::State& state) {
  const auto H = std::make_shared<const profile::MonotoneHomotopy>(
      profile::certify(profile::build_profile(kCore)));
  for (auto _ : state) benchmark::DoNotOptimize(ode::integrate_connecting(H, 50.0, 1e-10));
}
BENCHMARK(BM_IntegrateConnecting)->Unit(benchmark::kMillisecond);

void BM_ReebFlowEllipsoid(benchmark::State& state) {
  const auto E = contact::StarshapedSurface::ellipsoid({1.0, 1.2});
  Vec x(4);
  x << 0.6, 0.0, 0.0, 0.96;
  for (auto _ : state) {
    benchmark::DoNotOptimize(contact::flow(E, E.project(x), 1.44 * std::numbers::pi, 1e-12));
  }
}
BENCHMARK(BM_ReebFlowEllipsoid)->Unit(benchmark::kMicrosecond);

void BM_VerifyPinchingEllipsoid(benchmark::State& state) {
  const auto E = contact::StarshapedSurface::ellipsoid({1.0, 1.2});
  search::SearchConfig cfg;
  cfg.seeds = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(search::verify_pinching_theorem(E, cfg));
}
BENCHMARK(BM_VerifyPinchingEllipsoid)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
