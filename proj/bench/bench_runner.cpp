// Serial references against their OpenMP counterparts.

#include "ddstc/analysis.hpp"
#include "ddstc/harness.hpp"

#include <benchmark/benchmark.h>

using namespace ddstc;

namespace {

harness::SimConfig bench_config()
{
    harness::SimConfig c;
    c.min_errors = ~0ULL;
    c.min_streams = 1;
    c.max_bits = 64 * 3 * 256;
    c.streams_per_batch = 64;
    c.workers = 0;
    return c;
}

void BM_point_serial(benchmark::State& state)
{
    const auto cfg = bench_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(harness::run_point_serial(cfg, harness::Scheme::proposed, 0.3, 20.0));
    }
}

void BM_point_parallel(benchmark::State& state)
{
    const auto cfg = bench_config();
    for (auto _ : state) {
        benchmark::DoNotOptimize(harness::run_point(cfg, harness::Scheme::proposed, 0.3, 20.0));
    }
}

void BM_surface_serial(benchmark::State& state)
{
    analysis::SurfaceConfig cfg;
    cfg.tau_points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(analysis::snr_surface_serial(cfg));
    }
}

void BM_surface_parallel(benchmark::State& state)
{
    analysis::SurfaceConfig cfg;
    cfg.tau_points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(analysis::snr_surface(cfg));
    }
}

} // namespace

BENCHMARK(BM_point_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_point_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_surface_serial)->Arg(101)->Arg(1001)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_surface_parallel)->Arg(101)->Arg(1001)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
