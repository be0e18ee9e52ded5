// Serial vs OpenMP path loop on the coupled strong-error workload.

#include <benchmark/benchmark.h>

#include "nsdde/analysis.hpp"
#include "nsdde/path_kernels.hpp"
#include "nsdde/registry.hpp"

namespace {

nsdde::PathFn coupled_kernel(const nsdde::NeutralModel& model, const nsdde::InitialSegment& seg,
                             const nsdde::TimeGrid& fine, const nsdde::TimeGrid& coarse) {
    return [&model, &seg, fine, coarse](std::uint64_t path, std::span<double> samples,
                                        std::span<double>) {
        const nsdde::SeedPlan plan{42};
        const auto inc = nsdde::sample_brownian(fine, 1, plan, path);
        const auto x = nsdde::em_continuous_brownian(model, seg, fine, inc);
        const auto y = nsdde::em_continuous_brownian(model, seg, coarse, inc);
        double sup = 0.0;
        for (int j = 0; j <= fine.fine_steps(); ++j) sup = std::max(sup, (x.at(j) - y.at(j)).norm());
        samples[0] = sup * sup;
    };
}

struct Fixture {
    nsdde::NeutralModel model = nsdde::make_model("paper-eq-1.1");
    nsdde::InitialSegment seg = nsdde::make_segment({"constant", 0.1, 0.0}, 1, 1.0);
    nsdde::TimeGrid fine = nsdde::build_grid(1.0, 2.0, 256, 1);
    nsdde::TimeGrid coarse = nsdde::build_grid(1.0, 2.0, 16, 16);
};

void BM_PathsSerial(benchmark::State& state) {
    Fixture f;
    const auto fn = coupled_kernel(f.model, f.seg, f.fine, f.coarse);
    for (auto _ : state) {
        auto res = nsdde::run_paths_serial(state.range(0), {1, 0}, fn);
        benchmark::DoNotOptimize(res.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PathsOpenMP(benchmark::State& state) {
    Fixture f;
    const auto fn = coupled_kernel(f.model, f.seg, f.fine, f.coarse);
    for (auto _ : state) {
        auto res = nsdde::run_paths_parallel(state.range(0), {1, 0}, fn, 0);
        benchmark::DoNotOptimize(res.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_PathsSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PathsOpenMP)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
