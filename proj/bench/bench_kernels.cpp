// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <map>

#include "credcal/measures.hpp"
#include "credcal/optimizer.hpp"
#include "credcal/settest.hpp"
#include "credcal/synth.hpp"

using namespace credcal;

namespace {

const SyntheticDataset& dataset(std::size_t n) {
    static std::map<std::size_t, SyntheticDataset> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        ScenarioSpec spec;
        spec.scenario = Scenario::S1;
        spec.n = n;
        spec.seed = 1;
        it = cache.emplace(n, gen_scenario(spec)).first;
    }
    return it->second;
}

MeasureSpec measure(MeasureKind kind) {
    MeasureSpec s;
    s.kind = kind;
    return s;
}

void BM_SkceUqSerial(benchmark::State& state) {
    const auto& d = dataset(static_cast<std::size_t>(state.range(0)));
    const auto view = d.data.set().member(0).view();
    for (auto _ : state) benchmark::DoNotOptimize(skce_uq_serial(view, d.data.labels(), {2.0}));
}

void BM_SkceUqParallel(benchmark::State& state) {
    const auto& d = dataset(static_cast<std::size_t>(state.range(0)));
    const auto view = d.data.set().member(0).view();
    for (auto _ : state) benchmark::DoNotOptimize(skce_uq(view, d.data.labels(), {2.0}));
}

void BM_NullSerial(benchmark::State& state) {
    const auto& d = dataset(100);
    const auto spec = measure(static_cast<MeasureKind>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(null_distribution_serial(d.data.set(), spec, 100, 7));
}

void BM_NullParallel(benchmark::State& state) {
    const auto& d = dataset(100);
    const auto spec = measure(static_cast<MeasureKind>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(null_distribution(d.data.set(), spec, 100, 7));
}

void optimizer_case(benchmark::State& state, bool parallel) {
    const auto& d = dataset(100);
    const auto spec = measure(MeasureKind::EceConf);
    OptimizerConfig cfg;
    cfg.parallel_restarts = parallel;
    for (auto _ : state) benchmark::DoNotOptimize(min_calibration(d.data, spec, cfg).value);
}

void BM_OptimizerSerial(benchmark::State& state) { optimizer_case(state, false); }
void BM_OptimizerParallel(benchmark::State& state) { optimizer_case(state, true); }

}  // namespace

BENCHMARK(BM_SkceUqSerial)->Arg(100)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SkceUqParallel)->Arg(100)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_NullSerial)
    ->Arg(static_cast<int>(MeasureKind::EceConf))
    ->Arg(static_cast<int>(MeasureKind::SkceUl))
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NullParallel)
    ->Arg(static_cast<int>(MeasureKind::EceConf))
    ->Arg(static_cast<int>(MeasureKind::SkceUl))
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_OptimizerSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimizerParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
