// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "vertisplit/brkga.hpp"
#include "vertisplit/corr_metrics.hpp"
#include "vertisplit/split_correlation.hpp"
#include "vertisplit/split_importance.hpp"
#include "vertisplit/synthetic.hpp"

namespace {

using namespace vsplit;

void BM_ColumnCorrelationSerial(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const Matrix x = synthetic::latent_factors(1000, m, 5, 0.5, 1);
    for (auto _ : state) benchmark::DoNotOptimize(column_correlation_serial(x, x, CorrelationKind::spearman));
}
BENCHMARK(BM_ColumnCorrelationSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ColumnCorrelationParallel(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const Matrix x = synthetic::latent_factors(1000, m, 5, 0.5, 1);
    for (auto _ : state) benchmark::DoNotOptimize(column_correlation(x, x, CorrelationKind::spearman));
}
BENCHMARK(BM_ColumnCorrelationParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_IcorTable(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    const auto blocks = synthetic::independent_blocks(4, 25, 1000, 3);
    const IcorEvaluator eval(blocks.data.features, PcorOptions{});
    const auto part = PartyPartition::from_blocks(decode_keys(identity_keys(100)), default_counts(100, 4));
    for (auto _ : state) benchmark::DoNotOptimize(eval.icor(part, parallel));
}
BENCHMARK(BM_IcorTable)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_BrkgaGeneration(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    const auto blocks = synthetic::independent_blocks(3, 10, 400, 5);
    const IcorEvaluator eval(blocks.data.features, PcorOptions{});
    BrkgaConfig cfg;
    cfg.max_generations = 5;
    cfg.swap_polish = false;
    for (auto _ : state)
        benchmark::DoNotOptimize(optimize_extreme(eval, default_counts(30, 3), Direction::minimize, cfg, parallel));
}
BENCHMARK(BM_BrkgaGeneration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SwapPolish(benchmark::State& state) {
    const bool parallel = state.range(0) != 0;
    const auto blocks = synthetic::independent_blocks(3, 10, 400, 5);
    const IcorEvaluator eval(blocks.data.features, PcorOptions{});
    const auto counts = default_counts(30, 3);
    auto objective = [&](const std::vector<std::size_t>& p) { return icor_of_permutation(eval, p, counts); };
    const auto start = decode_keys(identity_keys(30));
    for (auto _ : state) benchmark::DoNotOptimize(swap_polish(objective, start, counts, parallel));
}
BENCHMARK(BM_SwapPolish)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ImportanceSplit(benchmark::State& state) {
    auto spec = DirichletSpec::symmetric(4, 1.0, 7);
    for (auto _ : state) {
        ++spec.seed;
        benchmark::DoNotOptimize(split_by_importance(static_cast<std::size_t>(state.range(0)), spec));
    }
}
BENCHMARK(BM_ImportanceSplit)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
