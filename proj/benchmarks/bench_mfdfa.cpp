#include <benchmark/benchmark.h>

#include <mfstream/mfdfa.hpp>
#include <mfstream/synth.hpp>

using namespace mfstream;

static void BM_Profile(benchmark::State& state) {
    const auto series = white_noise(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        auto prof = profile(series);
        benchmark::DoNotOptimize(prof.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Profile)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

static void BM_SegmentVariances(benchmark::State& state) {
    const auto series = white_noise(1 << 16, 2);
    const auto prof = profile(series);
    const int scale = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto variances = segment_variances(prof, scale, 1);
        benchmark::DoNotOptimize(variances.data());
    }
}
BENCHMARK(BM_SegmentVariances)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

static void BM_SegmentVariancesOrder(benchmark::State& state) {
    const auto series = white_noise(1 << 16, 2);
    const auto prof = profile(series);
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto variances = segment_variances(prof, 128, order);
        benchmark::DoNotOptimize(variances.data());
    }
}
BENCHMARK(BM_SegmentVariancesOrder)->DenseRange(1, 3);

static void BM_SpectrumCascade(benchmark::State& state) {
    const auto series = binomial_cascade({0.75, static_cast<int>(state.range(0))});
    const MfdfaConfig config;
    for (auto _ : state) {
        auto result = spectrum(series, config);
        benchmark::DoNotOptimize(result.spectrum->h.data());
    }
    state.SetComplexityN(static_cast<std::int64_t>(series.size()));
}
BENCHMARK(BM_SpectrumCascade)->DenseRange(10, 16, 2)->Complexity();

static void BM_SpectrumThreads(benchmark::State& state) {
    const auto series = binomial_cascade({0.75, 16});
    MfdfaConfig config;
    config.threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto result = spectrum(series, config);
        benchmark::DoNotOptimize(result.spectrum->h.data());
    }
}
BENCHMARK(BM_SpectrumThreads)->Arg(1)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
