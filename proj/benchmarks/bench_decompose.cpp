#include <benchmark/benchmark.h>

#include <mfstream/decompose.hpp>
#include <mfstream/synth.hpp>

using namespace mfstream;

namespace {

SimulatedCorpus make_corpus(int days) {
    SimCorpusSpec spec;
    spec.days = days;
    spec.start_day = Day::parse("2016-01-01");
    spec.subtopics = {{"trade", 12.0, "", 0.0},
                      {"immigration", 9.0, "trade", 0.2},
                      {"unemployment", 4.0, "", 0.0},
                      {"taxes", 3.0, "", 0.0},
                      {"referendum", 15.0, "", 0.0}};
    spec.background_intensity = 18.0;
    spec.seed = 1;
    return simulate_corpus(spec);
}

}  // namespace

static void BM_MatchSubtopics(benchmark::State& state) {
    const auto sim = make_corpus(30);
    std::size_t i = 0;
    for (auto _ : state) {
        auto matched = match_subtopics(sim.corpus.docs[i % sim.corpus.size()], sim.queries);
        benchmark::DoNotOptimize(&matched);
        ++i;
    }
}
BENCHMARK(BM_MatchSubtopics);

static void BM_BuildDecomposition(benchmark::State& state) {
    const auto sim = make_corpus(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto result = build_decomposition(sim.corpus, sim.queries);
        benchmark::DoNotOptimize(result.main.values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.corpus.size()));
}
BENCHMARK(BM_BuildDecomposition)->Arg(30)->Arg(120)->Arg(365);

static void BM_ReducedStream(benchmark::State& state) {
    const auto sim = make_corpus(120);
    const auto result = build_decomposition(sim.corpus, sim.queries);
    for (auto _ : state) {
        auto reduced = reduced_stream(result, sim.corpus, sim.queries, 3);
        benchmark::DoNotOptimize(&reduced);
    }
}
BENCHMARK(BM_ReducedStream);
