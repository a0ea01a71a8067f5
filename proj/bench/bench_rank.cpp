// Serial reference against the OpenMP kernels for ranking and training.
// Run with --benchmark_filter=... to pick a subset; OMP_NUM_THREADS sets
// the parallel width.

#include "profcat/indexer.hpp"
#include "profcat/trainer.hpp"

#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace profcat;

namespace {

struct Fixture {
    Collection corpus = testing::make_synthetic({.categories = 50, .docs = 1000, .seed = 5});
    Model model = train(corpus, TrainParams{}, FeatureSpec::token(), {});
    std::vector<FeatureDoc> docs;

    Fixture()
    {
        for (const auto& d : corpus.docs)
            docs.push_back(prepare_document(d.body, FormatHint::plain, FeatureSpec::token(), {}, d.doc_id));
    }
};

const Fixture& fixture()
{
    static const Fixture f;
    return f;
}

Execution mode(const benchmark::State& state)
{
    return state.range(0) ? Execution::parallel : Execution::serial;
}

void rank_one(benchmark::State& state)
{
    const auto& f = fixture();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rank(f.docs[i % f.docs.size()], f.model, {}, 6, mode(state)));
        ++i;
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

void rank_many(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(rank_batch(f.docs, f.model, {}, 6, mode(state)));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.docs.size()));
}

void train_corpus(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(train(f.corpus, TrainParams{}, FeatureSpec::token(), {}, mode(state)));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.corpus.size()));
}

} // namespace

// Argument 0 is the serial reference, 1 the parallel kernel.
BENCHMARK(rank_one)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(rank_many)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(train_corpus)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
