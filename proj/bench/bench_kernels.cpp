// Parallel kernels against their serial references on a 20k-page generated corpus.

#include <benchmark/benchmark.h>

#include <memory>
#include <sstream>

#include "spiderlab/corpus_gen.hpp"
#include "spiderlab/eval.hpp"
#include "spiderlab/labeling.hpp"
#include "spiderlab/ranker.hpp"
#include "spiderlab/text.hpp"

using namespace spiderlab;

namespace {

struct Fixture {
    WebGraph graph;
    TargetSet targets;
    Dictionary dict;
    std::vector<TermVector> vectors;
    LinearModel model;
    std::vector<PageId> starts;
    std::vector<StrategySpec> strategies;
};

const Fixture& fixture() {
    static const auto f = [] {
        auto out = std::make_unique<Fixture>();
        GenConfig cfg;
        cfg.n_pages = 20000;
        cfg.alpha = 0.85;
        cfg.target_fraction = 0.075;
        const auto gen = generate(cfg);
        std::istringstream corpus(gen.corpus), targets(gen.targets);
        out->graph = WebGraph(parse_corpus(corpus));
        out->targets = parse_targets(targets, out->graph);
        std::vector<Tokens> docs;
        for (PageId p = 0; p < out->graph.size(); ++p)
            docs.push_back(tokenize(out->graph.page(p).text));
        out->dict = build_dictionary(docs);
        out->vectors = vectorize_pages(out->graph, out->dict);
        out->model.weights.assign(out->dict.size(), 0.0);
        for (std::size_t i = 0; i < out->model.weights.size(); ++i)
            out->model.weights[i] = static_cast<double>(i % 17) / 17.0 - 0.5;
        out->starts = select_starts(out->graph, out->targets, 4, 16, 1).starts;
        for (std::string name : {"random", "bfs", "gold-depth"}) {
            StrategySpec s{Strategy::parse(name), nullptr};
            if (name == "gold-depth")
                s.estimator = std::make_shared<const QualityEstimator>(
                    gold_depth_estimator(out->graph, out->targets.test, 10));
            out->strategies.push_back(s);
        }
        return out;
    }();
    return *f;
}

void BM_DiscountLabels(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(discount_labels(f.graph, f.targets.members, 0.5, 4));
}
void BM_DiscountLabelsSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(serial::discount_labels(f.graph, f.targets.members, 0.5, 4));
}

void BM_VectorizePages(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(vectorize_pages(f.graph, f.dict));
}
void BM_VectorizePagesSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(serial::vectorize_pages(f.graph, f.dict));
}

void BM_PredictAll(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(predict_all(f.model, f.vectors));
}
void BM_PredictAllSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(serial::predict_all(f.model, f.vectors));
}

CompareConfig compare_config() {
    CompareConfig c;
    c.budget = 2000;
    c.max_depth = 10;
    c.repeats = 4;
    return c;
}

void BM_CompareStrategies(benchmark::State& state) {
    const auto& f = fixture();
    const auto cfg = compare_config();
    for (auto _ : state)
        benchmark::DoNotOptimize(compare_strategies(f.graph, f.targets, f.starts, f.strategies, cfg));
}
void BM_CompareStrategiesSerial(benchmark::State& state) {
    const auto& f = fixture();
    const auto cfg = compare_config();
    for (auto _ : state)
        benchmark::DoNotOptimize(serial::compare_strategies(f.graph, f.targets, f.starts, f.strategies, cfg));
}

} // namespace

BENCHMARK(BM_DiscountLabels)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiscountLabelsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_VectorizePages)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_VectorizePagesSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PredictAll)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PredictAllSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CompareStrategies)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CompareStrategiesSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
