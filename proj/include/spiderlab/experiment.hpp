#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spiderlab/eval.hpp"
#include "spiderlab/graph.hpp"
#include "spiderlab/labeling.hpp"
#include "spiderlab/ranker.hpp"
#include "spiderlab/spider.hpp"
#include "spiderlab/text.hpp"

namespace spiderlab {

/// One experiment: inputs, learning settings, spider settings and evaluation settings.
struct ExperimentSpec {
    std::string corpus = "corpus.jsonl";
    std::string targets = "targets.json";
    std::string class_id;              // empty: the only class in the targets file
    std::string dictionary = "dictionary.tsv";
    std::string model = "model.txt";

    std::size_t dict_cap = 10000;
    int ig_label_depth = 1;            // IG positives: depth label <= this

    int harvest_depth = 4;
    double gamma = 0.5;
    int horizon = -1;                  // -1: same as harvest_depth

    Objective objective = Objective::Depth;
    double lambda = 1e-4;
    std::size_t epochs = 20;
    double epsilon = 0.1;

    std::vector<std::string> strategies{"random", "bfs", "dfs", "gold-depth", "gold-discount", "model-parent"};
    Inheritance inheritance = Inheritance::Parent; // for a bare "model" entry
    std::size_t budget = 20000;
    int max_depth = 40;

    int k_away = 4;
    std::size_t start_count = 30;
    std::size_t repeats = 20;
    std::uint64_t seed = 1;

    void validate() const;
    int effective_horizon() const { return horizon < 0 ? harvest_depth : horizon; }
    TrainParams train_params() const;
    CompareConfig compare_config(int threads = 0) const;
    /// The strategy list with bare "model" resolved through inheritance.
    std::vector<Strategy> parsed_strategies() const;

    /// key=value lines, '#' comments. Unknown keys throw LoadError.
    static ExperimentSpec parse(std::istream& in);
    static ExperimentSpec load(const std::filesystem::path& path);
    /// Returns false if key is not a spec field; throws ArgumentError on a bad value.
    bool set(const std::string& key, const std::string& value);
    /// Every field as key=value in a fixed order. Relative paths are written as given.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Graph plus targets for one experiment.
struct ExperimentData {
    WebGraph graph;
    TargetSet targets;
};

ExperimentData load_experiment_data(const ExperimentSpec& spec);

/// Everything the training stage produces.
struct TrainedRanker {
    Dictionary dictionary;
    LinearModel model;
    std::vector<TrainingExample> examples;
    ModelReport fit;                 // on the training examples
    std::size_t harvested = 0;
};

/// Harvest the training cone, label it, build and IG-reduce the dictionary, train the model.
TrainedRanker train_ranker(const WebGraph& g, const TargetSet& targets, const ExperimentSpec& spec);

/// Strategy list of the spec with estimators. Model strategies need a trained ranker.
std::vector<StrategySpec> build_strategies(const WebGraph& g, const TargetSet& targets, const ExperimentSpec& spec,
                                           const TrainedRanker* ranker);

/// select_starts + compare_strategies for the spec.
ComparisonReport run_comparison(const WebGraph& g, const TargetSet& targets, const ExperimentSpec& spec,
                                const TrainedRanker* ranker, int threads = 0);

/// Resolved spec entries as report header pairs.
std::vector<std::pair<std::string, std::string>> spec_header(const ExperimentSpec& spec);

/// Prints comparison.csv and summary.csv from a report directory as aligned text tables.
void render_report(const std::filesystem::path& dir, std::ostream& out);

} // namespace spiderlab
