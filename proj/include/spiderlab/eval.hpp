#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spiderlab/graph.hpp"
#include "spiderlab/spider.hpp"
#include "spiderlab/trace.hpp"

namespace spiderlab {

struct EvalConfig {
    double gamma = 0.5;
    std::size_t budget = 20000;
    /// Hitless runs score budget * log10(gamma) instead of -inf.
    bool log_floor = true;
};

/// Sum over first-time target fetches of gamma^t.
double discounted_cumulative_reward(const SpiderTrace& trace, double gamma);
double log_dcr_score(const SpiderTrace& trace, const EvalConfig& cfg);
/// Fetch index of the first hit; budget when there is none.
std::size_t actions_to_first_target(const SpiderTrace& trace, std::size_t budget);
/// Element t is the number of hits at fetch indices <= t.
std::vector<std::size_t> targets_found_curve(const SpiderTrace& trace, std::size_t budget);

struct DepthHistogram {
    std::map<int, std::size_t> pages;
    std::map<int, std::size_t> hits;

    void add(const DepthHistogram& other);
};
DepthHistogram depth_histogram(const SpiderTrace& trace);

enum class WilcoxonMethod { Exact, NormalApproximation };

struct WilcoxonResult {
    std::size_t n_effective = 0;
    double w_plus = 0.0;
    double p_two_sided = 1.0;
    double median_diff = 0.0;
    double mean_diff = 0.0;
    WilcoxonMethod method = WilcoxonMethod::Exact;
};

/// Paired signed-rank test on differences. Zeros are dropped, ties get average ranks.
/// Exact null distribution up to 20 nonzero differences, otherwise the tie-corrected normal
/// approximation with continuity correction.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs);

/// Two-sided exact p for W+ = w_plus over the given (possibly tied) ranks.
double wilcoxon_exact_p(std::span<const double> ranks, double w_plus);
/// Two-sided normal-approximation p over the given ranks.
double wilcoxon_normal_p(std::span<const double> ranks, double w_plus);

inline constexpr std::size_t kExactWilcoxonLimit = 20;

double median(std::vector<double> xs);

struct StartSelection {
    std::vector<PageId> starts;
    /// Fewer pages than requested sat at exactly k_away.
    bool short_of_count = false;
};

/// Seeded uniform sample without replacement of pages exactly k_away from the nearest test target.
StartSelection select_starts(const WebGraph& g, const TargetSet& targets, int k_away, std::size_t count,
                             std::uint64_t seed);

enum class Metric { TargetsFound, LogDcr, ActionsToFirst };
inline constexpr std::array<Metric, 3> kMetrics{Metric::TargetsFound, Metric::LogDcr, Metric::ActionsToFirst};
std::string to_string(Metric m);

struct StrategySpec {
    Strategy strategy;
    std::shared_ptr<const QualityEstimator> estimator; // required for greedy strategies
};

struct CompareConfig {
    std::size_t budget = 20000;
    int max_depth = 40;
    double gamma = 0.5;
    std::size_t repeats = 20; // runs per start for randomized strategies
    std::uint64_t seed = 1;
    int threads = 0;          // 0: OpenMP default
};

struct PairComparison {
    std::size_t a = 0;
    std::size_t b = 0;
    Metric metric = Metric::TargetsFound;
    WilcoxonResult test; // on per-start differences a - b
};

struct ComparisonReport {
    std::vector<std::string> strategies;
    std::vector<PageId> starts;
    /// values[strategy][metric][start]; randomized strategies hold the median over repeats.
    std::vector<std::array<std::vector<double>, 3>> values;
    /// All pairs (a, b) with a < b in strategy order, for each metric.
    std::vector<PairComparison> pairs;
    /// median_curve[strategy][t], median over starts of targets found by fetch t.
    std::vector<std::vector<double>> median_curve;
    /// Summed over starts, first repeat only, so strategies are comparable.
    std::vector<DepthHistogram> histograms;
    std::vector<std::size_t> contamination; // per strategy, summed over all runs
    std::size_t runs = 0;

    const PairComparison& find(const std::string& a, const std::string& b, Metric m) const;
    std::size_t strategy_index(const std::string& name) const;
};

/// Runs every strategy from every start (repeats for randomized ones) in parallel and pairs
/// the results by start page. Output does not depend on the thread count.
ComparisonReport compare_strategies(const WebGraph& g, const TargetSet& targets, std::span<const PageId> starts,
                                    std::span<const StrategySpec> strategies, const CompareConfig& cfg);

namespace serial {
ComparisonReport compare_strategies(const WebGraph& g, const TargetSet& targets, std::span<const PageId> starts,
                                    std::span<const StrategySpec> strategies, const CompareConfig& cfg);
}

/// Writes comparison.csv, summary.csv, curve_<strategy>.csv and hist_<strategy>.csv into dir.
/// header lines are emitted first in every file, prefixed with "# ".
void write_report(const std::filesystem::path& dir, const ComparisonReport& report,
                  std::span<const std::pair<std::string, std::string>> header);

} // namespace spiderlab
