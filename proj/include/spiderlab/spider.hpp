#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "spiderlab/graph.hpp"
#include "spiderlab/ranker.hpp"
#include "spiderlab/rng.hpp"
#include "spiderlab/text.hpp"
#include "spiderlab/trace.hpp"

namespace spiderlab {

enum class StrategyKind { Random, BFS, DFS, GoldDepth, GoldDiscount, Model };

/// How an unfetched page gets a model score: from its best fetched parent, or from its own text.
enum class Inheritance { Parent, Self };

struct Strategy {
    StrategyKind kind = StrategyKind::Random;
    Inheritance inheritance = Inheritance::Parent;

    /// random, bfs, dfs, gold-depth, gold-discount, model-parent, model-self.
    std::string name() const;
    static Strategy parse(const std::string& name);

    bool randomized() const;
    bool greedy() const { return !randomized(); }
    /// Stable index of the kind, used for per-run seed derivation.
    std::size_t kind_index() const;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Per-page values that a greedy strategy ranks its fringe by.
struct QualityEstimator {
    std::vector<double> page_value;
    bool inherit_from_parent = false;
};

/// -(depth to nearest target within horizon); -inf when unreachable.
QualityEstimator gold_depth_estimator(const WebGraph& g, std::span<const PageId> targets, int horizon);
/// Discounted reward over targets within horizon.
QualityEstimator gold_discount_estimator(const WebGraph& g, std::span<const PageId> targets, double gamma,
                                         int horizon);
/// Model prediction of every page's own vector; scored through parents unless inheritance is Self.
QualityEstimator model_estimator(const LinearModel& m, std::span<const TermVector> page_vectors,
                                 Inheritance inheritance);

/// Score of an unfetched page: its own value, or the best value among its fetched parents.
double score_fringe_entry(const QualityEstimator& est, PageId page, std::span<const PageId> fetched_parents);

struct SpiderConfig {
    std::size_t budget = 20000;
    int max_depth = 40;
    Strategy strategy;
    std::uint64_t seed = 1;
    double gamma = 0.5;

    void validate() const;
};

struct FringeEntry {
    PageId page = 0;
    int depth = 0;
    double score = 0.0;
    double tie_break = 0.0;
};

/// Known but unfetched pages. Each page appears at most once.
class Fringe {
public:
    Fringe(std::size_t n_pages, StrategyKind rule, int max_depth);

    bool empty() const { return size_ == 0; }
    std::size_t size() const { return size_; }
    bool contains(PageId p) const { return in_fringe_[p]; }
    const FringeEntry& entry(PageId p) const { return entry_[p]; }

    void insert(const FringeEntry& e);
    /// Monotone max update of a fringe page's score.
    void raise_score(PageId p, double score);

    /// Removes and returns the next page. Random: uniform over all entries; BFS: uniform over
    /// the shallowest level; DFS: uniform over the deepest level; greedy: highest score, ties
    /// by higher tie_break then lower page id. Precondition: !empty().
    FringeEntry select_next(Rng& rng);

    std::vector<FringeEntry> entries() const;

private:
    struct HeapItem {
        double score;
        double tie_break;
        PageId page;
        bool operator<(const HeapItem& o) const {
            if (score != o.score)
                return score < o.score;
            if (tie_break != o.tie_break)
                return tie_break < o.tie_break;
            return page > o.page;
        }
    };

    void remove_from_pool(std::vector<PageId>& pool, PageId p);
    FringeEntry take(PageId p);

    StrategyKind rule_;
    std::size_t size_ = 0;
    std::vector<bool> in_fringe_;
    std::vector<FringeEntry> entry_;
    std::vector<std::uint32_t> slot_;          // position inside its pool
    std::vector<PageId> pool_;                 // Random
    std::vector<std::vector<PageId>> levels_;  // BFS / DFS, by depth
    std::priority_queue<HeapItem> heap_;       // greedy
};

/// Decides whether a fetched page is a target.
class TargetDetector {
public:
    static TargetDetector oracle(std::vector<PageId> ids);
    /// Cosine similarity of the page vector to the centroid at or above threshold.
    static TargetDetector similarity(TermVector centroid, double threshold, std::span<const TermVector> page_vectors);

    bool detect(PageId page) const;
    bool is_oracle() const { return oracle_; }

private:
    bool oracle_ = true;
    std::vector<PageId> ids_; // sorted
    TermVector centroid_;
    double threshold_ = 0.0;
    std::span<const TermVector> vectors_;
};

bool detect_target(const TermVector& page, const TermVector& centroid, double threshold);

/// L2-normalised mean of the given vectors.
TermVector centroid(std::span<const TermVector> vectors);

/// One spider run from start. Hits are first fetches of detected targets that are not training
/// targets; fetched training targets count as contamination. Greedy strategies need an estimator;
/// the detector defaults to an oracle over targets.test.
SpiderTrace run_spider(const WebGraph& g, PageId start, const TargetSet& targets, const SpiderConfig& cfg,
                       const QualityEstimator* estimator = nullptr, const TargetDetector* detector = nullptr);

/// Header lines start with '#'; then t<TAB>url<TAB>depth<TAB>hit per fetch.
void write_trace(std::ostream& out, const WebGraph& g, const SpiderTrace& trace);
SpiderTrace read_trace(std::istream& in, const WebGraph& g);

} // namespace spiderlab
