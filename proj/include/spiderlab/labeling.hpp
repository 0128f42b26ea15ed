#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "spiderlab/graph.hpp"
#include "spiderlab/text.hpp"

namespace spiderlab {

/// A supervised (page, label) pair from the exploratory phase.
struct TrainingExample {
    PageId page = 0;
    TermVector vector;
    int depth_label = kUnreachable;
    double discount_label = 0.0;
};

/// The training light-cone: every page with a path of length <= depth to a training target.
std::vector<PageId> harvest_region(const WebGraph& g, std::span<const PageId> train_targets, int depth);

/// Shortest path length from page to its nearest target, or kUnreachable beyond horizon.
int depth_label(const WebGraph& g, PageId page, std::span<const PageId> targets, int horizon);

/// Sum over targets t within horizon of gamma^d(page, t).
double discount_label(const WebGraph& g, PageId page, std::span<const PageId> targets, double gamma, int horizon);

/// discount_label for every page at once: one reverse BFS per target, run in parallel.
/// Per-page distance histograms are reduced with integer adds, so the result does not
/// depend on the thread count.
std::vector<double> discount_labels(const WebGraph& g, std::span<const PageId> targets, double gamma, int horizon);

/// vectorize(tokenize(text)) for every page, in parallel.
std::vector<TermVector> vectorize_pages(const WebGraph& g, const Dictionary& dict);

namespace serial {
std::vector<double> discount_labels(const WebGraph& g, std::span<const PageId> targets, double gamma, int horizon);
std::vector<TermVector> vectorize_pages(const WebGraph& g, const Dictionary& dict);
} // namespace serial

/// One example per page of the training light-cone (page-id order); labels against
/// train_targets only. horizon < 0 means horizon = depth.
std::vector<TrainingExample> build_training_set(const WebGraph& g, std::span<const PageId> train_targets, int depth,
                                                const Dictionary& dict, double gamma, int horizon = -1);

void write_training_set(std::ostream& out, std::span<const TrainingExample> examples);
std::vector<TrainingExample> read_training_set(std::istream& in);

} // namespace spiderlab
