#include "spiderlab/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>

#include "spiderlab/errors.hpp"

namespace spiderlab {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ArgumentError("discount must be in (0, 1)");
}

void check_page(const WebGraph& g, PageId page) {
    if (!g.contains(page))
        throw ArgumentError("unknown page id " + std::to_string(page));
}

/// Reverse BFS scratch reused across targets by one thread.
class ReverseBfs {
public:
    explicit ReverseBfs(std::size_t n) : dist_(n, kUnreachable) {}

    /// Calls visit(page, distance) for every page within horizon of target, target included.
    template <typename Visit>
    void run(const WebGraph& g, PageId target, int horizon, Visit&& visit) {
        for (PageId p : touched_)
            dist_[p] = kUnreachable;
        touched_.clear();
        dist_[target] = 0;
        touched_.push_back(target);
        visit(target, 0);
        std::size_t head = 0;
        while (head < touched_.size()) {
            const PageId v = touched_[head++];
            const int d = dist_[v];
            if (d >= horizon)
                continue;
            for (PageId u : g.in_links(v)) {
                if (dist_[u] != kUnreachable)
                    continue;
                dist_[u] = d + 1;
                touched_.push_back(u);
                visit(u, d + 1);
            }
        }
    }

private:
    std::vector<int> dist_;
    std::vector<PageId> touched_;
};

std::vector<double> histogram_to_discount(const std::vector<std::uint32_t>& counts, std::size_t n, int horizon,
                                          double gamma) {
    const auto width = static_cast<std::size_t>(horizon) + 1;
    std::vector<double> powers(width);
    for (std::size_t d = 0; d < width; ++d)
        powers[d] = std::pow(gamma, static_cast<double>(d));
    std::vector<double> out(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (std::size_t d = 0; d < width; ++d)
            s += static_cast<double>(counts[p * width + d]) * powers[d];
        out[p] = s;
    }
    return out;
}

void check_targets(const WebGraph& g, std::span<const PageId> targets) {
    for (PageId t : targets)
        check_page(g, t);
}

TermVector page_vector(const WebGraph& g, PageId p, const Dictionary& dict) {
    const auto tokens = tokenize(g.page(p).text);
    return vectorize(tokens, dict);
}

} // namespace

std::vector<PageId> harvest_region(const WebGraph& g, std::span<const PageId> train_targets, int depth) {
    if (depth < 1)
        throw ArgumentError("harvest depth must be at least 1");
    return light_cone(g, train_targets, depth).members();
}

int depth_label(const WebGraph& g, PageId page, std::span<const PageId> targets, int horizon) {
    check_page(g, page);
    check_targets(g, targets);
    if (horizon < 0)
        return kUnreachable;
    std::vector<bool> is_target(g.size(), false);
    for (PageId t : targets)
        is_target[t] = true;
    const auto dist = forward_distances(g, page, horizon);
    int best = kUnreachable;
    for (std::size_t p = 0; p < dist.size(); ++p)
        if (is_target[p] && dist[p] != kUnreachable && (best == kUnreachable || dist[p] < best))
            best = dist[p];
    return best;
}

double discount_label(const WebGraph& g, PageId page, std::span<const PageId> targets, double gamma, int horizon) {
    check_page(g, page);
    check_targets(g, targets);
    check_gamma(gamma);
    if (horizon < 0)
        return 0.0;
    std::vector<bool> is_target(g.size(), false);
    for (PageId t : targets)
        is_target[t] = true;
    const auto dist = forward_distances(g, page, horizon);
    double s = 0.0;
    for (std::size_t p = 0; p < dist.size(); ++p)
        if (is_target[p] && dist[p] != kUnreachable)
            s += std::pow(gamma, dist[p]);
    return s;
}

namespace {

std::vector<PageId> unique_targets(std::span<const PageId> targets) {
    std::vector<PageId> t(targets.begin(), targets.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

} // namespace

std::vector<double> discount_labels(const WebGraph& g, std::span<const PageId> targets, double gamma, int horizon) {
    check_gamma(gamma);
    check_targets(g, targets);
    if (horizon < 0)
        return std::vector<double>(g.size(), 0.0);
    const auto uniq = unique_targets(targets);
    const std::size_t n = g.size();
    const auto width = static_cast<std::size_t>(horizon) + 1;
    std::vector<std::uint32_t> counts(n * width, 0);

#pragma omp parallel
    {
        std::vector<std::uint32_t> local(n * width, 0);
        ReverseBfs bfs(n);
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(uniq.size()); ++i)
            bfs.run(g, uniq[static_cast<std::size_t>(i)], horizon,
                    [&](PageId p, int d) { ++local[p * width + static_cast<std::size_t>(d)]; });
#pragma omp critical
        for (std::size_t k = 0; k < counts.size(); ++k)
            counts[k] += local[k];
    }
    return histogram_to_discount(counts, n, horizon, gamma);
}

std::vector<TermVector> vectorize_pages(const WebGraph& g, const Dictionary& dict) {
    std::vector<TermVector> out(g.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(g.size()); ++p)
        out[static_cast<std::size_t>(p)] = page_vector(g, static_cast<PageId>(p), dict);
    return out;
}

namespace serial {

std::vector<double> discount_labels(const WebGraph& g, std::span<const PageId> targets, double gamma, int horizon) {
    check_gamma(gamma);
    check_targets(g, targets);
    if (horizon < 0)
        return std::vector<double>(g.size(), 0.0);
    const auto uniq = unique_targets(targets);
    const std::size_t n = g.size();
    const auto width = static_cast<std::size_t>(horizon) + 1;
    std::vector<std::uint32_t> counts(n * width, 0);
    ReverseBfs bfs(n);
    for (PageId t : uniq)
        bfs.run(g, t, horizon, [&](PageId p, int d) { ++counts[p * width + static_cast<std::size_t>(d)]; });
    return histogram_to_discount(counts, n, horizon, gamma);
}

std::vector<TermVector> vectorize_pages(const WebGraph& g, const Dictionary& dict) {
    std::vector<TermVector> out;
    out.reserve(g.size());
    for (PageId p = 0; p < g.size(); ++p)
        out.push_back(page_vector(g, p, dict));
    return out;
}

} // namespace serial

std::vector<TrainingExample> build_training_set(const WebGraph& g, std::span<const PageId> train_targets, int depth,
                                                const Dictionary& dict, double gamma, int horizon) {
    if (depth < 0)
        throw ArgumentError("harvest depth must be non-negative");
    check_gamma(gamma);
    if (horizon < 0)
        horizon = depth;
    const auto region = light_cone(g, train_targets, depth).members();
    const auto depths = distances_to_targets(g, train_targets, horizon);
    const auto discounts = discount_labels(g, train_targets, gamma, horizon);

    std::vector<TrainingExample> out(region.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(region.size()); ++i) {
        const PageId p = region[static_cast<std::size_t>(i)];
        auto& ex = out[static_cast<std::size_t>(i)];
        ex.page = p;
        ex.vector = page_vector(g, p, dict);
        ex.depth_label = depths[p];
        ex.discount_label = discounts[p];
    }
    return out;
}

void write_training_set(std::ostream& out, std::span<const TrainingExample> examples) {
    const auto old_precision = out.precision(17);
    for (const auto& ex : examples) {
        out << ex.page << '\t' << ex.depth_label << '\t' << ex.discount_label << '\t';
        bool first = true;
        for (const auto& e : ex.vector.entries) {
            if (!first)
                out << ',';
            first = false;
            out << e.index << ':' << e.weight;
        }
        out << '\n';
    }
    out.precision(old_precision);
}

std::vector<TrainingExample> read_training_set(std::istream& in) {
    std::vector<TrainingExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ls(line);
        TrainingExample ex;
        std::string vec;
        if (!(ls >> ex.page >> ex.depth_label >> ex.discount_label))
            throw LoadError("malformed training example", lineno);
        ls >> vec;
        std::istringstream vs(vec);
        std::string item;
        while (std::getline(vs, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw LoadError("malformed vector entry '" + item + "'", lineno);
            try {
                ex.vector.entries.push_back({static_cast<std::uint32_t>(std::stoul(item.substr(0, colon))),
                                             std::stod(item.substr(colon + 1))});
            } catch (const std::exception&) {
                throw LoadError("malformed vector entry '" + item + "'", lineno);
            }
        }
        out.push_back(std::move(ex));
    }
    return out;
}

} // namespace spiderlab
