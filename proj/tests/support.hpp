#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "spiderlab/graph.hpp"

namespace testsupport {

using spiderlab::PageId;
using spiderlab::RawPage;
using spiderlab::WebGraph;

inline std::string url(std::size_t i) { return "u" + std::to_string(i); }

inline WebGraph graph_from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<RawPage> raw(n);
    for (std::size_t i = 0; i < n; ++i)
        raw[i].url = url(i);
    for (auto [a, b] : edges)
        raw[a].outlinks.push_back(url(b));
    return WebGraph(std::move(raw));
}

/// Erdos-Renyi style directed graph: each ordered pair linked with probability mean_out / (n - 1).
inline WebGraph random_graph(std::size_t n, double mean_out, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution link(n > 1 ? std::min(1.0, mean_out / static_cast<double>(n - 1)) : 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && link(rng))
                edges.emplace_back(a, b);
    return graph_from_edges(n, edges);
}

/// Unbounded single-source forward BFS over outlinks; -1 when unreachable.
inline std::vector<int> forward_bfs(const WebGraph& g, PageId src) {
    std::vector<int> d(g.size(), -1);
    std::queue<PageId> q;
    d[src] = 0;
    q.push(src);
    while (!q.empty()) {
        PageId u = q.front();
        q.pop();
        for (PageId v : g.page(u).outlinks)
            if (d[v] < 0) {
                d[v] = d[u] + 1;
                q.push(v);
            }
    }
    return d;
}

/// Per-node oracle: minimum over targets of the forward BFS distance, -1 beyond max_depth.
inline std::vector<int> oracle_distances(const WebGraph& g, const std::vector<PageId>& targets, int max_depth) {
    std::vector<int> out(g.size(), -1);
    for (PageId p = 0; p < g.size(); ++p) {
        const auto d = forward_bfs(g, p);
        int best = -1;
        for (PageId t : targets)
            if (d[t] >= 0 && (best < 0 || d[t] < best))
                best = d[t];
        out[p] = best >= 0 && best <= max_depth ? best : -1;
    }
    return out;
}

inline std::vector<PageId> random_subset(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<PageId> ids(n);
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = static_cast<PageId>(i);
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(k, n));
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace testsupport
