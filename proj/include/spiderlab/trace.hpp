#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spiderlab/graph.hpp"

namespace spiderlab {

struct FetchEvent {
    std::size_t t = 0;
    PageId page = 0;
    int depth = 0;
    bool is_new_target = false;
};

/// Ordered record of one spider run. Every metric is computed from this.
struct SpiderTrace {
    PageId start = 0;
    std::string strategy;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    int max_depth = 0;
    /// Training targets fetched during the run; never counted as hits.
    std::size_t contamination = 0;
    std::vector<FetchEvent> events;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
    std::size_t hits() const;
};

} // namespace spiderlab
