#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spiderlab {

using PageId = std::uint32_t;

/// Distance value for pages outside a bounded search.
inline constexpr int kUnreachable = -1;

struct PageRecord {
    PageId id = 0;
    std::string url;
    std::string text;
    std::vector<PageId> outlinks;
};

/// A page as it appears in a corpus file, before url resolution.
struct RawPage {
    std::string url;
    std::string text;
    std::vector<std::string> outlinks;
};

/// Immutable directed web graph. Ids are file order, duplicate outlinks collapse,
/// and links to urls outside the corpus are dropped and counted.
class WebGraph {
public:
    WebGraph() = default;
    explicit WebGraph(std::vector<RawPage> raw);

    std::size_t size() const { return pages_.size(); }
    bool empty() const { return pages_.empty(); }
    bool contains(PageId id) const { return id < pages_.size(); }

    const PageRecord& page(PageId id) const { return pages_[id]; }
    const std::vector<PageRecord>& pages() const { return pages_; }
    std::span<const PageId> out_links(PageId id) const { return pages_[id].outlinks; }
    std::span<const PageId> in_links(PageId id) const { return in_adj_[id]; }

    std::optional<PageId> find(std::string_view url) const;
    std::size_t edge_count() const { return edges_; }
    std::size_t dropped_links() const { return dropped_; }

private:
    std::vector<PageRecord> pages_;
    std::vector<std::vector<PageId>> in_adj_;
    std::unordered_map<std::string, PageId> index_;
    std::size_t edges_ = 0;
    std::size_t dropped_ = 0;
};

/// Ground-truth target class. `train` and `test` partition `members`; all three sorted.
struct TargetSet {
    std::string class_id;
    std::vector<PageId> members;
    std::vector<PageId> train;
    std::vector<PageId> test;

    bool is_member(PageId id) const;
    bool is_train(PageId id) const;
    bool is_test(PageId id) const;
};

/// Pages with a directed path of length <= depth to an apex, keyed by distance.
struct ConeResult {
    int depth = 0;
    std::vector<int> distance; // dense by PageId, kUnreachable when outside

    bool contains(PageId id) const { return id < distance.size() && distance[id] != kUnreachable; }
    std::size_t size() const;
    std::vector<PageId> members() const;
};

struct OverlapReport {
    std::size_t intersection = 0;
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    double fraction = 0.0; // intersection / size_a, 0 when A is empty
};

// Corpus and targets files. One JSON object per line: {"url", "text", "outlinks"}.
std::vector<RawPage> parse_corpus(std::istream& in);
WebGraph load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const RawPage> pages);

/// Targets file: {"<class_id>": [urls...], "train": [urls...]}. With several classes, `class_id` selects one.
TargetSet parse_targets(std::istream& in, const WebGraph& g, std::string_view class_id = {});
TargetSet load_targets(const std::filesystem::path& path, const WebGraph& g, std::string_view class_id = {});
void write_targets(std::ostream& out, const std::string& class_id, std::span<const std::string> members,
                   std::span<const std::string> train);

/// Build a target set with an explicit train split; train must be a subset of members.
TargetSet make_target_set(std::string class_id, std::vector<PageId> members, std::vector<PageId> train);

/// Shortest directed distance from every page to its nearest target, bounded by max_depth.
/// Multi-source BFS over reverse adjacency.
std::vector<int> distances_to_targets(const WebGraph& g, std::span<const PageId> targets, int max_depth);

/// Forward BFS distances from one page, bounded by max_depth.
std::vector<int> forward_distances(const WebGraph& g, PageId source, int max_depth);

ConeResult light_cone(const WebGraph& g, std::span<const PageId> apexes, int depth);

OverlapReport cone_overlap(const ConeResult& a, const ConeResult& b);

struct SpiderTrace;
/// Fraction of a trace's fetched pages that lie inside the cone.
double trace_region_overlap(const SpiderTrace& trace, const ConeResult& cone);

} // namespace spiderlab
