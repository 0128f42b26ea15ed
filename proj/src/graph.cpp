#include "spiderlab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "spiderlab/errors.hpp"
#include "spiderlab/trace.hpp"

namespace spiderlab {

using json = nlohmann::json;

WebGraph::WebGraph(std::vector<RawPage> raw) {
    pages_.reserve(raw.size());
    index_.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto [it, inserted] = index_.emplace(raw[i].url, static_cast<PageId>(i));
        if (!inserted)
            throw LoadError("duplicate url '" + raw[i].url + "'", i + 1);
    }

    in_adj_.resize(raw.size());
    std::vector<std::uint32_t> seen_mark(raw.size(), 0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        PageRecord rec;
        rec.id = static_cast<PageId>(i);
        rec.url = std::move(raw[i].url);
        rec.text = std::move(raw[i].text);
        const auto mark = static_cast<std::uint32_t>(i + 1);
        for (const auto& link : raw[i].outlinks) {
            auto it = index_.find(link);
            if (it == index_.end()) {
                ++dropped_;
                continue;
            }
            const PageId v = it->second;
            if (seen_mark[v] == mark)
                continue;
            seen_mark[v] = mark;
            rec.outlinks.push_back(v);
            in_adj_[v].push_back(rec.id);
        }
        edges_ += rec.outlinks.size();
        pages_.push_back(std::move(rec));
    }
}

std::optional<PageId> WebGraph::find(std::string_view url) const {
    auto it = index_.find(std::string(url));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

namespace {

bool sorted_contains(const std::vector<PageId>& v, PageId id) { return std::binary_search(v.begin(), v.end(), id); }

void sort_unique(std::vector<PageId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void check_ids(const WebGraph& g, std::span<const PageId> ids) {
    for (PageId id : ids)
        if (!g.contains(id))
            throw ArgumentError("unknown page id " + std::to_string(id));
}

} // namespace

bool TargetSet::is_member(PageId id) const { return sorted_contains(members, id); }
bool TargetSet::is_train(PageId id) const { return sorted_contains(train, id); }
bool TargetSet::is_test(PageId id) const { return sorted_contains(test, id); }

std::size_t ConeResult::size() const {
    return static_cast<std::size_t>(
        std::count_if(distance.begin(), distance.end(), [](int d) { return d != kUnreachable; }));
}

std::vector<PageId> ConeResult::members() const {
    std::vector<PageId> out;
    for (std::size_t i = 0; i < distance.size(); ++i)
        if (distance[i] != kUnreachable)
            out.push_back(static_cast<PageId>(i));
    return out;
}

std::size_t SpiderTrace::hits() const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [](const FetchEvent& e) { return e.is_new_target; }));
}

std::vector<RawPage> parse_corpus(std::istream& in) {
    std::vector<RawPage> pages;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        RawPage page;
        try {
            const json rec = json::parse(line);
            if (!rec.is_object())
                throw LoadError("record is not a JSON object", lineno);
            page.url = rec.at("url").get<std::string>();
            page.text = rec.value("text", std::string{});
            if (rec.contains("outlinks"))
                page.outlinks = rec.at("outlinks").get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw LoadError(std::string("malformed corpus record: ") + e.what(), lineno);
        }
        pages.push_back(std::move(page));
    }
    return pages;
}

WebGraph load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open corpus file " + path.string());
    try {
        return WebGraph(parse_corpus(in));
    } catch (const LoadError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

void write_corpus(std::ostream& out, std::span<const RawPage> pages) {
    for (const auto& p : pages) {
        json rec;
        rec["url"] = p.url;
        rec["text"] = p.text;
        rec["outlinks"] = p.outlinks;
        out << rec.dump() << '\n';
    }
}

TargetSet make_target_set(std::string class_id, std::vector<PageId> members, std::vector<PageId> train) {
    sort_unique(members);
    sort_unique(train);
    TargetSet ts;
    ts.class_id = std::move(class_id);
    for (PageId id : train)
        if (!std::binary_search(members.begin(), members.end(), id))
            throw ArgumentError("training target " + std::to_string(id) + " is not a class member");
    std::set_difference(members.begin(), members.end(), train.begin(), train.end(), std::back_inserter(ts.test));
    ts.members = std::move(members);
    ts.train = std::move(train);
    return ts;
}

TargetSet parse_targets(std::istream& in, const WebGraph& g, std::string_view class_id) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed targets file: ") + e.what());
    }
    if (!doc.is_object())
        throw LoadError("targets file must hold a JSON object");

    std::string chosen(class_id);
    if (chosen.empty()) {
        for (const auto& [key, value] : doc.items()) {
            if (key == "train")
                continue;
            if (!chosen.empty())
                throw LoadError("targets file holds several classes; select one");
            chosen = key;
        }
        if (chosen.empty())
            throw LoadError("targets file holds no target class");
    }
    if (!doc.contains(chosen))
        throw LoadError("targets file has no class '" + chosen + "'");

    auto resolve = [&](const json& arr, const char* what) {
        std::vector<PageId> ids;
        if (!arr.is_array())
            throw LoadError(std::string(what) + " must be an array of urls");
        for (const auto& u : arr) {
            if (!u.is_string())
                throw LoadError(std::string(what) + " must be an array of urls");
            auto id = g.find(u.get<std::string>());
            if (!id)
                throw LoadError(std::string(what) + " url '" + u.get<std::string>() + "' is not in the corpus");
            ids.push_back(*id);
        }
        return ids;
    };

    auto members = resolve(doc.at(chosen), "target");
    std::vector<PageId> train;
    if (doc.contains("train"))
        train = resolve(doc.at("train"), "train");
    try {
        return make_target_set(chosen, std::move(members), std::move(train));
    } catch (const ArgumentError& e) {
        throw LoadError(e.what());
    }
}

TargetSet load_targets(const std::filesystem::path& path, const WebGraph& g, std::string_view class_id) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open targets file " + path.string());
    try {
        return parse_targets(in, g, class_id);
    } catch (const LoadError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

void write_targets(std::ostream& out, const std::string& class_id, std::span<const std::string> members,
                   std::span<const std::string> train) {
    json doc = json::object();
    doc[class_id] = std::vector<std::string>(members.begin(), members.end());
    doc["train"] = std::vector<std::string>(train.begin(), train.end());
    out << doc.dump(1) << '\n';
}

std::vector<int> distances_to_targets(const WebGraph& g, std::span<const PageId> targets, int max_depth) {
    if (max_depth < 0)
        throw ArgumentError("max_depth must be non-negative");
    check_ids(g, targets);

    std::vector<int> dist(g.size(), kUnreachable);
    std::vector<PageId> frontier;
    for (PageId t : targets) {
        if (dist[t] == kUnreachable) {
            dist[t] = 0;
            frontier.push_back(t);
        }
    }
    std::vector<PageId> next;
    for (int level = 1; level <= max_depth && !frontier.empty(); ++level) {
        next.clear();
        for (PageId v : frontier)
            for (PageId u : g.in_links(v))
                if (dist[u] == kUnreachable) {
                    dist[u] = level;
                    next.push_back(u);
                }
        frontier.swap(next);
    }
    return dist;
}

std::vector<int> forward_distances(const WebGraph& g, PageId source, int max_depth) {
    if (!g.contains(source))
        throw ArgumentError("unknown page id " + std::to_string(source));
    std::vector<int> dist(g.size(), kUnreachable);
    dist[source] = 0;
    std::vector<PageId> frontier{source}, next;
    for (int level = 1; level <= max_depth && !frontier.empty(); ++level) {
        next.clear();
        for (PageId u : frontier)
            for (PageId v : g.out_links(u))
                if (dist[v] == kUnreachable) {
                    dist[v] = level;
                    next.push_back(v);
                }
        frontier.swap(next);
    }
    return dist;
}

ConeResult light_cone(const WebGraph& g, std::span<const PageId> apexes, int depth) {
    if (apexes.empty())
        throw ArgumentError("light cone needs at least one apex");
    return ConeResult{depth, distances_to_targets(g, apexes, depth)};
}

OverlapReport cone_overlap(const ConeResult& a, const ConeResult& b) {
    OverlapReport r;
    r.size_a = a.size();
    r.size_b = b.size();
    const std::size_t n = std::min(a.distance.size(), b.distance.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.distance[i] != kUnreachable && b.distance[i] != kUnreachable)
            ++r.intersection;
    r.fraction = r.size_a ? static_cast<double>(r.intersection) / static_cast<double>(r.size_a) : 0.0;
    return r;
}

double trace_region_overlap(const SpiderTrace& trace, const ConeResult& cone) {
    if (trace.empty())
        throw ArgumentError("trace overlap needs a nonempty trace");
    std::size_t inside = 0;
    for (const auto& e : trace.events)
        if (cone.contains(e.page))
            ++inside;
    return static_cast<double>(inside) / static_cast<double>(trace.events.size());
}

} // namespace spiderlab
