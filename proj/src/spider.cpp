#include "spiderlab/spider.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "spiderlab/errors.hpp"
#include "spiderlab/labeling.hpp"

namespace spiderlab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::string Strategy::name() const {
    switch (kind) {
    case StrategyKind::Random: return "random";
    case StrategyKind::BFS: return "bfs";
    case StrategyKind::DFS: return "dfs";
    case StrategyKind::GoldDepth: return "gold-depth";
    case StrategyKind::GoldDiscount: return "gold-discount";
    case StrategyKind::Model: return inheritance == Inheritance::Parent ? "model-parent" : "model-self";
    }
    return "unknown";
}

Strategy Strategy::parse(const std::string& name) {
    if (name == "random") return {StrategyKind::Random};
    if (name == "bfs") return {StrategyKind::BFS};
    if (name == "dfs") return {StrategyKind::DFS};
    if (name == "gold-depth") return {StrategyKind::GoldDepth};
    if (name == "gold-discount") return {StrategyKind::GoldDiscount};
    if (name == "model" || name == "model-parent") return {StrategyKind::Model, Inheritance::Parent};
    if (name == "model-self") return {StrategyKind::Model, Inheritance::Self};
    throw ArgumentError("unknown strategy '" + name + "'");
}

bool Strategy::randomized() const {
    return kind == StrategyKind::Random || kind == StrategyKind::BFS || kind == StrategyKind::DFS;
}

std::size_t Strategy::kind_index() const {
    return static_cast<std::size_t>(kind) * 2 + (kind == StrategyKind::Model && inheritance == Inheritance::Self);
}

void SpiderConfig::validate() const {
    if (budget < 1)
        throw ArgumentError("budget must be at least 1");
    if (max_depth < 0)
        throw ArgumentError("max_depth must be non-negative");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ArgumentError("discount must be in (0, 1)");
}

QualityEstimator gold_depth_estimator(const WebGraph& g, std::span<const PageId> targets, int horizon) {
    const auto dist = distances_to_targets(g, targets, horizon);
    QualityEstimator est;
    est.page_value.resize(dist.size());
    for (std::size_t p = 0; p < dist.size(); ++p)
        est.page_value[p] = dist[p] == kUnreachable ? kNegInf : -static_cast<double>(dist[p]);
    return est;
}

QualityEstimator gold_discount_estimator(const WebGraph& g, std::span<const PageId> targets, double gamma,
                                         int horizon) {
    QualityEstimator est;
    est.page_value = discount_labels(g, targets, gamma, horizon);
    return est;
}

QualityEstimator model_estimator(const LinearModel& m, std::span<const TermVector> page_vectors,
                                 Inheritance inheritance) {
    QualityEstimator est;
    est.page_value = predict_all(m, page_vectors);
    est.inherit_from_parent = inheritance == Inheritance::Parent;
    return est;
}

double score_fringe_entry(const QualityEstimator& est, PageId page, std::span<const PageId> fetched_parents) {
    if (!est.inherit_from_parent)
        return est.page_value[page];
    double best = kNegInf;
    for (PageId p : fetched_parents)
        best = std::max(best, est.page_value[p]);
    return best;
}

// ---------------------------------------------------------------------------
// Fringe

Fringe::Fringe(std::size_t n_pages, StrategyKind rule, int max_depth)
    : rule_(rule), in_fringe_(n_pages, false), entry_(n_pages), slot_(n_pages, 0) {
    if (rule_ == StrategyKind::BFS || rule_ == StrategyKind::DFS)
        levels_.resize(static_cast<std::size_t>(std::max(max_depth, 0)) + 1);
}

void Fringe::insert(const FringeEntry& e) {
    if (in_fringe_[e.page])
        throw ArgumentError("page " + std::to_string(e.page) + " is already in the fringe");
    in_fringe_[e.page] = true;
    entry_[e.page] = e;
    ++size_;
    switch (rule_) {
    case StrategyKind::Random:
        slot_[e.page] = static_cast<std::uint32_t>(pool_.size());
        pool_.push_back(e.page);
        break;
    case StrategyKind::BFS:
    case StrategyKind::DFS: {
        if (e.depth < 0 || static_cast<std::size_t>(e.depth) >= levels_.size())
            throw ArgumentError("fringe entry depth outside the level range");
        auto& level = levels_[static_cast<std::size_t>(e.depth)];
        slot_[e.page] = static_cast<std::uint32_t>(level.size());
        level.push_back(e.page);
        break;
    }
    default:
        heap_.push({e.score, e.tie_break, e.page});
        break;
    }
}

void Fringe::raise_score(PageId p, double score) {
    if (!in_fringe_[p] || !(score > entry_[p].score))
        return;
    entry_[p].score = score;
    if (rule_ != StrategyKind::Random && rule_ != StrategyKind::BFS && rule_ != StrategyKind::DFS)
        heap_.push({score, entry_[p].tie_break, p});
}

void Fringe::remove_from_pool(std::vector<PageId>& pool, PageId p) {
    const auto s = slot_[p];
    const PageId last = pool.back();
    pool[s] = last;
    slot_[last] = s;
    pool.pop_back();
}

FringeEntry Fringe::take(PageId p) {
    in_fringe_[p] = false;
    --size_;
    return entry_[p];
}

FringeEntry Fringe::select_next(Rng& rng) {
    if (empty())
        throw ArgumentError("select_next on an empty fringe");
    switch (rule_) {
    case StrategyKind::Random: {
        const PageId p = pool_[std::uniform_int_distribution<std::size_t>(0, pool_.size() - 1)(rng)];
        remove_from_pool(pool_, p);
        return take(p);
    }
    case StrategyKind::BFS:
    case StrategyKind::DFS: {
        std::vector<PageId>* level = nullptr;
        if (rule_ == StrategyKind::BFS) {
            for (auto& l : levels_)
                if (!l.empty()) {
                    level = &l;
                    break;
                }
        } else {
            for (auto it = levels_.rbegin(); it != levels_.rend(); ++it)
                if (!it->empty()) {
                    level = &*it;
                    break;
                }
        }
        const PageId p = (*level)[std::uniform_int_distribution<std::size_t>(0, level->size() - 1)(rng)];
        remove_from_pool(*level, p);
        return take(p);
    }
    default:
        while (true) {
            const HeapItem top = heap_.top();
            heap_.pop();
            if (in_fringe_[top.page] && top.score == entry_[top.page].score)
                return take(top.page);
        }
    }
}

std::vector<FringeEntry> Fringe::entries() const {
    std::vector<FringeEntry> out;
    for (std::size_t p = 0; p < in_fringe_.size(); ++p)
        if (in_fringe_[p])
            out.push_back(entry_[p]);
    return out;
}

// ---------------------------------------------------------------------------
// Target detection

TargetDetector TargetDetector::oracle(std::vector<PageId> ids) {
    TargetDetector d;
    std::sort(ids.begin(), ids.end());
    d.ids_ = std::move(ids);
    return d;
}

TargetDetector TargetDetector::similarity(TermVector centroid, double threshold,
                                          std::span<const TermVector> page_vectors) {
    TargetDetector d;
    d.oracle_ = false;
    d.centroid_ = std::move(centroid);
    d.threshold_ = threshold;
    d.vectors_ = page_vectors;
    return d;
}

bool TargetDetector::detect(PageId page) const {
    if (oracle_)
        return std::binary_search(ids_.begin(), ids_.end(), page);
    return page < vectors_.size() && detect_target(vectors_[page], centroid_, threshold_);
}

bool detect_target(const TermVector& page, const TermVector& centroid, double threshold) {
    if (page.empty() || centroid.empty())
        return false;
    return dot(page, centroid) >= threshold;
}

TermVector centroid(std::span<const TermVector> vectors) {
    std::vector<std::pair<std::uint32_t, double>> acc;
    for (const auto& v : vectors)
        for (const auto& e : v.entries)
            acc.emplace_back(e.index, e.weight);
    std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    TermVector c;
    for (const auto& [idx, w] : acc) {
        if (!c.entries.empty() && c.entries.back().index == idx)
            c.entries.back().weight += w;
        else
            c.entries.push_back({idx, w});
    }
    std::erase_if(c.entries, [](const TermWeight& e) { return !(e.weight > 0.0); });
    const double n = c.norm();
    for (auto& e : c.entries)
        e.weight /= n;
    return c;
}

// ---------------------------------------------------------------------------
// Search loop

SpiderTrace run_spider(const WebGraph& g, PageId start, const TargetSet& targets, const SpiderConfig& cfg,
                       const QualityEstimator* estimator, const TargetDetector* detector) {
    cfg.validate();
    if (!g.contains(start))
        throw ArgumentError("start page " + std::to_string(start) + " is not in the graph");
    const bool greedy = cfg.strategy.greedy();
    if (greedy && (estimator == nullptr || estimator->page_value.size() != g.size()))
        throw ArgumentError("strategy " + cfg.strategy.name() + " needs a quality estimator for every page");

    TargetDetector oracle;
    if (detector == nullptr) {
        oracle = TargetDetector::oracle(targets.test);
        detector = &oracle;
    }

    Rng rng(cfg.seed);
    SpiderTrace trace;
    trace.start = start;
    trace.strategy = cfg.strategy.name();
    trace.seed = cfg.seed;
    trace.budget = cfg.budget;
    trace.max_depth = cfg.max_depth;
    trace.events.reserve(std::min(cfg.budget, g.size()));

    const StrategyKind rule = greedy ? StrategyKind::GoldDepth : cfg.strategy.kind;
    Fringe fringe(g.size(), rule, cfg.max_depth);
    std::vector<bool> fetched(g.size(), false);
    const bool inherit = greedy && estimator->inherit_from_parent;

    auto fetch = [&](PageId p, int depth) {
        fetched[p] = true;
        FetchEvent ev;
        ev.t = trace.events.size();
        ev.page = p;
        ev.depth = depth;
        if (targets.is_train(p))
            ++trace.contamination;
        else
            ev.is_new_target = detector->detect(p);
        trace.events.push_back(ev);

        if (depth >= cfg.max_depth)
            return;
        const double parent_value = inherit ? estimator->page_value[p] : 0.0;
        for (PageId c : g.out_links(p)) {
            if (fetched[c])
                continue;
            if (fringe.contains(c)) {
                if (inherit)
                    fringe.raise_score(c, parent_value);
                continue;
            }
            FringeEntry e;
            e.page = c;
            e.depth = depth + 1;
            if (greedy) {
                e.score = inherit ? parent_value : estimator->page_value[c];
                e.tie_break = uniform01(rng);
            }
            fringe.insert(e);
        }
    };

    fetch(start, 0);
    while (trace.events.size() < cfg.budget && !fringe.empty()) {
        const FringeEntry next = fringe.select_next(rng);
        fetch(next.page, next.depth);
    }
    return trace;
}

void write_trace(std::ostream& out, const WebGraph& g, const SpiderTrace& trace) {
    out << "# start=" << g.page(trace.start).url << '\n'
        << "# strategy=" << trace.strategy << '\n'
        << "# seed=" << trace.seed << '\n'
        << "# budget=" << trace.budget << '\n'
        << "# max_depth=" << trace.max_depth << '\n'
        << "# contamination=" << trace.contamination << '\n';
    for (const auto& e : trace.events)
        out << e.t << '\t' << g.page(e.page).url << '\t' << e.depth << '\t' << (e.is_new_target ? 1 : 0) << '\n';
}

SpiderTrace read_trace(std::istream& in, const WebGraph& g) {
    SpiderTrace trace;
    std::string line;
    std::size_t lineno = 0;
    bool have_start = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            try {
                if (key == "start") {
                    auto id = g.find(value);
                    if (!id)
                        throw LoadError("trace start url '" + value + "' is not in the corpus", lineno);
                    trace.start = *id;
                    have_start = true;
                } else if (key == "strategy") {
                    trace.strategy = value;
                } else if (key == "seed") {
                    trace.seed = std::stoull(value);
                } else if (key == "budget") {
                    trace.budget = std::stoull(value);
                } else if (key == "max_depth") {
                    trace.max_depth = std::stoi(value);
                } else if (key == "contamination") {
                    trace.contamination = std::stoull(value);
                }
            } catch (const LoadError&) {
                throw;
            } catch (const std::exception&) {
                throw LoadError("malformed trace header '" + key + "'", lineno);
            }
            continue;
        }
        std::istringstream ls(line);
        FetchEvent e;
        std::string url;
        int hit = 0;
        if (!(ls >> e.t >> url >> e.depth >> hit))
            throw LoadError("malformed trace event", lineno);
        auto id = g.find(url);
        if (!id)
            throw LoadError("trace url '" + url + "' is not in the corpus", lineno);
        e.page = *id;
        e.is_new_target = hit != 0;
        trace.events.push_back(e);
    }
    if (!have_start && !trace.events.empty())
        trace.start = trace.events.front().page;
    return trace;
}

} // namespace spiderlab
