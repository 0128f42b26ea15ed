#include "spiderlab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "spiderlab/errors.hpp"
#include "spiderlab/ranker.hpp"
#include "spiderlab/rng.hpp"

namespace spiderlab {

// ---------------------------------------------------------------------------
// Trace metrics

double discounted_cumulative_reward(const SpiderTrace& trace, double gamma) {
    double s = 0.0;
    for (const auto& e : trace.events)
        if (e.is_new_target)
            s += std::pow(gamma, static_cast<double>(e.t));
    return s;
}

double log_dcr_score(const SpiderTrace& trace, const EvalConfig& cfg) {
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw ArgumentError("discount must be in (0, 1)");
    const double dcr = discounted_cumulative_reward(trace, cfg.gamma);
    if (dcr > 0.0)
        return std::log10(dcr);
    if (!cfg.log_floor)
        return -std::numeric_limits<double>::infinity();
    return static_cast<double>(cfg.budget) * std::log10(cfg.gamma);
}

std::size_t actions_to_first_target(const SpiderTrace& trace, std::size_t budget) {
    for (const auto& e : trace.events)
        if (e.is_new_target)
            return e.t;
    return budget;
}

std::vector<std::size_t> targets_found_curve(const SpiderTrace& trace, std::size_t budget) {
    std::vector<std::size_t> curve(budget, 0);
    std::size_t hits = 0;
    std::size_t t = 0;
    for (const auto& e : trace.events) {
        if (e.t >= budget)
            break;
        for (; t < e.t; ++t)
            curve[t] = hits;
        if (e.is_new_target)
            ++hits;
        curve[t++] = hits;
    }
    for (; t < budget; ++t)
        curve[t] = hits;
    return curve;
}

void DepthHistogram::add(const DepthHistogram& other) {
    for (const auto& [d, c] : other.pages)
        pages[d] += c;
    for (const auto& [d, c] : other.hits)
        hits[d] += c;
}

DepthHistogram depth_histogram(const SpiderTrace& trace) {
    DepthHistogram h;
    for (const auto& e : trace.events) {
        ++h.pages[e.depth];
        if (e.is_new_target)
            ++h.hits[e.depth];
    }
    return h;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test

double median(std::vector<double> xs) {
    if (xs.empty())
        return 0.0;
    const std::size_t n = xs.size();
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n / 2), xs.end());
    const double hi = xs[n / 2];
    if (n % 2 == 1)
        return hi;
    const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n / 2));
    return (lo + hi) / 2.0;
}

double wilcoxon_exact_p(std::span<const double> ranks, double w_plus) {
    // Average ranks are multiples of 1/2, so doubled ranks index an integer subset-sum table.
    std::vector<int> doubled;
    int total = 0;
    for (double r : ranks) {
        doubled.push_back(static_cast<int>(std::lround(2.0 * r)));
        total += doubled.back();
    }
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    int reach = 0;
    for (int r : doubled) {
        for (int s = reach; s >= 0; --s)
            if (ways[static_cast<std::size_t>(s)] != 0.0)
                ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
        reach += r;
    }
    const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
    const long w2 = std::lround(2.0 * w_plus);
    double upper = 0.0, lower = 0.0;
    for (int s = 0; s <= total; ++s) {
        if (s >= w2)
            upper += ways[static_cast<std::size_t>(s)];
        if (s <= w2)
            lower += ways[static_cast<std::size_t>(s)];
    }
    return std::min(1.0, 2.0 * std::min(upper, lower) / all);
}

double wilcoxon_normal_p(std::span<const double> ranks, double w_plus) {
    const double n = static_cast<double>(ranks.size());
    const double mean = n * (n + 1.0) / 4.0;
    double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    std::vector<double> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const double t = static_cast<double>(j - i);
        var -= (t * t * t - t) / 48.0;
        i = j;
    }
    if (var <= 0.0)
        return 1.0;
    const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> diffs) {
    if (diffs.empty())
        throw ArgumentError("signed-rank test needs at least one difference");
    WilcoxonResult r;
    r.median_diff = median(std::vector<double>(diffs.begin(), diffs.end()));
    r.mean_diff = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size());

    std::vector<double> nonzero;
    for (double d : diffs)
        if (d != 0.0)
            nonzero.push_back(d);
    r.n_effective = nonzero.size();
    if (nonzero.empty()) {
        r.p_two_sided = 1.0;
        return r;
    }
    std::vector<double> mags(nonzero.size());
    std::transform(nonzero.begin(), nonzero.end(), mags.begin(), [](double d) { return std::abs(d); });
    const auto ranks = average_ranks(mags);
    for (std::size_t i = 0; i < nonzero.size(); ++i)
        if (nonzero[i] > 0.0)
            r.w_plus += ranks[i];

    if (r.n_effective <= kExactWilcoxonLimit) {
        r.method = WilcoxonMethod::Exact;
        r.p_two_sided = wilcoxon_exact_p(ranks, r.w_plus);
    } else {
        r.method = WilcoxonMethod::NormalApproximation;
        r.p_two_sided = wilcoxon_normal_p(ranks, r.w_plus);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Start selection

StartSelection select_starts(const WebGraph& g, const TargetSet& targets, int k_away, std::size_t count,
                             std::uint64_t seed) {
    if (count < 1)
        throw ArgumentError("start count must be at least 1");
    if (k_away < 0)
        throw ArgumentError("k_away must be non-negative");
    const auto& ref = targets.test.empty() ? targets.members : targets.test;
    const auto dist = distances_to_targets(g, ref, k_away);
    std::vector<PageId> candidates;
    for (std::size_t p = 0; p < dist.size(); ++p)
        if (dist[p] == k_away)
            candidates.push_back(static_cast<PageId>(p));
    if (candidates.empty())
        throw ArgumentError("no page lies exactly k_away=" + std::to_string(k_away) + " from a test target");
    Rng rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    StartSelection out;
    out.short_of_count = candidates.size() < count;
    candidates.resize(std::min(count, candidates.size()));
    out.starts = std::move(candidates);
    return out;
}

// ---------------------------------------------------------------------------
// Strategy comparison

std::string to_string(Metric m) {
    switch (m) {
    case Metric::TargetsFound: return "targets_found";
    case Metric::LogDcr: return "log10_dcr";
    case Metric::ActionsToFirst: return "actions_to_first";
    }
    return "unknown";
}

const PairComparison& ComparisonReport::find(const std::string& a, const std::string& b, Metric m) const {
    const auto ia = strategy_index(a);
    const auto ib = strategy_index(b);
    for (const auto& p : pairs)
        if (p.a == ia && p.b == ib && p.metric == m)
            return p;
    throw ArgumentError("no comparison row for " + a + " vs " + b);
}

std::size_t ComparisonReport::strategy_index(const std::string& name) const {
    for (std::size_t i = 0; i < strategies.size(); ++i)
        if (strategies[i] == name)
            return i;
    throw ArgumentError("strategy '" + name + "' is not in the report");
}

namespace {

struct Job {
    std::size_t start = 0;
    std::size_t strategy = 0;
    std::size_t repeat = 0;
};

struct RunSummary {
    std::array<double, 3> metric{};
    std::vector<std::size_t> hit_times;
    DepthHistogram histogram;
    std::size_t contamination = 0;
};

RunSummary summarize(const SpiderTrace& trace, const CompareConfig& cfg, bool keep_histogram) {
    RunSummary s;
    const EvalConfig ec{cfg.gamma, cfg.budget, true};
    s.metric[0] = static_cast<double>(trace.hits());
    s.metric[1] = log_dcr_score(trace, ec);
    s.metric[2] = static_cast<double>(actions_to_first_target(trace, cfg.budget));
    for (const auto& e : trace.events)
        if (e.is_new_target)
            s.hit_times.push_back(e.t);
    if (keep_histogram)
        s.histogram = depth_histogram(trace);
    s.contamination = trace.contamination;
    return s;
}

void validate_compare(const WebGraph& g, std::span<const PageId> starts, std::span<const StrategySpec> strategies,
                      const CompareConfig& cfg) {
    if (starts.empty())
        throw ArgumentError("comparison needs at least one start page");
    if (strategies.size() < 2)
        throw ArgumentError("comparison needs at least two strategies");
    if (cfg.repeats < 1)
        throw ArgumentError("repeats must be at least 1");
    for (PageId s : starts)
        if (!g.contains(s))
            throw ArgumentError("start page " + std::to_string(s) + " is not in the graph");
    for (const auto& spec : strategies)
        if (spec.strategy.greedy() && !spec.estimator)
            throw ArgumentError("strategy " + spec.strategy.name() + " needs a quality estimator");
}

std::vector<Job> make_jobs(std::size_t n_starts, std::span<const StrategySpec> strategies, std::size_t repeats) {
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < n_starts; ++s)
        for (std::size_t k = 0; k < strategies.size(); ++k) {
            const std::size_t reps = strategies[k].strategy.randomized() ? repeats : 1;
            for (std::size_t r = 0; r < reps; ++r)
                jobs.push_back({s, k, r});
        }
    return jobs;
}

RunSummary run_job(const WebGraph& g, const TargetSet& targets, std::span<const PageId> starts,
                   std::span<const StrategySpec> strategies, const CompareConfig& cfg, const Job& job) {
    const auto& spec = strategies[job.strategy];
    SpiderConfig sc;
    sc.budget = cfg.budget;
    sc.max_depth = cfg.max_depth;
    sc.gamma = cfg.gamma;
    sc.strategy = spec.strategy;
    sc.seed = derive_seed(cfg.seed, job.start, spec.strategy.kind_index(), job.repeat);
    const auto trace = run_spider(g, starts[job.start], targets, sc, spec.estimator.get());
    return summarize(trace, cfg, job.repeat == 0);
}

/// Median over repeats, at each fetch index, of cumulative hits.
std::vector<double> median_curve_over_runs(const std::vector<const RunSummary*>& runs, std::size_t budget) {
    std::vector<double> curve(budget, 0.0);
    std::vector<std::size_t> cursor(runs.size(), 0);
    std::vector<double> counts(runs.size(), 0.0);
    for (std::size_t t = 0; t < budget; ++t) {
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const auto& ht = runs[r]->hit_times;
            while (cursor[r] < ht.size() && ht[cursor[r]] <= t)
                ++cursor[r];
            counts[r] = static_cast<double>(cursor[r]);
        }
        curve[t] = median(counts);
    }
    return curve;
}

ComparisonReport assemble(const WebGraph& g, std::span<const PageId> starts, std::span<const StrategySpec> strategies,
                          const CompareConfig& cfg, const std::vector<Job>& jobs,
                          const std::vector<RunSummary>& results) {
    (void)g;
    const std::size_t ns = starts.size();
    const std::size_t nk = strategies.size();
    ComparisonReport rep;
    rep.starts.assign(starts.begin(), starts.end());
    rep.runs = jobs.size();
    for (const auto& s : strategies)
        rep.strategies.push_back(s.strategy.name());
    rep.values.resize(nk);
    for (auto& v : rep.values)
        for (auto& m : v)
            m.assign(ns, 0.0);
    rep.histograms.resize(nk);
    rep.contamination.assign(nk, 0);
    rep.median_curve.resize(nk);

    // runs_of[strategy][start] -> summaries in repeat order
    std::vector<std::vector<std::vector<const RunSummary*>>> runs_of(nk, std::vector<std::vector<const RunSummary*>>(ns));
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        runs_of[jobs[j].strategy][jobs[j].start].push_back(&results[j]);
        rep.contamination[jobs[j].strategy] += results[j].contamination;
        if (jobs[j].repeat == 0)
            rep.histograms[jobs[j].strategy].add(results[j].histogram);
    }

    for (std::size_t k = 0; k < nk; ++k) {
        std::vector<std::vector<double>> per_start_curves;
        per_start_curves.reserve(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& runs = runs_of[k][s];
            for (std::size_t m = 0; m < 3; ++m) {
                std::vector<double> vals;
                for (const auto* r : runs)
                    vals.push_back(r->metric[m]);
                rep.values[k][m][s] = median(vals);
            }
            per_start_curves.push_back(median_curve_over_runs(runs, cfg.budget));
        }
        auto& curve = rep.median_curve[k];
        curve.assign(cfg.budget, 0.0);
        std::vector<double> at_t(ns);
        for (std::size_t t = 0; t < cfg.budget; ++t) {
            for (std::size_t s = 0; s < ns; ++s)
                at_t[s] = per_start_curves[s][t];
            curve[t] = median(at_t);
        }
    }

    for (std::size_t a = 0; a < nk; ++a)
        for (std::size_t b = a + 1; b < nk; ++b)
            for (std::size_t m = 0; m < 3; ++m) {
                std::vector<double> diffs(ns);
                for (std::size_t s = 0; s < ns; ++s)
                    diffs[s] = rep.values[a][m][s] - rep.values[b][m][s];
                PairComparison pc;
                pc.a = a;
                pc.b = b;
                pc.metric = kMetrics[m];
                pc.test = wilcoxon_signed_rank(diffs);
                rep.pairs.push_back(pc);
            }
    return rep;
}

[[noreturn]] void rethrow_for_start(const WebGraph& g, PageId start, std::exception_ptr err) {
    const std::string where = "run from start page " + g.page(start).url + " (id " + std::to_string(start) + ")";
    try {
        std::rethrow_exception(err);
    } catch (const std::exception& e) {
        throw std::runtime_error(where + " failed: " + e.what());
    }
}

} // namespace

ComparisonReport compare_strategies(const WebGraph& g, const TargetSet& targets, std::span<const PageId> starts,
                                    std::span<const StrategySpec> strategies, const CompareConfig& cfg) {
    validate_compare(g, starts, strategies, cfg);
    const auto jobs = make_jobs(starts.size(), strategies, cfg.repeats);
    std::vector<RunSummary> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs.size()); ++j) {
        const auto idx = static_cast<std::size_t>(j);
        try {
            results[idx] = run_job(g, targets, starts, strategies, cfg, jobs[idx]);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (std::size_t j = 0; j < jobs.size(); ++j)
        if (errors[j])
            rethrow_for_start(g, starts[jobs[j].start], errors[j]);
    return assemble(g, starts, strategies, cfg, jobs, results);
}

namespace serial {

ComparisonReport compare_strategies(const WebGraph& g, const TargetSet& targets, std::span<const PageId> starts,
                                    std::span<const StrategySpec> strategies, const CompareConfig& cfg) {
    validate_compare(g, starts, strategies, cfg);
    const auto jobs = make_jobs(starts.size(), strategies, cfg.repeats);
    std::vector<RunSummary> results;
    results.reserve(jobs.size());
    for (const auto& job : jobs) {
        try {
            results.push_back(run_job(g, targets, starts, strategies, cfg, job));
        } catch (...) {
            rethrow_for_start(g, starts[job.start], std::current_exception());
        }
    }
    return assemble(g, starts, strategies, cfg, jobs, results);
}

} // namespace serial

// ---------------------------------------------------------------------------
// Report files

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

std::ofstream open_report_file(const std::filesystem::path& path,
                               std::span<const std::pair<std::string, std::string>> header) {
    std::ofstream out(path);
    if (!out)
        throw LoadError("cannot write report file " + path.string());
    for (const auto& [k, v] : header)
        out << "# " << k << '=' << v << '\n';
    return out;
}

} // namespace

void write_report(const std::filesystem::path& dir, const ComparisonReport& report,
                  std::span<const std::pair<std::string, std::string>> header) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_report_file(dir / "comparison.csv", header);
        out << "# test=wilcoxon_signed_rank two_sided exact_up_to_n=" << kExactWilcoxonLimit << '\n';
        out << "strategy_a,strategy_b,metric,median_delta,mean_delta,p,n_effective\n";
        for (const auto& pc : report.pairs)
            out << report.strategies[pc.a] << ',' << report.strategies[pc.b] << ',' << to_string(pc.metric) << ','
                << num(pc.test.median_diff) << ',' << num(pc.test.mean_diff) << ',' << num(pc.test.p_two_sided)
                << ',' << pc.test.n_effective << '\n';
    }
    {
        auto out = open_report_file(dir / "summary.csv", header);
        out << "strategy,metric,median,mean,contamination\n";
        for (std::size_t k = 0; k < report.strategies.size(); ++k)
            for (std::size_t m = 0; m < 3; ++m) {
                const auto& v = report.values[k][m];
                const double mean = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
                out << report.strategies[k] << ',' << to_string(kMetrics[m]) << ',' << num(median(v)) << ','
                    << num(mean) << ',' << report.contamination[k] << '\n';
            }
    }
    for (std::size_t k = 0; k < report.strategies.size(); ++k) {
        {
            auto out = open_report_file(dir / ("curve_" + report.strategies[k] + ".csv"), header);
            out << "t,median_targets\n";
            for (std::size_t t = 0; t < report.median_curve[k].size(); ++t)
                out << t << ',' << num(report.median_curve[k][t]) << '\n';
        }
        {
            auto out = open_report_file(dir / ("hist_" + report.strategies[k] + ".csv"), header);
            out << "depth,pages,hits\n";
            const auto& h = report.histograms[k];
            for (const auto& [d, c] : h.pages) {
                auto it = h.hits.find(d);
                out << d << ',' << c << ',' << (it == h.hits.end() ? 0 : it->second) << '\n';
            }
        }
    }
}

} // namespace spiderlab
