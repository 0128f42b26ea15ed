// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "spiderlab/corpus_gen.hpp"
#include "spiderlab/eval.hpp"
#include "spiderlab/experiment.hpp"
#include "spiderlab/labeling.hpp"
#include "spiderlab/ranker.hpp"
#include "spiderlab/text.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace spiderlab;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kExperiments = fs::path(SPIDERLAB_SOURCE_DIR) / "experiments";

/// Counts checks; the first failure is kept for the report line.
struct Outcome {
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;
    std::string detail;
    double seconds = -1.0; // set when the work ran outside the timed call

    void check(bool ok, const std::string& what) {
        ++checks;
        if (!ok && failures++ == 0)
            first_failure = what;
    }
    bool passed() const { return failures == 0; }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int precision = 3) {
    std::ostringstream os;
    os.precision(precision);
    os << (x == 0.0 ? 0.0 : x);
    return os.str();
}

ExperimentData generate_data(const GenConfig& cfg) {
    const auto gen = generate(cfg);
    std::istringstream corpus(gen.corpus), targets(gen.targets);
    ExperimentData d;
    d.graph = WebGraph(parse_corpus(corpus));
    d.targets = parse_targets(targets, d.graph);
    return d;
}

/// Brute-force sign enumeration of the two-sided exact p.
double enumerated_p(const std::vector<double>& ranks, double w_plus) {
    const std::size_t n = ranks.size();
    std::size_t upper = 0, lower = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1)
                w += ranks[i];
        upper += w >= w_plus - 1e-9;
        lower += w <= w_plus + 1e-9;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(upper, lower)) / std::ldexp(1.0, static_cast<int>(n)));
}

std::vector<double> counted_ranks(const std::vector<double>& d) {
    std::vector<double> r(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        double below = 0.0, equal = 0.0;
        for (double x : d) {
            below += std::abs(x) < std::abs(d[i]);
            equal += std::abs(x) == std::abs(d[i]);
        }
        r[i] = below + (equal + 1.0) / 2.0;
    }
    return r;
}

double w_plus_of(const std::vector<double>& d, const std::vector<double>& ranks) {
    double w = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] > 0)
            w += ranks[i];
    return w;
}

SpiderTrace synthetic_trace(std::size_t length, const std::vector<std::size_t>& hits) {
    SpiderTrace tr;
    for (std::size_t t = 0; t < length; ++t) {
        FetchEvent e;
        e.t = t;
        e.page = static_cast<PageId>(t);
        e.is_new_target = std::find(hits.begin(), hits.end(), t) != hits.end();
        tr.events.push_back(e);
    }
    return tr;
}

/// Median delta of "winner - loser" for a metric and the pair's p, whichever order the report holds.
struct Delta {
    double median = 0.0;
    double p = 1.0;
};
Delta delta(const ComparisonReport& r, const std::string& winner, const std::string& loser, Metric m) {
    const auto iw = r.strategy_index(winner), il = r.strategy_index(loser);
    const auto& pc = iw < il ? r.find(winner, loser, m) : r.find(loser, winner, m);
    return {iw < il ? pc.test.median_diff : -pc.test.median_diff, pc.test.p_two_sided};
}

int run_shell(const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

Outcome graph_oracles() {
    Outcome o;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::size_t n = 100 + (seed * 37) % 401;
        const auto g = testsupport::random_graph(n, 3.0, seed);
        const auto targets = testsupport::random_subset(n, 1 + seed % 10, seed + 500);
        const int depth = 1 + static_cast<int>(seed % 6);
        const auto oracle = testsupport::oracle_distances(g, targets, depth);
        const auto dist = distances_to_targets(g, targets, depth);
        o.check(dist == oracle, "distances_to_targets, graph " + std::to_string(seed));
        const auto cone = light_cone(g, targets, depth);
        o.check(cone.distance == oracle, "light_cone, graph " + std::to_string(seed));
        std::vector<PageId> members;
        for (PageId p = 0; p < n; ++p)
            if (oracle[p] >= 0)
                members.push_back(p);
        o.check(harvest_region(g, targets, depth) == members, "harvest_region, graph " + std::to_string(seed));
    }
    o.detail = "100 graphs";
    return o;
}

Outcome wilcoxon_correctness() {
    Outcome o;
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<double> d;
        for (std::size_t i = 0; i < n; ++i) {
            const int x = static_cast<int>(rng() % 11) - 5;
            d.push_back(x == 0 ? 2.0 : x);
        }
        const auto ranks = counted_ranks(d);
        const double w = w_plus_of(d, ranks);
        const auto r = wilcoxon_signed_rank(d);
        o.check(std::abs(r.w_plus - w) < 1e-12, "w_plus, case " + std::to_string(trial));
        o.check(std::abs(r.p_two_sided - enumerated_p(ranks, w)) <= 1e-12, "exact p, case " + std::to_string(trial));
    }
    double worst = 0.0;
    for (std::size_t n = 10; n <= 20; ++n) {
        std::vector<double> ranks(n);
        for (std::size_t i = 0; i < n; ++i)
            ranks[i] = static_cast<double>(i + 1);
        for (std::size_t w = 0; w <= n * (n + 1) / 2; ++w)
            worst = std::max(worst, std::abs(wilcoxon_exact_p(ranks, double(w)) - wilcoxon_normal_p(ranks, double(w))));
    }
    o.check(worst <= 0.02, "normal approximation gap " + fmt(worst));

    auto ex = wilcoxon_signed_rank(std::vector<double>{1, 2, 3});
    o.check(ex.w_plus == 6.0 && std::abs(ex.p_two_sided - 0.25) < 1e-15, "[1,2,3] example");
    ex = wilcoxon_signed_rank(std::vector<double>{0, 0, 0});
    o.check(ex.n_effective == 0 && ex.p_two_sided == 1.0, "[0,0,0] example");
    ex = wilcoxon_signed_rank(std::vector<double>{5, -5});
    o.check(ex.w_plus == 1.5 && std::abs(ex.p_two_sided - 1.0) < 1e-15, "[5,-5] example");
    o.detail = "1000 enumerations, worst normal gap " + fmt(worst) + " for n=10..20";
    return o;
}

Outcome metric_oracles() {
    Outcome o;
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = 1 + rng() % 200;
        const double gamma = 0.1 + 0.85 * static_cast<double>(rng() % 1000) / 1000.0;
        std::vector<std::size_t> hits;
        for (std::size_t t = 0; t < len; ++t)
            if (rng() % 6 == 0)
                hits.push_back(t);
        const auto tr = synthetic_trace(len, hits);
        double expect = 0.0;
        for (const auto& e : tr.events)
            if (e.is_new_target)
                expect += std::pow(gamma, static_cast<double>(e.t));
        o.check(std::abs(discounted_cumulative_reward(tr, gamma) - expect) <= 1e-12,
                "DCR, trace " + std::to_string(trial));
    }
    EvalConfig cfg;
    cfg.budget = 100;
    cfg.gamma = 0.5;
    o.check(std::abs(log_dcr_score(synthetic_trace(30, {}), cfg) - (-30.10299956639812)) <= 1e-9, "log floor");
    o.check(std::abs(log_dcr_score(synthetic_trace(30, {10}), cfg) - (-3.010299956639812)) <= 1e-9, "log of one hit");
    o.check(actions_to_first_target(synthetic_trace(5, {0}), 2000) == 0, "start is a target");
    o.check(actions_to_first_target(synthetic_trace(9, {4, 6}), 2000) == 4, "first hit at 4");
    o.check(actions_to_first_target(synthetic_trace(9, {}), 2000) == 2000, "hitless sentinel");
    o.check(targets_found_curve(synthetic_trace(5, {1, 3}), 5) == std::vector<std::size_t>{0, 1, 1, 2, 2},
            "curve with hits at 1 and 3");
    o.check(targets_found_curve(synthetic_trace(3, {}), 4) == std::vector<std::size_t>(4, 0), "hitless curve");
    o.detail = "1000 traces";
    return o;
}

Outcome labeling_coherence() {
    Outcome o;
    const double gamma = 0.5;
    std::size_t finite = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::size_t n = 200;
        const auto g = testsupport::random_graph(n, 2.0, seed + 7000);
        const auto targets = testsupport::random_subset(n, 1 + seed % 8, seed + 9000);
        const int horizon = 12;
        const auto depth = distances_to_targets(g, targets, horizon);
        const auto disc = discount_labels(g, targets, gamma, horizon);
        for (PageId p = 0; p < n; ++p) {
            if (depth[p] == kUnreachable)
                continue;
            ++finite;
            o.check(disc[p] >= std::pow(gamma, depth[p]) - 1e-12, "discount below gamma^depth");
            if (depth[p] >= 1) {
                bool closer = false;
                for (PageId q : g.out_links(p))
                    closer = closer || (depth[q] != kUnreachable && depth[q] <= depth[p] - 1);
                o.check(closer, "shortest-path neighbour missing");
            }
        }
    }
    o.detail = "100 graphs, " + std::to_string(finite) + " labelled pages";
    return o;
}

Outcome text_pipeline() {
    Outcome o;
    // Values from the 2x2 entropy formula, computed independently.
    struct Case {
        std::size_t with, pos_with, pos, total;
        double bits;
    };
    const Case cases[] = {{4, 3, 4, 8, 0.18872187554086717},
                          {3, 1, 2, 10, 0.03226839966338635},
                          {5, 5, 6, 12, 0.6548575458269758},
                          {2, 0, 3, 7, 0.2916919971380597}};
    for (const auto& c : cases)
        o.check(std::abs(information_gain(c.with, c.pos_with, c.pos, c.total) - c.bits) <= 1e-12,
                "IG(" + std::to_string(c.with) + "," + std::to_string(c.pos_with) + ")");
    o.check(information_gain(4, 4, 4, 8) == 1.0, "perfect term is one bit");

    GenConfig cfg;
    cfg.n_pages = 2000;
    const auto gp = generate_pages(cfg);
    std::vector<Tokens> docs;
    for (const auto& p : gp.pages)
        docs.push_back(tokenize(p.text));
    const auto dict = build_dictionary(docs);
    double worst = 0.0;
    for (const auto& d : docs) {
        const auto v = vectorize(d, dict);
        if (!v.empty())
            worst = std::max(worst, std::abs(v.norm() - 1.0));
    }
    o.check(worst < 1e-9, "vector norm off by " + fmt(worst));
    o.detail = "2000 vectors, worst norm error " + fmt(worst);
    return o;
}

Outcome ranker_sanity() {
    Outcome o;
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal;
    const std::size_t dim = 100;
    std::vector<double> w(dim);
    for (auto& x : w)
        x = normal(rng);
    std::uniform_int_distribution<std::uint32_t> coord(0, dim - 1);
    auto draw = [&](std::size_t n, std::vector<TermVector>& xs, std::vector<double>& zs) {
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> dense(dim, 0.0);
            for (int j = 0; j < 8; ++j)
                dense[coord(rng)] = std::abs(normal(rng)) + 0.1;
            double norm = 0.0;
            for (double d : dense)
                norm += d * d;
            norm = std::sqrt(norm);
            TermVector v;
            double z = 0.0;
            for (std::uint32_t i = 0; i < dim; ++i)
                if (dense[i] != 0.0) {
                    v.entries.push_back({i, dense[i] / norm});
                    z += w[i] * dense[i] / norm;
                }
            xs.push_back(std::move(v));
            zs.push_back(z);
        }
    };
    std::vector<TermVector> xtr, xte;
    std::vector<double> ztr, zte;
    draw(500, xtr, ztr);
    draw(200, xte, zte);
    // noise sd = 0.1 of the signal sd
    double mean = 0.0, var = 0.0;
    for (double z : ztr)
        mean += z / double(ztr.size());
    for (double z : ztr)
        var += (z - mean) * (z - mean) / double(ztr.size());
    const double sd = 0.1 * std::sqrt(var);
    for (auto& z : ztr)
        z += sd * normal(rng);
    for (auto& z : zte)
        z += sd * normal(rng);

    const TrainParams params;
    const auto m = train_regression(xtr, ztr, dim, Objective::Discount, params);
    const auto again = train_regression(xtr, ztr, dim, Objective::Discount, params);
    const double rho = spearman(predict_all(m, xte), zte);
    o.check(rho >= 0.9, "held-out Spearman " + fmt(rho));
    o.check(m.weights == again.weights && m.bias == again.bias, "same seed, different models");
    o.detail = "held-out Spearman " + fmt(rho);
    return o;
}

struct DominanceRun {
    ExperimentSpec spec;
    ExperimentData data;
    TrainedRanker ranker;
    ComparisonReport report;
    double gen_seconds = 0.0, train_seconds = 0.0, compare_seconds = 0.0;
};

DominanceRun dominance_run(const fs::path& gen_config, std::vector<std::string> strategies = {}) {
    DominanceRun r;
    r.spec = ExperimentSpec::load(kExperiments / "acceptance.spec");
    if (!strategies.empty())
        r.spec.strategies = strategies;
    auto t0 = Clock::now();
    r.data = generate_data(GenConfig::load(gen_config));
    r.gen_seconds = seconds_since(t0);
    t0 = Clock::now();
    r.ranker = train_ranker(r.data.graph, r.data.targets, r.spec);
    r.train_seconds = seconds_since(t0);
    t0 = Clock::now();
    r.report = run_comparison(r.data.graph, r.data.targets, r.spec, &r.ranker);
    r.compare_seconds = seconds_since(t0);
    return r;
}

Outcome gold_dominance(const DominanceRun& run) {
    Outcome o;
    std::string worst;
    double worst_p = 0.0;
    for (std::string gold : {"gold-depth", "gold-discount"})
        for (std::string base : {"random", "bfs", "dfs"}) {
            const auto d = delta(run.report, gold, base, Metric::TargetsFound);
            o.check(d.median > 0.0 && d.p < 0.01,
                    gold + " vs " + base + ": median delta " + fmt(d.median) + ", p " + fmt(d.p));
            if (d.p >= worst_p) {
                worst_p = d.p;
                worst = gold + " vs " + base + " delta " + fmt(d.median) + " p " + fmt(d.p);
            }
        }
    o.seconds = run.gen_seconds + run.compare_seconds;
    o.check(o.seconds < 300.0, "runtime " + fmt(o.seconds) + " s");
    o.detail = std::to_string(run.data.targets.members.size()) + " targets, " +
               std::to_string(run.report.starts.size()) + " starts; weakest: " + worst;
    return o;
}

Outcome learned_dominance(const DominanceRun& run) {
    Outcome o;
    std::string parts;
    for (std::string base : {"random", "bfs", "dfs"}) {
        const auto d = delta(run.report, "model-parent", base, Metric::TargetsFound);
        o.check(d.median > 0.0 && d.p < 0.05,
                "model-parent vs " + base + ": median delta " + fmt(d.median) + ", p " + fmt(d.p));
        parts += (parts.empty() ? "" : "; ") + base + " delta " + fmt(d.median) + " p " + fmt(d.p);
    }
    o.seconds = run.gen_seconds + run.train_seconds + run.compare_seconds;
    o.check(o.seconds < 600.0, "runtime " + fmt(o.seconds) + " s");
    o.detail = std::to_string(run.data.targets.train.size()) + " train targets; " + parts;
    return o;
}

Outcome negative_control() {
    Outcome o;
    const auto run = dominance_run(kExperiments / "control.gen", {"random", "model-parent"});
    const auto d = delta(run.report, "model-parent", "random", Metric::TargetsFound);
    o.check(d.p > 0.05, "model-parent vs random p " + fmt(d.p));
    o.detail = "alpha 0.2, model-parent vs random delta " + fmt(d.median) + " p " + fmt(d.p);
    return o;
}

Outcome overlap_instrumentation(const DominanceRun& run) {
    Outcome o;
    const auto& g = run.data.graph;
    const auto& t = run.data.targets;
    const auto train = light_cone(g, t.train, run.spec.harvest_depth);
    const auto test = light_cone(g, t.test, run.spec.harvest_depth);
    const auto a = train.members(), b = test.members();
    const std::set<PageId> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::size_t both = 0;
    for (PageId p : sa)
        both += sb.count(p);
    for (const auto& [x, y, sx, sy] :
         {std::tuple{&train, &test, &sa, &sb}, std::tuple{&test, &train, &sb, &sa}}) {
        const auto r = cone_overlap(*x, *y);
        o.check(r.intersection == both && r.size_a == sx->size() && r.size_b == sy->size(), "overlap counts");
        o.check(r.fraction == static_cast<double>(both) / static_cast<double>(sx->size()), "overlap fraction");
    }
    const double train_test = static_cast<double>(both) / static_cast<double>(sa.size());

    SpiderConfig sc;
    sc.budget = run.spec.budget;
    sc.max_depth = run.spec.max_depth;
    for (std::size_t i = 0; i < std::min<std::size_t>(5, run.report.starts.size()); ++i) {
        sc.seed = i + 1;
        const auto trace = run_spider(g, run.report.starts[i], t, sc);
        std::size_t inside = 0;
        for (const auto& e : trace.events)
            inside += sa.count(e.page);
        o.check(trace_region_overlap(trace, train) ==
                    static_cast<double>(inside) / static_cast<double>(trace.size()),
                "trace overlap, start " + std::to_string(i));
    }
    o.detail = "train/test cone overlap " + fmt(train_test) + " of " + std::to_string(sa.size()) + " pages";
    return o;
}

Outcome end_to_end_determinism() {
    Outcome o;
    const fs::path work = fs::temp_directory_path() / "spiderlab_acceptance_e2e";
    fs::remove_all(work);
    const std::string cli = SPIDERLAB_CLI;
    const auto spec = (kExperiments / "acceptance.spec").string();
    const auto gen = (kExperiments / "acceptance.gen").string();
    const std::string threads[] = {"1", "0"};
    for (int i = 0; i < 2; ++i) {
        const auto dir = work / ("run" + std::to_string(i + 1));
        fs::create_directories(dir);
        const std::string cd = "cd '" + dir.string() + "' && '" + cli + "' ";
        const std::string quiet = " > pipeline.log 2>&1";
        o.check(run_shell(cd + "gen --config '" + gen + "' --out ." + quiet) == 0, "gen failed");
        o.check(run_shell(cd + "train --spec '" + spec + "'" + quiet) == 0, "train failed");
        o.check(run_shell(cd + "compare --spec '" + spec + "' --out report --threads " + threads[i] + quiet) == 0,
                "compare failed");
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(work / "run1" / "report")) {
        const auto other = work / "run2" / "report" / entry.path().filename();
        o.check(fs::exists(other) && slurp(entry.path()) == slurp(other),
                entry.path().filename().string() + " differs");
        ++files;
    }
    for (std::string f : {"corpus.jsonl", "targets.json", "dictionary.tsv", "model.txt"})
        o.check(slurp(work / "run1" / f) == slurp(work / "run2" / f), f + " differs");
    o.check(files >= 2 + 2 * 6, "report has " + std::to_string(files) + " files");
    o.detail = std::to_string(files) + " report files identical (threads 1 vs all)";
    if (o.passed())
        fs::remove_all(work);
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        double limit_seconds; // 0: none
        std::function<Outcome()> run;
    };

    std::unique_ptr<DominanceRun> planted;
    auto planted_run = [&]() -> const DominanceRun& {
        if (!planted)
            planted = std::make_unique<DominanceRun>(dominance_run(kExperiments / "acceptance.gen"));
        return *planted;
    };

    const std::vector<Criterion> criteria{
        {1, "graph oracles", 30.0, graph_oracles},
        {2, "wilcoxon correctness", 0.0, wilcoxon_correctness},
        {3, "metric oracles", 0.0, metric_oracles},
        {4, "labeling coherence", 0.0, labeling_coherence},
        {5, "text pipeline", 0.0, text_pipeline},
        {6, "ranker sanity", 10.0, ranker_sanity},
        {7, "gold dominance", 0.0, [&] { return gold_dominance(planted_run()); }},
        {8, "learned dominance", 0.0, [&] { return learned_dominance(planted_run()); }},
        {9, "negative control", 0.0, negative_control},
        {10, "overlap instrumentation", 0.0, [&] { return overlap_instrumentation(planted_run()); }},
        {11, "end-to-end determinism", 0.0, end_to_end_determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = o.seconds >= 0.0 ? o.seconds : seconds_since(t0);
        if (c.limit_seconds > 0.0)
            o.check(secs < c.limit_seconds, "over the " + fmt(c.limit_seconds) + " s limit");
        const bool ok = o.passed();
        failed += !ok;
        std::ostringstream line;
        line << (ok ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " (" << fmt(secs, 2) << " s): ";
        if (ok)
            line << o.detail;
        else
            line << o.failures << " of " << o.checks << " checks failed, first: " << o.first_failure;
        std::cout << line.str() << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
