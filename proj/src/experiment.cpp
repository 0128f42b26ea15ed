#include "spiderlab/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "kv_util.hpp"
#include "spiderlab/errors.hpp"
#include "spiderlab/rng.hpp"

namespace spiderlab {

using detail::fmt_double;
using detail::parse_number;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (auto t = detail::trim(item); !t.empty())
            out.push_back(t);
    return out;
}

std::string join_list(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += (i ? "," : "") + xs[i];
    return out;
}

Inheritance parse_inheritance(const std::string& s) {
    if (s == "parent")
        return Inheritance::Parent;
    if (s == "self")
        return Inheritance::Self;
    throw ArgumentError("unknown inheritance '" + s + "' (expected parent or self)");
}

} // namespace

void ExperimentSpec::validate() const {
    if (dict_cap < 1)
        throw ArgumentError("dict_cap must be at least 1");
    if (ig_label_depth < 0)
        throw ArgumentError("ig_label_depth must be non-negative");
    if (harvest_depth < 0)
        throw ArgumentError("harvest_depth must be non-negative");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ArgumentError("gamma must be in (0, 1)");
    if (!(lambda > 0.0) || epochs < 1 || epsilon < 0.0)
        throw ArgumentError("invalid training hyperparameters");
    if (strategies.size() < 2)
        throw ArgumentError("at least two strategies are needed");
    if (budget < 1)
        throw ArgumentError("budget must be at least 1");
    if (max_depth < 0 || k_away < 0)
        throw ArgumentError("max_depth and k_away must be non-negative");
    if (start_count < 1 || repeats < 1)
        throw ArgumentError("start_count and repeats must be at least 1");
    (void)parsed_strategies();
}

TrainParams ExperimentSpec::train_params() const {
    TrainParams p;
    p.lambda = lambda;
    p.epochs = epochs;
    p.epsilon = epsilon;
    p.seed = seed;
    return p;
}

CompareConfig ExperimentSpec::compare_config(int threads) const {
    CompareConfig c;
    c.budget = budget;
    c.max_depth = max_depth;
    c.gamma = gamma;
    c.repeats = repeats;
    c.seed = seed;
    c.threads = threads;
    return c;
}

std::vector<Strategy> ExperimentSpec::parsed_strategies() const {
    std::vector<Strategy> out;
    for (const auto& name : strategies) {
        Strategy s = Strategy::parse(name);
        if (name == "model")
            s.inheritance = inheritance;
        if (std::find(out.begin(), out.end(), s) != out.end())
            throw ArgumentError("strategy " + s.name() + " is listed twice");
        out.push_back(s);
    }
    return out;
}

bool ExperimentSpec::set(const std::string& key, const std::string& value) {
    if (key == "corpus") corpus = value;
    else if (key == "targets") targets = value;
    else if (key == "class_id") class_id = value;
    else if (key == "dictionary") dictionary = value;
    else if (key == "model") model = value;
    else if (key == "dict_cap") dict_cap = parse_number<std::size_t>(key, value);
    else if (key == "ig_label_depth") ig_label_depth = parse_number<int>(key, value);
    else if (key == "harvest_depth") harvest_depth = parse_number<int>(key, value);
    else if (key == "gamma") gamma = parse_number<double>(key, value);
    else if (key == "horizon") horizon = parse_number<int>(key, value);
    else if (key == "objective") objective = parse_objective(value);
    else if (key == "lambda") lambda = parse_number<double>(key, value);
    else if (key == "epochs") epochs = parse_number<std::size_t>(key, value);
    else if (key == "epsilon") epsilon = parse_number<double>(key, value);
    else if (key == "strategies") strategies = split_list(value);
    else if (key == "inheritance") inheritance = parse_inheritance(value);
    else if (key == "budget") budget = parse_number<std::size_t>(key, value);
    else if (key == "max_depth") max_depth = parse_number<int>(key, value);
    else if (key == "k_away") k_away = parse_number<int>(key, value);
    else if (key == "start_count") start_count = parse_number<std::size_t>(key, value);
    else if (key == "repeats") repeats = parse_number<std::size_t>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else return false;
    return true;
}

std::vector<std::pair<std::string, std::string>> ExperimentSpec::entries() const {
    return {
        {"corpus", corpus},
        {"targets", targets},
        {"class_id", class_id},
        {"dictionary", dictionary},
        {"model", model},
        {"dict_cap", std::to_string(dict_cap)},
        {"ig_label_depth", std::to_string(ig_label_depth)},
        {"harvest_depth", std::to_string(harvest_depth)},
        {"gamma", fmt_double(gamma)},
        {"horizon", std::to_string(horizon)},
        {"objective", to_string(objective)},
        {"lambda", fmt_double(lambda)},
        {"epochs", std::to_string(epochs)},
        {"epsilon", fmt_double(epsilon)},
        {"strategies", join_list(strategies)},
        {"inheritance", inheritance == Inheritance::Parent ? "parent" : "self"},
        {"budget", std::to_string(budget)},
        {"max_depth", std::to_string(max_depth)},
        {"k_away", std::to_string(k_away)},
        {"start_count", std::to_string(start_count)},
        {"repeats", std::to_string(repeats)},
        {"seed", std::to_string(seed)},
    };
}

ExperimentSpec ExperimentSpec::parse(std::istream& in) {
    return detail::parse_key_values<ExperimentSpec>(in, "experiment");
}

ExperimentSpec ExperimentSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open experiment spec " + path.string());
    try {
        return parse(in);
    } catch (const LoadError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

ExperimentData load_experiment_data(const ExperimentSpec& spec) {
    ExperimentData d;
    d.graph = load_corpus(spec.corpus);
    d.targets = load_targets(spec.targets, d.graph, spec.class_id);
    return d;
}

TrainedRanker train_ranker(const WebGraph& g, const TargetSet& targets, const ExperimentSpec& spec) {
    spec.validate();
    if (targets.train.empty())
        throw ArgumentError("the targets file has no train split");
    const ConeResult cone = light_cone(g, targets.train, spec.harvest_depth);
    const std::vector<PageId> region = cone.members();

    std::vector<Tokens> docs;
    docs.reserve(region.size());
    auto labels = std::make_unique<bool[]>(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) {
        docs.push_back(tokenize(g.page(region[i]).text));
        labels[i] = cone.distance[region[i]] <= spec.ig_label_depth;
    }
    Dictionary full = build_dictionary(docs);
    full.set_total_docs(docs.size());

    TrainedRanker r;
    r.harvested = region.size();
    r.dictionary = information_gain_select(full, docs, std::span<const bool>(labels.get(), region.size()),
                                           spec.dict_cap);
    r.examples = build_training_set(g, targets.train, spec.harvest_depth, r.dictionary, spec.gamma,
                                    spec.effective_horizon());
    r.model = train(r.examples, r.dictionary.size(), spec.objective, spec.train_params());
    r.fit = evaluate_model(r.model, r.examples);
    return r;
}

std::vector<StrategySpec> build_strategies(const WebGraph& g, const TargetSet& targets, const ExperimentSpec& spec,
                                           const TrainedRanker* ranker) {
    std::vector<StrategySpec> out;
    std::vector<TermVector> page_vectors;
    for (const Strategy& s : spec.parsed_strategies()) {
        StrategySpec ss{s, nullptr};
        switch (s.kind) {
        case StrategyKind::Random:
        case StrategyKind::BFS:
        case StrategyKind::DFS:
            break;
        case StrategyKind::GoldDepth:
        case StrategyKind::GoldDiscount:
            if (targets.test.empty())
                throw ArgumentError("gold strategies need test targets");
            ss.estimator = std::make_shared<const QualityEstimator>(
                s.kind == StrategyKind::GoldDepth
                    ? gold_depth_estimator(g, targets.test, spec.max_depth)
                    : gold_discount_estimator(g, targets.test, spec.gamma, spec.max_depth));
            break;
        case StrategyKind::Model:
            if (ranker == nullptr)
                throw ArgumentError("strategy " + s.name() + " needs a trained model");
            if (ranker->model.dimension() != ranker->dictionary.size())
                throw ArgumentError("model dimension does not match the dictionary size");
            if (page_vectors.empty())
                page_vectors = vectorize_pages(g, ranker->dictionary);
            ss.estimator =
                std::make_shared<const QualityEstimator>(model_estimator(ranker->model, page_vectors, s.inheritance));
            break;
        }
        out.push_back(std::move(ss));
    }
    return out;
}

ComparisonReport run_comparison(const WebGraph& g, const TargetSet& targets, const ExperimentSpec& spec,
                                const TrainedRanker* ranker, int threads) {
    spec.validate();
    const auto strategies = build_strategies(g, targets, spec, ranker);
    const auto sel = select_starts(g, targets, spec.k_away, spec.start_count, splitmix64(spec.seed));
    return compare_strategies(g, targets, sel.starts, strategies, spec.compare_config(threads));
}

std::vector<std::pair<std::string, std::string>> spec_header(const ExperimentSpec& spec) {
    auto h = spec.entries();
    h.emplace_back("wilcoxon", "two-sided");
    return h;
}

namespace {

void render_csv(const std::filesystem::path& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open report file " + path.string());
    std::vector<std::string> comments;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            comments.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    std::vector<std::size_t> width;
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (width.size() <= c)
                width.push_back(0);
            width[c] = std::max(width[c], r[c].size());
        }
    out << path.filename().string() << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        for (std::size_t c = 0; c < r.size(); ++c)
            out << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << r[c];
        out << '\n';
        if (i == 0) {
            std::size_t total = 0;
            for (std::size_t c = 0; c < width.size(); ++c)
                total += width[c] + (c ? 2 : 0);
            out << std::string(total, '-') << '\n';
        }
    }
    out << '\n';
}

} // namespace

void render_report(const std::filesystem::path& dir, std::ostream& out) {
    render_csv(dir / "comparison.csv", out);
    render_csv(dir / "summary.csv", out);
}

} // namespace spiderlab
