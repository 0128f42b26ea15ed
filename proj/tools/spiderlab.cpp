// Command-line front end: gen, stats, cone, train, run, compare, report.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spiderlab/corpus_gen.hpp"
#include "spiderlab/errors.hpp"
#include "spiderlab/eval.hpp"
#include "spiderlab/experiment.hpp"
#include "spiderlab/graph.hpp"
#include "spiderlab/spider.hpp"

namespace fs = std::filesystem;
using namespace spiderlab;

namespace {

using Overrides = std::map<std::string, std::string>;

/// One string flag per config key; values are applied on top of the config file.
template <typename Config>
void add_key_options(CLI::App* app, Overrides& overrides, const std::string& group) {
    for (const auto& [key, value] : Config{}.entries())
        app->add_option_function<std::string>(
               "--" + key, [&overrides, key = key](const std::string& v) { overrides[key] = v; },
               "default: " + (value.empty() ? std::string("(none)") : value))
            ->group(group);
}

template <typename Config>
Config resolve(const std::string& file, const Overrides& overrides) {
    Config cfg = file.empty() ? Config{} : Config::load(file);
    for (const auto& [key, value] : overrides)
        cfg.set(key, value);
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw LoadError("cannot write " + path.string());
    return out;
}

template <typename Entries>
void write_header(std::ostream& out, const Entries& entries, const std::string& prefix = "") {
    for (const auto& [k, v] : entries)
        out << "# " << prefix << k << '=' << v << '\n';
}

template <typename Entries>
void write_config_file(const fs::path& path, const Entries& entries) {
    auto out = open_out(path);
    for (const auto& [k, v] : entries)
        out << k << '=' << v << '\n';
}

struct Paths {
    std::string corpus;
    std::string targets;
    std::string class_id;
};

void add_data_options(CLI::App* app, Paths& p) {
    app->add_option("--corpus", p.corpus, "corpus file (JSON lines)")->required();
    app->add_option("--targets", p.targets, "targets file (JSON)")->required();
    app->add_option("--class", p.class_id, "target class id (default: the only class)");
}

ExperimentData load_data(const Paths& p) {
    ExperimentData d;
    d.graph = load_corpus(p.corpus);
    d.targets = load_targets(p.targets, d.graph, p.class_id);
    return d;
}

void print_overlap(std::ostream& out, const std::string& label, const OverlapReport& r) {
    out << label << "\tintersection=" << r.intersection << "\tsize_a=" << r.size_a << "\tsize_b=" << r.size_b
        << "\tfraction=" << r.fraction << '\n';
}

TrainedRanker load_ranker(const ExperimentSpec& spec) {
    TrainedRanker r;
    r.dictionary = Dictionary::load(spec.dictionary);
    r.model = LinearModel::load(spec.model);
    return r;
}

bool needs_model(const ExperimentSpec& spec) {
    for (const auto& s : spec.parsed_strategies())
        if (s.kind == StrategyKind::Model)
            return true;
    return false;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spiderlab: focused-crawl simulation and evaluation"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus and targets file");
    std::string gen_config;
    std::string gen_out = ".";
    Overrides gen_over;
    gen->add_option("--config", gen_config, "generator key=value file");
    gen->add_option("--out", gen_out, "output directory (corpus.jsonl, targets.json, gen.config)");
    add_key_options<GenConfig>(gen, gen_over, "Generator settings");

    // stats
    auto* stats = app.add_subcommand("stats", "corpus statistics: pages per depth, growth, degrees");
    Paths stats_paths;
    int stats_depth = 40;
    std::size_t stats_samples = 20;
    std::uint64_t stats_seed = 1;
    add_data_options(stats, stats_paths);
    stats->add_option("--max-depth", stats_depth, "deepest distance counted")->capture_default_str();
    stats->add_option("--samples", stats_samples, "sampled start pages for forward depths")->capture_default_str();
    stats->add_option("--seed", stats_seed, "start sampling seed")->capture_default_str();

    // cone
    auto* cone = app.add_subcommand("cone", "light-cone sizes and overlaps");
    Paths cone_paths;
    int cone_depth = 4;
    std::string cone_trace;
    add_data_options(cone, cone_paths);
    cone->add_option("--depth", cone_depth, "cone depth")->capture_default_str();
    cone->add_option("--trace", cone_trace, "trace file: also report trace/train-cone overlap");

    // experiment-driven subcommands share the spec options
    std::string spec_file;
    Overrides spec_over;
    auto add_spec = [&](CLI::App* sub) {
        sub->add_option("--spec", spec_file, "experiment key=value file; flags override it");
        add_key_options<ExperimentSpec>(sub, spec_over, "Experiment settings");
    };

    auto* train_cmd = app.add_subcommand("train", "harvest, label, build dictionary, train model");
    std::string train_examples;
    add_spec(train_cmd);
    train_cmd->add_option("--examples-out", train_examples, "also write the training set here");

    auto* run_cmd = app.add_subcommand("run", "one spider run, written as a trace file");
    std::string run_strategy = "random";
    std::string run_start;
    std::string run_out = "trace.tsv";
    add_spec(run_cmd);
    run_cmd->add_option("--strategy", run_strategy, "strategy name")->capture_default_str();
    run_cmd->add_option("--start", run_start, "start url (default: first selected start page)");
    run_cmd->add_option("--out", run_out, "trace file")->capture_default_str();

    auto* compare_cmd = app.add_subcommand("compare", "paired comparison of all spec strategies");
    std::string compare_out = "report";
    int threads = 0;
    add_spec(compare_cmd);
    compare_cmd->add_option("--out", compare_out, "report directory")->capture_default_str();
    compare_cmd->add_option("--threads", threads, "parallel runs (0: all cores)")->capture_default_str();

    auto* report_cmd = app.add_subcommand("report", "print a saved report directory as tables");
    std::string report_dir = "report";
    report_cmd->add_option("dir", report_dir, "report directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) {
            const auto cfg = resolve<GenConfig>(gen_config, gen_over);
            const auto out = generate(cfg);
            const fs::path dir(gen_out);
            open_out(dir / "corpus.jsonl") << out.corpus;
            open_out(dir / "targets.json") << out.targets;
            write_config_file(dir / "gen.config", cfg.entries());
            std::cout << "wrote " << (dir / "corpus.jsonl").string() << ", " << (dir / "targets.json").string()
                      << " and " << (dir / "gen.config").string() << '\n';
        } else if (stats->parsed()) {
            const auto d = load_data(stats_paths);
            const auto s = corpus_stats(d.graph, d.targets, stats_depth, stats_samples, stats_seed);
            std::cout << "# corpus=" << stats_paths.corpus << "\n# targets=" << stats_paths.targets
                      << "\n# max_depth=" << stats_depth << "\n# samples=" << stats_samples
                      << "\n# seed=" << stats_seed << '\n';
            write_stats(std::cout, s);
        } else if (cone->parsed()) {
            const auto d = load_data(cone_paths);
            const auto& t = d.targets;
            std::cout << "# corpus=" << cone_paths.corpus << "\n# targets=" << cone_paths.targets
                      << "\n# depth=" << cone_depth << '\n';
            const auto all = light_cone(d.graph, t.members, cone_depth);
            std::cout << "cone_all\tsize=" << all.size() << '\n';
            if (!t.train.empty() && !t.test.empty()) {
                const auto train = light_cone(d.graph, t.train, cone_depth);
                const auto test = light_cone(d.graph, t.test, cone_depth);
                std::cout << "cone_train\tsize=" << train.size() << "\ncone_test\tsize=" << test.size() << '\n';
                print_overlap(std::cout, "train_vs_test", cone_overlap(train, test));
                print_overlap(std::cout, "test_vs_train", cone_overlap(test, train));
                if (!cone_trace.empty()) {
                    std::ifstream in(cone_trace);
                    if (!in)
                        throw LoadError("cannot open trace file " + cone_trace);
                    const auto trace = read_trace(in, d.graph);
                    std::cout << "trace_in_train_cone\tfraction=" << trace_region_overlap(trace, train) << '\n';
                }
            } else if (!cone_trace.empty()) {
                throw ArgumentError("trace overlap needs a train split in the targets file");
            }
        } else if (train_cmd->parsed()) {
            const auto spec = resolve<ExperimentSpec>(spec_file, spec_over);
            const auto d = load_experiment_data(spec);
            const auto r = train_ranker(d.graph, d.targets, spec);
            {
                auto out = open_out(spec.dictionary);
                r.dictionary.write(out);
            }
            {
                auto out = open_out(spec.model);
                r.model.write(out);
            }
            write_config_file(spec.model + ".spec", spec.entries());
            if (!train_examples.empty()) {
                auto out = open_out(train_examples);
                write_header(out, spec.entries());
                write_training_set(out, r.examples);
            }
            std::cout << "harvested " << r.harvested << " pages, " << r.examples.size() << " examples, "
                      << r.dictionary.size() << " terms\n"
                      << "training spearman " << r.fit.spearman << ", mean loss " << r.fit.mean_loss << '\n'
                      << "wrote " << spec.dictionary << ", " << spec.model << " and " << spec.model << ".spec\n";
        } else if (run_cmd->parsed()) {
            auto spec = resolve<ExperimentSpec>(spec_file, spec_over);
            const auto d = load_experiment_data(spec);
            PageId start = 0;
            if (run_start.empty()) {
                start = select_starts(d.graph, d.targets, spec.k_away, 1, splitmix64(spec.seed)).starts.front();
            } else {
                auto id = d.graph.find(run_start);
                if (!id)
                    throw ArgumentError("start url '" + run_start + "' is not in the corpus");
                start = *id;
            }
            spec.strategies = {run_strategy};
            std::optional<TrainedRanker> ranker;
            if (needs_model(spec))
                ranker = load_ranker(spec);
            const auto strategies = build_strategies(d.graph, d.targets, spec, ranker ? &*ranker : nullptr);
            SpiderConfig sc;
            sc.budget = spec.budget;
            sc.max_depth = spec.max_depth;
            sc.gamma = spec.gamma;
            sc.strategy = strategies.front().strategy;
            sc.seed = spec.seed;
            const auto trace = run_spider(d.graph, start, d.targets, sc, strategies.front().estimator.get());
            auto out = open_out(run_out);
            write_header(out, spec.entries(), "spec.");
            write_trace(out, d.graph, trace);
            std::cout << "fetched " << trace.size() << " pages, " << trace.hits() << " hits; wrote " << run_out
                      << '\n';
        } else if (compare_cmd->parsed()) {
            const auto spec = resolve<ExperimentSpec>(spec_file, spec_over);
            const auto d = load_experiment_data(spec);
            std::optional<TrainedRanker> ranker;
            if (needs_model(spec))
                ranker = load_ranker(spec);
            const auto report = run_comparison(d.graph, d.targets, spec, ranker ? &*ranker : nullptr, threads);
            write_report(compare_out, report, spec_header(spec));
            std::cout << "compared " << report.strategies.size() << " strategies from " << report.starts.size()
                      << " starts (" << report.runs << " runs); wrote " << compare_out << '\n';
        } else if (report_cmd->parsed()) {
            render_report(report_dir, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "spiderlab: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
