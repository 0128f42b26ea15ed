#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spiderlab/graph.hpp"

namespace spiderlab {

/// Synthetic corpus parameters. Defaults are the frozen desk-scale configuration.
struct GenConfig {
    std::size_t n_pages = 5000;
    std::size_t n_topics = 5;
    std::size_t target_topic = 0;
    double target_fraction = 0.03;  // of target-topic pages
    double mean_out_degree = 4.0;
    double alpha = 0.8;             // probability a link stays within the source topic
    std::size_t vocab_size = 4000;  // shared background vocabulary
    std::size_t terms_per_page = 60;
    double topic_mix = 0.3;         // share of a page's tokens drawn from its topic vocabulary
    std::size_t topic_vocab_size = 300;
    std::size_t marker_vocab_size = 20;
    std::size_t marker_terms = 6;   // extra marker tokens emitted by each target page
    double zipf_exponent = 1.0;
    double train_fraction = 0.1;
    std::uint64_t seed = 1;

    /// Throws ArgumentError on an invalid configuration.
    void validate() const;

    /// key=value lines, '#' comments. Unknown keys throw.
    static GenConfig parse(std::istream& in);
    static GenConfig load(const std::filesystem::path& path);
    /// Applies one key=value setting; returns false if the key is not a GenConfig field.
    bool set(const std::string& key, const std::string& value);
    /// Every field as key=value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

struct GeneratedCorpus {
    std::string corpus;  // corpus file content
    std::string targets; // targets file content
};

/// Deterministic in cfg. Draw order from one seeded generator: topics, targets, texts, links,
/// backbone, train split.
GeneratedCorpus generate(const GenConfig& cfg);

/// Lower-level form of generate(): raw pages plus ground truth, for tests.
struct GeneratedPages {
    std::vector<RawPage> pages;
    std::vector<std::size_t> topic;       // per page
    std::vector<bool> backbone_link;      // per page: the last outlink came from the backbone
    std::vector<std::size_t> targets;     // page indices, ascending
    std::vector<std::size_t> train;       // subset of targets, ascending
    std::string class_id;
};
GeneratedPages generate_pages(const GenConfig& cfg);

/// The synthetic word for a vocabulary slot. Words survive tokenize() unchanged.
std::string synthetic_word(std::size_t slot);

struct DegreeSummary {
    double mean_out = 0.0;
    std::size_t max_out = 0;
    double mean_in = 0.0;
    std::size_t max_in = 0;
};

struct CorpusStats {
    std::size_t pages = 0;
    std::size_t edges = 0;
    std::size_t targets = 0;
    std::map<int, std::size_t> pages_per_depth;      // distance to nearest target -> count
    std::size_t unreachable = 0;                     // pages beyond max_depth
    std::map<int, std::size_t> start_pages_per_depth; // forward depth from sampled starts, summed
    std::map<int, std::size_t> start_targets_per_depth;
    std::size_t sampled_starts = 0;
    DegreeSummary degree;
};

CorpusStats corpus_stats(const WebGraph& g, const TargetSet& targets, int max_depth, std::size_t start_samples = 20,
                         std::uint64_t seed = 1);

void write_stats(std::ostream& out, const CorpusStats& s);

} // namespace spiderlab
