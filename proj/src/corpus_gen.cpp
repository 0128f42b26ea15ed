#include "spiderlab/corpus_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "spiderlab/errors.hpp"
#include "spiderlab/rng.hpp"
#include "kv_util.hpp"

namespace spiderlab {

namespace {

using detail::fmt_double;
using detail::parse_number;

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "ao";

/// Cumulative Zipf weights 1/(r+1)^s, normalised.
std::vector<double> zipf_cdf(std::size_t n, double s) {
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        acc += 1.0 / std::pow(static_cast<double>(r + 1), s);
        cdf[r] = acc;
    }
    for (auto& c : cdf)
        c /= acc;
    return cdf;
}

std::size_t sample_cdf(const std::vector<double>& cdf, Rng& rng) {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::size_t uniform_index(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::string page_url(std::size_t i) { return "http://corpus.test/p" + std::to_string(i); }

} // namespace

std::string synthetic_word(std::size_t slot) {
    const std::size_t base = kConsonants.size() * kVowels.size();
    std::string w;
    std::size_t x = slot;
    std::size_t digits = 0;
    do {
        const std::size_t d = x % base;
        w.insert(w.begin(), kVowels[d % kVowels.size()]);
        w.insert(w.begin(), kConsonants[d / kVowels.size()]);
        x /= base;
        ++digits;
    } while (x > 0 || digits < 3);
    return w;
}

void GenConfig::validate() const {
    if (n_pages < 1)
        throw ArgumentError("n_pages must be at least 1");
    if (n_topics < 1)
        throw ArgumentError("n_topics must be at least 1");
    if (target_topic >= n_topics)
        throw ArgumentError("target_topic must be < n_topics");
    if (!(target_fraction > 0.0 && target_fraction <= 1.0))
        throw ArgumentError("target_fraction must be in (0, 1]");
    if (!(mean_out_degree > 0.0))
        throw ArgumentError("mean_out_degree must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ArgumentError("alpha must be in [0, 1]");
    if (vocab_size < 1 || topic_vocab_size < 1 || marker_vocab_size < 1)
        throw ArgumentError("vocabulary sizes must be at least 1");
    if (!(topic_mix >= 0.0 && topic_mix <= 1.0))
        throw ArgumentError("topic_mix must be in [0, 1]");
    if (!(train_fraction >= 0.0 && train_fraction < 1.0))
        throw ArgumentError("train_fraction must be in [0, 1)");
    if (!(zipf_exponent >= 0.0))
        throw ArgumentError("zipf_exponent must be non-negative");
}

bool GenConfig::set(const std::string& key, const std::string& value) {
    if (key == "n_pages") n_pages = parse_number<std::size_t>(key, value);
    else if (key == "n_topics") n_topics = parse_number<std::size_t>(key, value);
    else if (key == "target_topic") target_topic = parse_number<std::size_t>(key, value);
    else if (key == "target_fraction") target_fraction = parse_number<double>(key, value);
    else if (key == "mean_out_degree") mean_out_degree = parse_number<double>(key, value);
    else if (key == "alpha") alpha = parse_number<double>(key, value);
    else if (key == "vocab_size") vocab_size = parse_number<std::size_t>(key, value);
    else if (key == "terms_per_page") terms_per_page = parse_number<std::size_t>(key, value);
    else if (key == "topic_mix") topic_mix = parse_number<double>(key, value);
    else if (key == "topic_vocab_size") topic_vocab_size = parse_number<std::size_t>(key, value);
    else if (key == "marker_vocab_size") marker_vocab_size = parse_number<std::size_t>(key, value);
    else if (key == "marker_terms") marker_terms = parse_number<std::size_t>(key, value);
    else if (key == "zipf_exponent") zipf_exponent = parse_number<double>(key, value);
    else if (key == "train_fraction") train_fraction = parse_number<double>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else return false;
    return true;
}

std::vector<std::pair<std::string, std::string>> GenConfig::entries() const {
    return {
        {"n_pages", std::to_string(n_pages)},
        {"n_topics", std::to_string(n_topics)},
        {"target_topic", std::to_string(target_topic)},
        {"target_fraction", fmt_double(target_fraction)},
        {"mean_out_degree", fmt_double(mean_out_degree)},
        {"alpha", fmt_double(alpha)},
        {"vocab_size", std::to_string(vocab_size)},
        {"terms_per_page", std::to_string(terms_per_page)},
        {"topic_mix", fmt_double(topic_mix)},
        {"topic_vocab_size", std::to_string(topic_vocab_size)},
        {"marker_vocab_size", std::to_string(marker_vocab_size)},
        {"marker_terms", std::to_string(marker_terms)},
        {"zipf_exponent", fmt_double(zipf_exponent)},
        {"train_fraction", fmt_double(train_fraction)},
        {"seed", std::to_string(seed)},
    };
}

GenConfig GenConfig::parse(std::istream& in) { return detail::parse_key_values<GenConfig>(in, "generator"); }

GenConfig GenConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open generator config " + path.string());
    return parse(in);
}

GeneratedPages generate_pages(const GenConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::size_t n = cfg.n_pages;

    GeneratedPages out;
    out.class_id = "topic" + std::to_string(cfg.target_topic);

    // Topics.
    out.topic.resize(n);
    for (auto& t : out.topic)
        t = uniform_index(cfg.n_topics, rng);

    // Targets: a shuffled prefix of the target-topic pages.
    std::vector<std::size_t> topical;
    for (std::size_t i = 0; i < n; ++i)
        if (out.topic[i] == cfg.target_topic)
            topical.push_back(i);
    std::shuffle(topical.begin(), topical.end(), rng);
    if (!topical.empty()) {
        auto count = static_cast<std::size_t>(std::llround(cfg.target_fraction * static_cast<double>(topical.size())));
        count = std::clamp<std::size_t>(count, 1, topical.size());
        out.targets.assign(topical.begin(), topical.begin() + static_cast<std::ptrdiff_t>(count));
    }
    std::vector<bool> is_target(n, false);
    for (auto t : out.targets)
        is_target[t] = true;

    // Texts.
    const auto background = zipf_cdf(cfg.vocab_size, cfg.zipf_exponent);
    const auto topical_cdf = zipf_cdf(cfg.topic_vocab_size, cfg.zipf_exponent);
    const std::size_t topic_base = cfg.vocab_size;
    const std::size_t marker_base = topic_base + cfg.n_topics * cfg.topic_vocab_size;
    out.pages.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& page = out.pages[i];
        page.url = page_url(i);
        std::string text;
        auto emit = [&](std::size_t slot) {
            if (!text.empty())
                text.push_back(' ');
            text += synthetic_word(slot);
        };
        for (std::size_t k = 0; k < cfg.terms_per_page; ++k) {
            if (uniform01(rng) < cfg.topic_mix)
                emit(topic_base + out.topic[i] * cfg.topic_vocab_size + sample_cdf(topical_cdf, rng));
            else
                emit(sample_cdf(background, rng));
        }
        if (is_target[i])
            for (std::size_t k = 0; k < cfg.marker_terms; ++k)
                emit(marker_base + uniform_index(cfg.marker_vocab_size, rng));
        page.text = std::move(text);
    }

    // Links: geometric out-degree; each endpoint drawn in proportion to (in-degree + 1),
    // within the source topic with probability alpha, else among pages of the other topics.
    std::vector<std::vector<std::size_t>> links(n);
    std::vector<std::size_t> global_pool(n);
    std::iota(global_pool.begin(), global_pool.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> topic_pool(cfg.n_topics);
    for (std::size_t i = 0; i < n; ++i)
        topic_pool[out.topic[i]].push_back(i);
    const double stop_p = 1.0 / (1.0 + cfg.mean_out_degree);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform01(rng);
        auto degree = static_cast<std::size_t>(std::floor(std::log1p(-u) / std::log1p(-stop_p)));
        degree = std::min(degree, n - 1);
        for (std::size_t k = 0; k < degree; ++k) {
            const bool local = cfg.n_topics == 1 || uniform01(rng) < cfg.alpha;
            const auto& pool = local ? topic_pool[out.topic[i]] : global_pool;
            for (int attempt = 0; attempt < 10; ++attempt) {
                const std::size_t j = pool[uniform_index(pool.size(), rng)];
                if (j == i || std::find(links[i].begin(), links[i].end(), j) != links[i].end())
                    continue;
                if (!local && out.topic[j] == out.topic[i])
                    continue;
                links[i].push_back(j);
                global_pool.push_back(j);
                topic_pool[out.topic[j]].push_back(j);
                break;
            }
        }
    }

    // Backbone: pages left without outlinks link to their successor in a random cycle.
    out.backbone_link.assign(n, false);
    if (n > 1) {
        std::vector<std::size_t> cycle(n);
        std::iota(cycle.begin(), cycle.end(), std::size_t{0});
        std::shuffle(cycle.begin(), cycle.end(), rng);
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::size_t i = cycle[pos];
            if (links[i].empty()) {
                links[i].push_back(cycle[(pos + 1) % n]);
                out.backbone_link[i] = true;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.pages[i].outlinks.reserve(links[i].size());
        for (auto j : links[i])
            out.pages[i].outlinks.push_back(page_url(j));
    }

    // Train split: shuffled prefix of the targets; at least one of each when possible.
    std::vector<std::size_t> shuffled = out.targets;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t nt = shuffled.size();
    std::size_t n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(nt)));
    if (cfg.train_fraction > 0.0 && nt >= 2)
        n_train = std::clamp<std::size_t>(n_train, 1, nt - 1);
    out.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.targets.begin(), out.targets.end());
    return out;
}

GeneratedCorpus generate(const GenConfig& cfg) {
    const auto gp = generate_pages(cfg);
    GeneratedCorpus out;
    std::ostringstream corpus;
    write_corpus(corpus, gp.pages);
    out.corpus = corpus.str();

    std::vector<std::string> members, train;
    for (auto t : gp.targets)
        members.push_back(gp.pages[t].url);
    for (auto t : gp.train)
        train.push_back(gp.pages[t].url);
    std::ostringstream targets;
    write_targets(targets, gp.class_id, members, train);
    out.targets = targets.str();
    return out;
}

CorpusStats corpus_stats(const WebGraph& g, const TargetSet& targets, int max_depth, std::size_t start_samples,
                         std::uint64_t seed) {
    if (targets.members.empty())
        throw ArgumentError("corpus statistics need a nonempty target set");
    CorpusStats s;
    s.pages = g.size();
    s.edges = g.edge_count();
    s.targets = targets.members.size();

    const auto dist = distances_to_targets(g, targets.members, max_depth);
    for (int d : dist) {
        if (d == kUnreachable)
            ++s.unreachable;
        else
            ++s.pages_per_depth[d];
    }

    if (g.size() > 0) {
        Rng rng(seed);
        std::vector<PageId> ids(g.size());
        std::iota(ids.begin(), ids.end(), PageId{0});
        std::shuffle(ids.begin(), ids.end(), rng);
        s.sampled_starts = std::min(start_samples, ids.size());
        for (std::size_t k = 0; k < s.sampled_starts; ++k) {
            const auto fwd = forward_distances(g, ids[k], max_depth);
            for (std::size_t p = 0; p < fwd.size(); ++p) {
                if (fwd[p] == kUnreachable)
                    continue;
                ++s.start_pages_per_depth[fwd[p]];
                if (targets.is_member(static_cast<PageId>(p)))
                    ++s.start_targets_per_depth[fwd[p]];
            }
        }

        std::size_t total_in = 0;
        for (PageId p = 0; p < g.size(); ++p) {
            const auto out_deg = g.out_links(p).size();
            const auto in_deg = g.in_links(p).size();
            s.degree.max_out = std::max(s.degree.max_out, out_deg);
            s.degree.max_in = std::max(s.degree.max_in, in_deg);
            total_in += in_deg;
        }
        s.degree.mean_out = static_cast<double>(g.edge_count()) / static_cast<double>(g.size());
        s.degree.mean_in = static_cast<double>(total_in) / static_cast<double>(g.size());
    }
    return s;
}

void write_stats(std::ostream& out, const CorpusStats& s) {
    out << "# pages=" << s.pages << " edges=" << s.edges << " targets=" << s.targets
        << " unreachable=" << s.unreachable << " sampled_starts=" << s.sampled_starts << '\n';
    out << "# mean_out=" << s.degree.mean_out << " max_out=" << s.degree.max_out << " mean_in=" << s.degree.mean_in
        << " max_in=" << s.degree.max_in << '\n';
    int max_d = -1;
    for (const auto& m : {s.pages_per_depth, s.start_pages_per_depth})
        if (!m.empty())
            max_d = std::max(max_d, m.rbegin()->first);
    auto get = [](const std::map<int, std::size_t>& m, int d) {
        auto it = m.find(d);
        return it == m.end() ? std::size_t{0} : it->second;
    };
    out << "depth,pages_to_targets,start_pages,start_targets\n";
    for (int d = 0; d <= max_d; ++d)
        out << d << ',' << get(s.pages_per_depth, d) << ',' << get(s.start_pages_per_depth, d) << ','
            << get(s.start_targets_per_depth, d) << '\n';
}

} // namespace spiderlab
