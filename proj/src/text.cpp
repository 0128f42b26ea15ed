#include "spiderlab/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "spiderlab/errors.hpp"
#include "spiderlab/porter.hpp"
#include "stopwords_data.hpp"

namespace spiderlab {

double TermVector::norm() const {
    double s = 0.0;
    for (const auto& e : entries)
        s += e.weight * e.weight;
    return std::sqrt(s);
}

double dot(const TermVector& a, const TermVector& b) {
    double s = 0.0;
    auto i = a.entries.begin();
    auto j = b.entries.begin();
    while (i != a.entries.end() && j != b.entries.end()) {
        if (i->index < j->index)
            ++i;
        else if (j->index < i->index)
            ++j;
        else {
            s += i->weight * j->weight;
            ++i;
            ++j;
        }
    }
    return s;
}

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = [] {
        std::unordered_set<std::string> s;
        std::istringstream in{std::string(detail::kStopwordList)};
        std::string w;
        while (in >> w)
            s.insert(porter_stem(w));
        return s;
    }();
    return words;
}

Tokens tokenize(std::string_view text) {
    const auto& stop = stopwords();
    Tokens out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2 && cur.size() <= 40 &&
            !std::all_of(cur.begin(), cur.end(), [](unsigned char c) { return std::isdigit(c); })) {
            std::string stem = porter_stem(cur);
            if (!stop.contains(stem))
                out.push_back(std::move(stem));
        }
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return out;
}

std::optional<std::uint32_t> Dictionary::index_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::uint32_t Dictionary::add(std::string term, std::uint32_t df) {
    const auto idx = static_cast<std::uint32_t>(terms_.size());
    auto [it, inserted] = index_.emplace(term, idx);
    if (!inserted)
        throw ArgumentError("duplicate dictionary term '" + term + "'");
    terms_.push_back(std::move(term));
    df_.push_back(df);
    return idx;
}

void Dictionary::write(std::ostream& out) const {
    out << "docs\t" << total_docs_ << '\n';
    for (std::size_t i = 0; i < terms_.size(); ++i)
        out << terms_[i] << '\t' << i << '\t' << df_[i] << '\n';
}

Dictionary Dictionary::read(std::istream& in) {
    Dictionary d;
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line))
        throw LoadError("dictionary file is empty", 1);
    {
        std::istringstream hs(line);
        std::string tag;
        std::size_t docs = 0;
        if (!(hs >> tag >> docs) || tag != "docs")
            throw LoadError("dictionary header must be 'docs<TAB>N'", 1);
        d.total_docs_ = docs;
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string term;
        std::size_t index = 0;
        std::uint32_t df = 0;
        if (!(ls >> term >> index >> df))
            throw LoadError("malformed dictionary entry", lineno);
        if (index != d.size())
            throw LoadError("dictionary indices must be dense and ascending", lineno);
        d.add(std::move(term), df);
    }
    return d;
}

void Dictionary::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw LoadError("cannot write dictionary file " + path.string());
    write(out);
}

Dictionary Dictionary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open dictionary file " + path.string());
    return read(in);
}

Dictionary build_dictionary(std::span<const Tokens> docs) {
    Dictionary d;
    std::unordered_map<std::string, std::uint32_t> idx;
    std::vector<std::uint32_t> df;
    std::vector<std::string> terms;
    std::vector<std::size_t> last_doc;
    for (std::size_t doc = 0; doc < docs.size(); ++doc) {
        for (const auto& tok : docs[doc]) {
            auto [it, inserted] = idx.emplace(tok, static_cast<std::uint32_t>(terms.size()));
            if (inserted) {
                terms.push_back(tok);
                df.push_back(0);
                last_doc.push_back(static_cast<std::size_t>(-1));
            }
            const auto i = it->second;
            if (last_doc[i] != doc) {
                last_doc[i] = doc;
                ++df[i];
            }
        }
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        d.add(std::move(terms[i]), df[i]);
    d.set_total_docs(docs.size());
    return d;
}

namespace {

double entropy2(double a, double b) {
    const double n = a + b;
    if (n <= 0.0)
        return 0.0;
    double h = 0.0;
    for (double x : {a, b})
        if (x > 0.0) {
            const double p = x / n;
            h -= p * std::log2(p);
        }
    return h;
}

} // namespace

double information_gain(std::size_t with_term, std::size_t positive_with_term, std::size_t positives,
                        std::size_t docs) {
    if (docs == 0)
        return 0.0;
    const double n = static_cast<double>(docs);
    const double pos = static_cast<double>(positives);
    const double w = static_cast<double>(with_term);
    const double pw = static_cast<double>(positive_with_term);
    const double wo = n - w;
    const double pwo = pos - pw;
    const double h_c = entropy2(pos, n - pos);
    const double h_c_given_t = (w / n) * entropy2(pw, w - pw) + (wo / n) * entropy2(pwo, wo - pwo);
    return std::max(0.0, h_c - h_c_given_t);
}

std::vector<double> information_gains(const Dictionary& dict, std::span<const Tokens> docs,
                                      std::span<const bool> labels) {
    if (docs.size() != labels.size())
        throw ArgumentError("information gain needs one label per document");
    std::vector<std::size_t> with(dict.size(), 0), pos_with(dict.size(), 0);
    std::vector<std::size_t> last(dict.size(), static_cast<std::size_t>(-1));
    std::size_t positives = 0;
    for (std::size_t doc = 0; doc < docs.size(); ++doc) {
        if (labels[doc])
            ++positives;
        for (const auto& tok : docs[doc]) {
            auto i = dict.index_of(tok);
            if (!i || last[*i] == doc)
                continue;
            last[*i] = doc;
            ++with[*i];
            if (labels[doc])
                ++pos_with[*i];
        }
    }
    std::vector<double> ig(dict.size());
    for (std::size_t i = 0; i < dict.size(); ++i)
        ig[i] = information_gain(with[i], pos_with[i], positives, docs.size());
    return ig;
}

Dictionary information_gain_select(const Dictionary& dict, std::span<const Tokens> docs,
                                   std::span<const bool> labels, std::size_t k) {
    if (docs.empty())
        throw ArgumentError("information gain selection needs at least one document");
    if (k == 0)
        throw ArgumentError("dictionary cap must be at least 1");
    const auto ig = information_gains(dict, docs, labels);
    std::vector<std::uint32_t> order(dict.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return ig[a] > ig[b]; });
    order.resize(std::min(k, order.size()));

    Dictionary out;
    for (auto i : order)
        out.add(dict.term(i), dict.doc_freq(i));
    out.set_total_docs(dict.total_docs());
    return out;
}

TermVector vectorize(std::span<const std::string> tokens, const Dictionary& dict) {
    std::unordered_map<std::uint32_t, double> counts;
    for (const auto& tok : tokens)
        if (auto i = dict.index_of(tok))
            counts[*i] += 1.0;
    TermVector v;
    v.entries.reserve(counts.size());
    for (const auto& [idx, c] : counts)
        v.entries.push_back({idx, c});
    std::sort(v.entries.begin(), v.entries.end(),
              [](const TermWeight& a, const TermWeight& b) { return a.index < b.index; });
    const double n = v.norm();
    for (auto& e : v.entries)
        e.weight /= n;
    return v;
}

} // namespace spiderlab
