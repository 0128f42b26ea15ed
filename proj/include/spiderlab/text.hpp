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
#include <unordered_set>
#include <vector>

namespace spiderlab {

using Tokens = std::vector<std::string>;

struct TermWeight {
    std::uint32_t index = 0;
    double weight = 0.0;

    friend bool operator==(const TermWeight&, const TermWeight&) = default;
};

/// Sparse page vector: indices strictly ascending, weights positive, unit L2 norm (or empty).
struct TermVector {
    std::vector<TermWeight> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
    double norm() const;

    friend bool operator==(const TermVector&, const TermVector&) = default;
};

double dot(const TermVector& a, const TermVector& b);

/// The shipped stopword list, stemmed.
const std::unordered_set<std::string>& stopwords();

/// Lowercase, split on non-alphanumerics, drop tokens shorter than 2 or longer than 40 and
/// pure digit runs, Porter-stem, then drop stemmed stopwords.
Tokens tokenize(std::string_view text);

/// Term index with document frequencies. Indices are dense and assigned in insertion order.
class Dictionary {
public:
    Dictionary() = default;

    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    std::size_t total_docs() const { return total_docs_; }

    std::optional<std::uint32_t> index_of(const std::string& term) const;
    const std::string& term(std::uint32_t index) const { return terms_[index]; }
    std::uint32_t doc_freq(std::uint32_t index) const { return df_[index]; }

    /// Appends a term with the given document frequency; returns its index.
    std::uint32_t add(std::string term, std::uint32_t df);
    void set_total_docs(std::size_t n) { total_docs_ = n; }

    void write(std::ostream& out) const;
    static Dictionary read(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static Dictionary load(const std::filesystem::path& path);

private:
    std::vector<std::string> terms_;
    std::vector<std::uint32_t> df_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t total_docs_ = 0;
};

Dictionary build_dictionary(std::span<const Tokens> docs);

/// IG(T) = H(C) - H(C|T) in bits for a binary class C and binary term presence T,
/// from the 2x2 counts: docs containing the term (and how many of those are positive)
/// out of `docs` total with `positives` positive.
double information_gain(std::size_t with_term, std::size_t positive_with_term, std::size_t positives,
                        std::size_t docs);

/// IG of every dictionary term over the labelled docs; entry i belongs to index i.
std::vector<double> information_gains(const Dictionary& dict, std::span<const Tokens> docs,
                                      std::span<const bool> labels);

/// Keeps the k highest-IG terms (ties by lower original index) re-indexed in IG rank order.
Dictionary information_gain_select(const Dictionary& dict, std::span<const Tokens> docs,
                                   std::span<const bool> labels, std::size_t k);

/// L2-normalised term counts over dictionary terms; out-of-dictionary tokens are ignored.
TermVector vectorize(std::span<const std::string> tokens, const Dictionary& dict);

} // namespace spiderlab
