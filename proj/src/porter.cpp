// Porter stemming algorithm (M.F. Porter, 1980), original rule set.
// Operates on lowercase ASCII words.

#include "spiderlab/porter.hpp"

#include <array>

namespace spiderlab {

namespace {

class Stemmer {
public:
    explicit Stemmer(std::string word) : b_(std::move(word)) {}

    std::string run() {
        if (b_.size() <= 2)
            return b_;
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        return b_;
    }

private:
    std::string b_;
    std::size_t j_ = 0; // length of the stem once a suffix has matched

    bool is_consonant(std::size_t i) const {
        switch (b_[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_consonant(i - 1);
        default:
            return true;
        }
    }

    // m() in [C](VC)^m[V] over b_[0, len).
    int measure(std::size_t len) const {
        int n = 0;
        std::size_t i = 0;
        while (i < len && is_consonant(i))
            ++i;
        while (i < len) {
            while (i < len && !is_consonant(i))
                ++i;
            if (i >= len)
                break;
            while (i < len && is_consonant(i))
                ++i;
            ++n;
        }
        return n;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i)
            if (!is_consonant(i))
                return true;
        return false;
    }

    bool double_consonant(std::size_t len) const {
        return len >= 2 && b_[len - 1] == b_[len - 2] && is_consonant(len - 1);
    }

    // *o: stem ends cvc, and the final c is not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3 || !is_consonant(len - 1) || is_consonant(len - 2) || !is_consonant(len - 3))
            return false;
        const char c = b_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view suffix) {
        if (suffix.size() > b_.size() || b_.compare(b_.size() - suffix.size(), suffix.size(), suffix) != 0)
            return false;
        j_ = b_.size() - suffix.size();
        return true;
    }

    void set_to(std::string_view s) { b_.replace(j_, std::string::npos, s); }

    void replace_if_measure(std::string_view s) {
        if (measure(j_) > 0)
            set_to(s);
    }

    void step1a() {
        if (ends("sses"))
            set_to("ss");
        else if (ends("ies"))
            set_to("i");
        else if (ends("ss"))
            ;
        else if (ends("s"))
            set_to("");
    }

    void step1b() {
        if (ends("eed")) {
            if (measure(j_) > 0)
                set_to("ee");
            return;
        }
        bool stripped = false;
        if (ends("ed") && has_vowel(j_)) {
            set_to("");
            stripped = true;
        } else if (ends("ing") && has_vowel(j_)) {
            set_to("");
            stripped = true;
        }
        if (!stripped)
            return;
        if (ends("at"))
            set_to("ate");
        else if (ends("bl"))
            set_to("ble");
        else if (ends("iz"))
            set_to("ize");
        else if (double_consonant(b_.size())) {
            const char c = b_.back();
            if (c != 'l' && c != 's' && c != 'z')
                b_.pop_back();
        } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
            b_ += 'e';
        }
    }

    void step1c() {
        if (ends("y") && has_vowel(j_))
            b_.back() = 'i';
    }

    void step2() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 20> rules{{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},   {"izer", "ize"},
            {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},  {"eli", "e"},       {"ousli", "ous"},
            {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},   {"alism", "al"},    {"iveness", "ive"},
            {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},   {"iviti", "ive"},   {"biliti", "ble"},
        }};
        apply_longest(rules);
    }

    void step3() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> rules{{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""}, {"ness", ""},
        }};
        apply_longest(rules);
    }

    template <std::size_t N>
    void apply_longest(const std::array<std::pair<std::string_view, std::string_view>, N>& rules) {
        // Longest matching suffix wins; a failed measure test does not fall through.
        std::size_t best = N;
        std::size_t best_len = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const auto& s = rules[i].first;
            if (s.size() > best_len && s.size() <= b_.size() && b_.compare(b_.size() - s.size(), s.size(), s) == 0) {
                best = i;
                best_len = s.size();
            }
        }
        if (best == N)
            return;
        j_ = b_.size() - best_len;
        replace_if_measure(rules[best].second);
    }

    void step4() {
        static constexpr std::array<std::string_view, 19> suffixes{
            "al", "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion", "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
        };
        std::size_t best_len = 0;
        for (auto s : suffixes)
            if (s.size() > best_len && s.size() <= b_.size() && b_.compare(b_.size() - s.size(), s.size(), s) == 0)
                best_len = s.size();
        if (best_len == 0)
            return;
        j_ = b_.size() - best_len;
        if (b_.compare(j_, std::string::npos, "ion") == 0 && !(j_ > 0 && (b_[j_ - 1] == 's' || b_[j_ - 1] == 't')))
            return;
        if (measure(j_) > 1)
            b_.erase(j_);
    }

    void step5a() {
        if (b_.back() != 'e')
            return;
        const std::size_t len = b_.size() - 1;
        const int m = measure(len);
        if (m > 1 || (m == 1 && !cvc(len)))
            b_.pop_back();
    }

    void step5b() {
        if (measure(b_.size()) > 1 && double_consonant(b_.size()) && b_.back() == 'l')
            b_.pop_back();
    }
};

} // namespace

std::string porter_stem(std::string_view word) { return Stemmer(std::string(word)).run(); }

} // namespace spiderlab
