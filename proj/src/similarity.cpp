#include "dualctx/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace dualctx {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize_code(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (is_word_char(c)) {
            const std::size_t start = i;
            while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i]))) {
                ++i;
            }
            out.emplace_back(text.substr(start, i - start));
            continue;
        }
        out.emplace_back(1, text[i]);
        ++i;
    }
    return out;
}

std::vector<std::string> token_set(std::string_view text) {
    auto toks = tokenize_code(text);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    return toks;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++inter;
            ++ia;
            ++ib;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    // strip the common prefix and suffix, then a two-row DP over the rest
    while (!a.empty() && !b.empty() && a.front() == b.front()) {
        a.remove_prefix(1);
        b.remove_prefix(1);
    }
    while (!a.empty() && !b.empty() && a.back() == b.back()) {
        a.remove_suffix(1);
        b.remove_suffix(1);
    }
    if (a.size() < b.size()) {
        std::swap(a, b);
    }
    if (b.empty()) {
        return a.size();
    }
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) {
        return 1.0;
    }
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

Bm25Index::Bm25Index(const std::vector<std::vector<std::string>>& docs, double k1, double b) : k1_(k1), b_(b) {
    doc_len_.reserve(docs.size());
    tf_.reserve(docs.size());
    double total = 0.0;
    for (const auto& doc : docs) {
        std::unordered_map<std::string, int> tf;
        for (const auto& t : doc) {
            ++tf[t];
        }
        for (const auto& [term, _] : tf) {
            ++df_[term];
        }
        doc_len_.push_back(doc.size());
        total += static_cast<double>(doc.size());
        tf_.push_back(std::move(tf));
    }
    avg_len_ = docs.empty() ? 0.0 : total / static_cast<double>(docs.size());
}

double Bm25Index::score(const std::vector<std::string>& query_terms, std::size_t doc) const {
    const auto& tf = tf_.at(doc);
    const double n = static_cast<double>(doc_len_.size());
    const double len_norm = avg_len_ > 0.0 ? static_cast<double>(doc_len_[doc]) / avg_len_ : 0.0;
    std::set<std::string_view> seen;
    double s = 0.0;
    for (const auto& q : query_terms) {
        if (!seen.insert(q).second) {
            continue;
        }
        auto it = tf.find(q);
        if (it == tf.end()) {
            continue;
        }
        const double df = static_cast<double>(df_.at(q));
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        const double f = it->second;
        s += idf * f * (k1_ + 1.0) / (f + k1_ * (1.0 - b_ + b_ * len_norm));
    }
    return s;
}

}  // namespace dualctx
