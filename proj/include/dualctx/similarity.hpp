#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dualctx {

// Splits code into identifier/number runs and single-character punctuation;
// whitespace separates tokens and is dropped.
std::vector<std::string> tokenize_code(std::string_view text);

// Sorted, de-duplicated tokens.
std::vector<std::string> token_set(std::string_view text);

// |a ∩ b| / |a ∪ b| over sorted unique token vectors; 1.0 when both are empty.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein(a, b) / max(|a|, |b|); 1.0 when both are empty.
double edit_similarity(std::string_view a, std::string_view b);

// Okapi BM25 over a fixed corpus of token lists.
class Bm25Index {
public:
    Bm25Index() = default;
    Bm25Index(const std::vector<std::vector<std::string>>& docs, double k1 = 1.2, double b = 0.75);

    double score(const std::vector<std::string>& query_terms, std::size_t doc) const;
    std::size_t size() const { return doc_len_.size(); }

private:
    double k1_ = 1.2;
    double b_ = 0.75;
    double avg_len_ = 0.0;
    std::vector<std::size_t> doc_len_;
    std::vector<std::unordered_map<std::string, int>> tf_;
    std::unordered_map<std::string, std::size_t> df_;
};

}  // namespace dualctx
