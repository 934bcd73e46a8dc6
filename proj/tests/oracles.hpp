#pragma once

// Reference implementations written straight from the definitions, kept apart
// from the library code they check.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Full-matrix Wagner-Fischer.
inline std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d[a.size()][b.size()];
}

inline double edit_similarity(const std::string& a, const std::string& b) {
    const std::size_t m = std::max(a.size(), b.size());
    if (m == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

struct Prf {
    double p, r, f1;
};

// Multiset overlap counted by matching each predicted token against a pool.
inline Prf multiset_prf(const std::vector<std::string>& pred, const std::vector<std::string>& gt) {
    std::vector<std::string> pool = gt;
    std::size_t hit = 0;
    for (const auto& p : pred) {
        auto it = std::find(pool.begin(), pool.end(), p);
        if (it != pool.end()) {
            pool.erase(it);
            ++hit;
        }
    }
    const double p = pred.empty() ? 0.0 : double(hit) / double(pred.size());
    const double r = gt.empty() ? 0.0 : double(hit) / double(gt.size());
    return {p, r, (p + r) > 0 ? 2 * p * r / (p + r) : 0.0};
}

struct Window {
    int start, len;
};

// Windows of one file of n lines, from the cover definition.
inline std::vector<Window> cover_windows(int n, int ell, int eta) {
    std::vector<Window> out;
    if (n == 0) return out;
    if (n <= ell) return {{1, n}};
    int s = 1;
    for (; s + ell - 1 <= n; s += eta) out.push_back({s, ell});
    if (out.back().start + ell - 1 < n) out.push_back({n - ell + 1, ell});
    return out;
}

struct Item {
    std::string id;
    double score;
    int priority;
    std::size_t len;
};

// Enumerates every subset; keeps those closed under "higher rank" and within
// budget; returns the ids of the largest one in rank order.
inline std::vector<std::string> best_rank_prefix(std::vector<Item> items, std::size_t budget) {
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.priority != b.priority) return a.priority < b.priority;
        return a.id < b.id;
    });
    const std::size_t n = items.size();
    std::size_t best_mask = 0;
    int best_size = -1;
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        std::size_t total = 0;
        bool closed = true;
        bool gap = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) {
                // a chosen item ranked below an unchosen one breaks the rank constraint
                closed = closed && !gap;
                total += items[i].len;
            } else {
                gap = true;
            }
        }
        if (!closed || total > budget) continue;
        const int size = __builtin_popcountll(mask);
        if (size > best_size) {
            best_size = size;
            best_mask = mask;
        }
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        if (best_mask >> i & 1) ids.push_back(items[i].id);
    }
    return ids;
}

}  // namespace oracle
