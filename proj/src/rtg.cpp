#include "dualctx/rtg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "dualctx/error.hpp"
#include "dualctx/text.hpp"

namespace dualctx {

std::size_t CodeTokenCounter::count(std::string_view text) const { return tokenize_code(text).size(); }

std::size_t WhitespaceTokenCounter::count(std::string_view text) const {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) {
            ++n;
        }
        in_word = !space;
    }
    return n;
}

const TokenCounter& default_token_counter() {
    static const CodeTokenCounter counter;
    return counter;
}

std::string_view to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::Analogy:
            return "analogy";
        case SourceKind::RationaleMethod:
            return "rationale-method";
        case SourceKind::RationaleClass:
            return "rationale-class";
        case SourceKind::RationalePackage:
            return "rationale-package";
    }
    return "analogy";
}

std::optional<SourceKind> parse_source_kind(std::string_view s) {
    for (auto k : {SourceKind::Analogy, SourceKind::RationaleMethod, SourceKind::RationaleClass,
                   SourceKind::RationalePackage}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

int source_priority(SourceKind kind) { return kind == SourceKind::Analogy ? 1 : 0; }

std::vector<Candidate> fuse_candidates(const RationaleContext& rationale, const AnalogyContext& analogy) {
    std::vector<Candidate> out;
    auto add = [&](const std::vector<RationaleItem>& items, SourceKind kind) {
        for (const auto& it : items) {
            out.push_back({it.origin_id, kind, it.origin_path, it.text});
        }
    };
    add(rationale.methods, SourceKind::RationaleMethod);
    add(rationale.classes, SourceKind::RationaleClass);
    add(rationale.packages, SourceKind::RationalePackage);
    for (const auto& a : analogy.items) {
        out.push_back({a.successor.id(), SourceKind::Analogy, a.successor.file, a.successor.text});
    }
    return out;
}

HashedBagProvider::HashedBagProvider(std::size_t dimension) : dim_(dimension) {
    if (dim_ == 0) {
        throw ParameterError("embedding dimension must be positive");
    }
}

std::vector<double> HashedBagProvider::embed(std::string_view text) const {
    std::vector<double> v(dim_, 0.0);
    for (const auto& tok : tokenize_code(text)) {
        v[fnv1a64(tok) % dim_] += 1.0;
    }
    return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ParameterError("embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string_view to_string(ScorerKind kind) {
    switch (kind) {
        case ScorerKind::LexicalJaccard:
            return "lexical-jaccard";
        case ScorerKind::LexicalEdit:
            return "lexical-edit";
        case ScorerKind::Semantic:
            return "semantic";
        case ScorerKind::Random:
            return "random";
        case ScorerKind::Oracle:
            return "oracle";
    }
    return "lexical-jaccard";
}

std::optional<ScorerKind> parse_scorer_kind(std::string_view s) {
    for (auto k : {ScorerKind::LexicalJaccard, ScorerKind::LexicalEdit, ScorerKind::Semantic, ScorerKind::Random,
                   ScorerKind::Oracle}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

Scorer Scorer::lexical_jaccard() { return Scorer{}; }

Scorer Scorer::lexical_edit() {
    Scorer s;
    s.kind_ = ScorerKind::LexicalEdit;
    return s;
}

Scorer Scorer::semantic(std::shared_ptr<const EmbeddingProvider> provider) {
    if (!provider) {
        throw ParameterError("semantic scorer requires an embedding provider");
    }
    Scorer s;
    s.kind_ = ScorerKind::Semantic;
    s.provider_ = std::move(provider);
    return s;
}

Scorer Scorer::random(std::uint64_t seed) {
    Scorer s;
    s.kind_ = ScorerKind::Random;
    s.seed_ = seed;
    return s;
}

Scorer Scorer::oracle(std::map<std::string, double> table) {
    Scorer s;
    s.kind_ = ScorerKind::Oracle;
    s.table_ = std::make_shared<const std::map<std::string, double>>(std::move(table));
    return s;
}

double Scorer::score(const Candidate& item, std::string_view ck_star) const {
    switch (kind_) {
        case ScorerKind::LexicalJaccard:
            return jaccard(token_set(item.text), token_set(ck_star));
        case ScorerKind::LexicalEdit:
            return edit_similarity(item.text, ck_star);
        case ScorerKind::Semantic:
            return cosine(provider_->embed(item.text), provider_->embed(ck_star));
        case ScorerKind::Random:
            return keyed_uniform(seed_, item.item_id);
        case ScorerKind::Oracle: {
            auto it = table_->find(item.item_id);
            if (it == table_->end()) {
                throw DataError("oracle table has no score for item '" + item.item_id + "'");
            }
            return it->second;
        }
    }
    return 0.0;
}

std::map<std::string, double> parse_oracle_table(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("oracle table: ") + e.what());
    }
    if (!j.is_object()) {
        throw DataError("oracle table: expected a JSON object of item id to score");
    }
    std::map<std::string, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number()) {
            throw DataError("oracle table: score for '" + it.key() + "' is not a number");
        }
        out.emplace(it.key(), it.value().get<double>());
    }
    return out;
}

std::vector<ScoredItem> score_candidates(const std::vector<Candidate>& candidates, std::string_view ck_star,
                                         const Scorer& scorer, const TokenCounter& counter) {
    std::vector<ScoredItem> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back({c.item_id, c.source, c.origin_path, c.text, scorer.score(c, ck_star), counter.count(c.text)});
    }
    return out;
}

bool rank_before(const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    const int pa = source_priority(a.source);
    const int pb = source_priority(b.source);
    if (pa != pb) {
        return pa < pb;
    }
    return a.item_id < b.item_id;
}

TruncatedDualContext build_tdc(std::vector<ScoredItem> scored, std::size_t budget) {
    std::stable_sort(scored.begin(), scored.end(), rank_before);
    TruncatedDualContext tdc;
    tdc.budget = budget;
    for (auto& item : scored) {
        if (tdc.used_tokens + item.token_len > budget) {
            break;
        }
        tdc.used_tokens += item.token_len;
        tdc.selected.push_back(std::move(item));
    }
    return tdc;
}

}  // namespace dualctx
