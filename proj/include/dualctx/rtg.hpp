#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualctx/analogy.hpp"
#include "dualctx/rationale.hpp"

namespace dualctx {

// ---- token counting ----

class TokenCounter {
public:
    virtual ~TokenCounter() = default;
    virtual std::size_t count(std::string_view text) const = 0;
    virtual std::string_view name() const = 0;
};

// Counts tokenize_code tokens: identifier/number runs and punctuation characters.
class CodeTokenCounter final : public TokenCounter {
public:
    std::size_t count(std::string_view text) const override;
    std::string_view name() const override { return "code"; }
};

// Counts whitespace-separated words.
class WhitespaceTokenCounter final : public TokenCounter {
public:
    std::size_t count(std::string_view text) const override;
    std::string_view name() const override { return "whitespace"; }
};

const TokenCounter& default_token_counter();

inline constexpr int kBudgetPresets[] = {256, 512, 1024, 2048, 4096};

// ---- candidates ----

enum class SourceKind { Analogy, RationaleMethod, RationaleClass, RationalePackage };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view s);
// Rationale items rank ahead of analogy items on equal scores.
int source_priority(SourceKind kind);

struct Candidate {
    std::string item_id;
    SourceKind source = SourceKind::Analogy;
    std::string origin_path;
    std::string text;
};

// U = Σ_M ∪ Σ_C ∪ Σ_P ∪ Γ_a. Rationale items are keyed by origin node id,
// analogy items by successor chunk id.
std::vector<Candidate> fuse_candidates(const RationaleContext& rationale, const AnalogyContext& analogy);

struct ScoredItem {
    std::string item_id;
    SourceKind source = SourceKind::Analogy;
    std::string origin_path;
    std::string text;
    double score = 0.0;
    std::size_t token_len = 0;
};

// ---- scoring ----

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
};

// Built-in provider: hashed bag of code tokens, one bucket per FNV-1a hash.
class HashedBagProvider final : public EmbeddingProvider {
public:
    explicit HashedBagProvider(std::size_t dimension = 1024);
    std::vector<double> embed(std::string_view text) const override;
    std::size_t dimension() const override { return dim_; }

private:
    std::size_t dim_;
};

// Cosine similarity; 0 when either vector is zero. Throws ParameterError on a
// dimension mismatch.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

enum class ScorerKind { LexicalJaccard, LexicalEdit, Semantic, Random, Oracle };

std::string_view to_string(ScorerKind kind);
std::optional<ScorerKind> parse_scorer_kind(std::string_view s);

class Scorer {
public:
    static Scorer lexical_jaccard();
    static Scorer lexical_edit();
    // Throws ParameterError when provider is null.
    static Scorer semantic(std::shared_ptr<const EmbeddingProvider> provider);
    static Scorer random(std::uint64_t seed);
    static Scorer oracle(std::map<std::string, double> table);

    ScorerKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }

    // Throws DataError naming the id when an oracle table lacks it.
    double score(const Candidate& item, std::string_view ck_star) const;

private:
    ScorerKind kind_ = ScorerKind::LexicalJaccard;
    std::uint64_t seed_ = 0;
    std::shared_ptr<const EmbeddingProvider> provider_;
    std::shared_ptr<const std::map<std::string, double>> table_;
};

// Oracle table file: JSON object {item_id: score}.
std::map<std::string, double> parse_oracle_table(std::string_view json_text);

std::vector<ScoredItem> score_candidates(const std::vector<Candidate>& candidates, std::string_view ck_star,
                                         const Scorer& scorer, const TokenCounter& counter = default_token_counter());

// ---- truncation ----

struct TruncatedDualContext {
    std::vector<ScoredItem> selected;  // rank order
    std::size_t budget = 0;
    std::size_t used_tokens = 0;
};

// Canonical rank order: score desc, source priority, item_id asc.
bool rank_before(const ScoredItem& a, const ScoredItem& b);

// Longest prefix of the rank order whose token total fits the budget.
TruncatedDualContext build_tdc(std::vector<ScoredItem> scored, std::size_t budget);

}  // namespace dualctx
