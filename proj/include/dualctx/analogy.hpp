#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualctx/chunking.hpp"
#include "dualctx/similarity.hpp"

namespace dualctx {

enum class SimilarityKind { Jaccard, Edit, Bm25 };

std::string_view to_string(SimilarityKind kind);
std::optional<SimilarityKind> parse_similarity_kind(std::string_view s);

struct SimilarityFn {
    SimilarityKind kind = SimilarityKind::Jaccard;
    double k1 = 1.2;  // bm25 only
    double b = 0.75;  // bm25 only
};

struct AnalogyItem {
    CodeChunk source_chunk;  // the chunk that matched the unfinished chunk
    CodeChunk successor;     // its successor, or the chunk itself when it has none
    double score = 0.0;

    const std::string& text() const { return successor.text; }
};

// Sorted by (score desc, file asc, start_line asc).
struct AnalogyContext {
    std::vector<AnalogyItem> items;
};

// Scores cover chunks against an unfinished chunk. Token statistics are computed
// once per cover so repeated queries over the same cover are cheap.
class AnalogyRetriever {
public:
    AnalogyRetriever(const ChunkCover& cover, double bm25_k1 = 1.2, double bm25_b = 0.75);

    // Admits chunks outside exclude_file with sim >= threshold and returns the
    // successors of the top_k highest-scoring ones (distinct successors only).
    AnalogyContext retrieve(std::string_view ck_star, SimilarityKind sim, double threshold, std::size_t top_k,
                            std::string_view exclude_file) const;

    double similarity(std::size_t chunk, std::string_view ck_star, SimilarityKind sim) const;

private:
    const ChunkCover* cover_;
    std::vector<std::vector<std::string>> token_sets_;
    Bm25Index bm25_;
};

AnalogyContext retrieve_analogy(std::string_view ck_star, const ChunkCover& cover, const SimilarityFn& sim,
                                double threshold, std::size_t top_k, std::string_view exclude_file);

}  // namespace dualctx
