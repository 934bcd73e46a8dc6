#include "dualctx/analogy.hpp"

#include <algorithm>
#include <set>

namespace dualctx {

std::string_view to_string(SimilarityKind kind) {
    switch (kind) {
        case SimilarityKind::Jaccard:
            return "jaccard";
        case SimilarityKind::Edit:
            return "edit";
        case SimilarityKind::Bm25:
            return "bm25";
    }
    return "jaccard";
}

std::optional<SimilarityKind> parse_similarity_kind(std::string_view s) {
    if (s == "jaccard") {
        return SimilarityKind::Jaccard;
    }
    if (s == "edit") {
        return SimilarityKind::Edit;
    }
    if (s == "bm25") {
        return SimilarityKind::Bm25;
    }
    return std::nullopt;
}

AnalogyRetriever::AnalogyRetriever(const ChunkCover& cover, double bm25_k1, double bm25_b) : cover_(&cover) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(cover.chunks().size());
    token_sets_.reserve(cover.chunks().size());
    for (const auto& ck : cover.chunks()) {
        docs.push_back(tokenize_code(ck.text));
        token_sets_.push_back(token_set(ck.text));
    }
    bm25_ = Bm25Index(docs, bm25_k1, bm25_b);
}

double AnalogyRetriever::similarity(std::size_t chunk, std::string_view ck_star, SimilarityKind sim) const {
    switch (sim) {
        case SimilarityKind::Jaccard:
            return jaccard(token_sets_[chunk], token_set(ck_star));
        case SimilarityKind::Edit:
            return edit_similarity(cover_->chunks()[chunk].text, ck_star);
        case SimilarityKind::Bm25:
            return bm25_.score(tokenize_code(ck_star), chunk);
    }
    return 0.0;
}

AnalogyContext AnalogyRetriever::retrieve(std::string_view ck_star, SimilarityKind sim, double threshold,
                                          std::size_t top_k, std::string_view exclude_file) const {
    const auto& chunks = cover_->chunks();
    const auto query_set = token_set(ck_star);
    const auto query_tokens = tokenize_code(ck_star);

    struct Hit {
        std::size_t chunk;
        double score;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (chunks[i].file == exclude_file) {
            continue;
        }
        double s = 0.0;
        switch (sim) {
            case SimilarityKind::Jaccard:
                s = jaccard(token_sets_[i], query_set);
                break;
            case SimilarityKind::Edit:
                s = edit_similarity(chunks[i].text, ck_star);
                break;
            case SimilarityKind::Bm25:
                s = bm25_.score(query_tokens, i);
                break;
        }
        if (s >= threshold) {
            hits.push_back({i, s});
        }
    }
    std::stable_sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        const auto& ca = chunks[a.chunk];
        const auto& cb = chunks[b.chunk];
        return std::tie(ca.file, ca.start_line) < std::tie(cb.file, cb.start_line);
    });

    AnalogyContext ctx;
    std::set<std::string> taken;
    for (const Hit& h : hits) {
        if (ctx.items.size() >= top_k) {
            break;
        }
        const CodeChunk& ck = chunks[h.chunk];
        CodeChunk next = successor(*cover_, ck).value_or(ck);
        if (!taken.insert(next.id()).second) {
            continue;
        }
        ctx.items.push_back(AnalogyItem{ck, std::move(next), h.score});
    }
    return ctx;
}

AnalogyContext retrieve_analogy(std::string_view ck_star, const ChunkCover& cover, const SimilarityFn& sim,
                                double threshold, std::size_t top_k, std::string_view exclude_file) {
    return AnalogyRetriever(cover, sim.k1, sim.b).retrieve(ck_star, sim.kind, threshold, top_k, exclude_file);
}

}  // namespace dualctx
