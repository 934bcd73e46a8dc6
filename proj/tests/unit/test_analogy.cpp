#include <catch_amalgamated.hpp>

#include "dualctx/analogy.hpp"
#include "dualctx/error.hpp"

using namespace dualctx;

namespace {

ChunkCover two_file_cover() {
    // lib.py: a 4-line window at 1, 3 and 5 (ell 4, eta 2) over 8 lines.
    const std::string lib =
        "def load(path):\n"
        "    with open(path) as fh:\n"
        "        data = fh.read()\n"
        "    return parse(data)\n"
        "def parse(text):\n"
        "    rows = text.split()\n"
        "    return rows\n"
        "VERSION = 1\n";
    const std::string other = "x = 1\ny = 2\n";
    return build_cover({SourceFile::from_text("lib.py", lib), SourceFile::from_text("other.py", other)}, 4, 2);
}

}  // namespace

TEST_CASE("an identical chunk is found and its successor returned") {
    const auto cover = two_file_cover();
    const auto& first = cover.chunks()[0];
    const auto ctx = retrieve_analogy(first.text, cover, {}, 0.3, 5, "edited.py");
    REQUIRE_FALSE(ctx.items.empty());
    CHECK(ctx.items[0].score == 1.0);
    CHECK(ctx.items[0].source_chunk.start_line == 1);
    CHECK(ctx.items[0].successor.start_line == 3);
}

TEST_CASE("the threshold is inclusive and filters weaker chunks") {
    const auto cover = two_file_cover();
    const AnalogyRetriever r(cover);
    const std::string q = "x = 1\ny = 2";
    const double s = r.similarity(cover.chunks().size() - 1, q, SimilarityKind::Jaccard);
    CHECK(s == 1.0);
    const auto ctx = r.retrieve(q, SimilarityKind::Jaccard, 1.0, 5, "edited.py");
    REQUIRE(ctx.items.size() == 1);
    CHECK(ctx.items[0].successor.file == "other.py");
    // A tail chunk has no successor and stands in for itself.
    CHECK(ctx.items[0].successor == ctx.items[0].source_chunk);
    CHECK(r.retrieve("zzz qqq", SimilarityKind::Jaccard, 0.3, 5, "edited.py").items.empty());
}

TEST_CASE("chunks of the edited file are excluded") {
    const auto cover = two_file_cover();
    const auto ctx = retrieve_analogy(cover.chunks()[0].text, cover, {}, 0.0, 10, "lib.py");
    for (const auto& it : ctx.items) {
        CHECK(it.source_chunk.file != "lib.py");
    }
}

TEST_CASE("results are sorted, capped and distinct by successor") {
    const auto cover = two_file_cover();
    const auto ctx = retrieve_analogy("def load parse return data rows", cover, {}, 0.0, 10, "edited.py");
    std::set<std::string> succ;
    for (std::size_t i = 0; i < ctx.items.size(); ++i) {
        CHECK(succ.insert(ctx.items[i].successor.id()).second);
        if (i) {
            CHECK(ctx.items[i - 1].score >= ctx.items[i].score);
        }
    }
    CHECK(retrieve_analogy("def load parse", cover, {}, 0.0, 1, "edited.py").items.size() == 1);
}

TEST_CASE("bm25 and edit similarity modes") {
    const auto cover = two_file_cover();
    const auto& first = cover.chunks()[0];
    SimilarityFn bm25{SimilarityKind::Bm25, 1.2, 0.75};
    const auto b = retrieve_analogy("parse data", cover, bm25, 0.0, 5, "edited.py");
    REQUIRE_FALSE(b.items.empty());
    CHECK(b.items[0].score > 0.0);
    SimilarityFn edit{SimilarityKind::Edit};
    const auto e = retrieve_analogy(first.text, cover, edit, 0.99, 5, "edited.py");
    REQUIRE(e.items.size() == 1);
    CHECK(e.items[0].source_chunk == first);
}

TEST_CASE("similarity kinds parse by name") {
    CHECK(parse_similarity_kind("jaccard") == SimilarityKind::Jaccard);
    CHECK(parse_similarity_kind("bm25") == SimilarityKind::Bm25);
    CHECK_FALSE(parse_similarity_kind("cosine").has_value());
}
