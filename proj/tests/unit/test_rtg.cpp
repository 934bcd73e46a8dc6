#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "dualctx/error.hpp"
#include "dualctx/rtg.hpp"
#include "oracles.hpp"

using namespace dualctx;

namespace {

ScoredItem item(std::string id, double score, std::size_t len, SourceKind src = SourceKind::Analogy) {
    ScoredItem s;
    s.item_id = std::move(id);
    s.score = score;
    s.token_len = len;
    s.source = src;
    return s;
}

std::vector<std::string> ids(const TruncatedDualContext& tdc) {
    std::vector<std::string> out;
    for (const auto& s : tdc.selected) out.push_back(s.item_id);
    return out;
}

std::vector<ScoredItem> random_items(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> score(0, 6);
    std::uniform_int_distribution<int> len(0, 60);
    std::uniform_int_distribution<int> src(0, 3);
    std::vector<ScoredItem> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(item("i" + std::to_string(i), score(rng) / 6.0, len(rng), static_cast<SourceKind>(src(rng))));
    }
    return out;
}

}  // namespace

TEST_CASE("token counters") {
    CHECK(default_token_counter().count("") == 0);
    CHECK(default_token_counter().count("a b c") == 3);
    CHECK(default_token_counter().count("f(x)") == 4);
    CHECK(WhitespaceTokenCounter{}.count("f(x) + 1\n\tz") == 4);
}

TEST_CASE("build_tdc examples") {
    const std::vector<ScoredItem> u = {item("a", 0.9, 100), item("b", 0.8, 300), item("c", 0.7, 50)};
    CHECK(ids(build_tdc(u, 10000)) == std::vector<std::string>{"a", "b", "c"});
    CHECK(build_tdc(u, 0).selected.empty());
    const auto tdc = build_tdc(u, 250);
    CHECK(ids(tdc) == std::vector<std::string>{"a"});
    CHECK(tdc.used_tokens == 100);
    CHECK(tdc.budget == 250);
}

TEST_CASE("zero-length items still respect rank order") {
    const std::vector<ScoredItem> u = {item("a", 0.9, 10), item("b", 0.8, 0), item("c", 0.7, 5)};
    CHECK(ids(build_tdc(u, 0)).empty());
    CHECK(ids(build_tdc(u, 10)) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("ties rank rationale before analogy, then by id") {
    const std::vector<ScoredItem> u = {item("a", 0.5, 1, SourceKind::Analogy),
                                       item("z", 0.5, 1, SourceKind::RationaleClass),
                                       item("m", 0.5, 1, SourceKind::RationaleMethod)};
    CHECK(ids(build_tdc(u, 100)) == std::vector<std::string>{"m", "z", "a"});
}

TEST_CASE("build_tdc equals the exhaustive oracle") {
    std::mt19937 rng(5);
    for (int round = 0; round < 2000; ++round) {
        const int n = std::uniform_int_distribution<int>(0, 10)(rng);
        const auto u = random_items(rng, n);
        const std::size_t budget = std::uniform_int_distribution<int>(0, 300)(rng);
        std::vector<oracle::Item> o;
        for (const auto& s : u) o.push_back({s.item_id, s.score, source_priority(s.source), s.token_len});
        const auto tdc = build_tdc(u, budget);
        CHECK(ids(tdc) == oracle::best_rank_prefix(o, budget));
        CHECK(tdc.used_tokens <= budget);
    }
}

TEST_CASE("selection depends only on rank order") {
    std::mt19937 rng(9);
    for (int round = 0; round < 200; ++round) {
        auto u = random_items(rng, 8);
        const std::size_t budget = std::uniform_int_distribution<int>(0, 300)(rng);
        auto v = u;
        for (auto& s : v) s.score = std::exp(3 * s.score) - 7;
        CHECK(ids(build_tdc(u, budget)) == ids(build_tdc(v, budget)));
        std::shuffle(v.begin(), v.end(), rng);
        CHECK(ids(build_tdc(u, budget)) == ids(build_tdc(v, budget)));
    }
}

TEST_CASE("lexical scorers") {
    const Candidate c{"x", SourceKind::Analogy, "p.py", "a = b(c)"};
    CHECK(Scorer::lexical_jaccard().score(c, "a = b(c)") == 1.0);
    CHECK(Scorer::lexical_edit().score(c, "a = b(c)") == 1.0);
    CHECK(Scorer::lexical_edit().score(c, "") == 0.0);
}

TEST_CASE("random scorer is keyed by item id, not call order") {
    std::vector<Candidate> u;
    for (int i = 0; i < 20; ++i) u.push_back({"id" + std::to_string(i), SourceKind::Analogy, "p", "t"});
    const auto s = Scorer::random(42);
    const auto a = score_candidates(u, "q", s);
    auto perm = u;
    std::reverse(perm.begin(), perm.end());
    const auto b = score_candidates(perm, "q", s);
    for (const auto& x : a) {
        auto it = std::find_if(b.begin(), b.end(), [&](const ScoredItem& y) { return y.item_id == x.item_id; });
        CHECK(it->score == x.score);
    }
    CHECK(Scorer::random(43).score(u[0], "q") != s.score(u[0], "q"));
}

TEST_CASE("oracle scorer reads its table and names missing ids") {
    const auto s = Scorer::oracle(parse_oracle_table(R"({"A": 0.9, "B": 0.1})"));
    CHECK(s.score({"A", SourceKind::Analogy, "", ""}, "q") == 0.9);
    CHECK(s.score({"B", SourceKind::Analogy, "", ""}, "q") == 0.1);
    CHECK_THROWS_WITH(s.score({"C", SourceKind::Analogy, "", ""}, "q"), Catch::Matchers::ContainsSubstring("'C'"));
    CHECK_THROWS_AS(parse_oracle_table(R"({"A": "high"})"), DataError);
    CHECK_THROWS_AS(parse_oracle_table("[1]"), DataError);
}

namespace {

// Maps a text to a one-hot vector at index (token count mod 4).
class CountProvider final : public EmbeddingProvider {
public:
    std::vector<double> embed(std::string_view text) const override {
        std::vector<double> v(4, 0.0);
        const auto n = default_token_counter().count(text);
        if (n) v[n % 4] = 1.0;
        return v;
    }
    std::size_t dimension() const override { return 4; }
};

}  // namespace

TEST_CASE("semantic scorer uses cosine over the provider's vectors") {
    const auto s = Scorer::semantic(std::make_shared<CountProvider>());
    CHECK(s.score({"a", SourceKind::Analogy, "", "x y"}, "p q") == Catch::Approx(1.0));
    CHECK(s.score({"a", SourceKind::Analogy, "", "x y z"}, "p q") == 0.0);
    CHECK(s.score({"a", SourceKind::Analogy, "", ""}, "p q") == 0.0);
    const auto h = Scorer::semantic(std::make_shared<HashedBagProvider>());
    CHECK(h.score({"a", SourceKind::Analogy, "", "foo(bar)"}, "foo(bar)") == Catch::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(Scorer::semantic(nullptr), ParameterError);
    CHECK(cosine({1, 0}, {0, 0}) == 0.0);
    CHECK_THROWS_AS(cosine({1}, {1, 2}), ParameterError);
}

TEST_CASE("budget safety holds under both token counters") {
    std::mt19937 rng(17);
    const WhitespaceTokenCounter ws;
    for (int round = 0; round < 300; ++round) {
        std::vector<Candidate> u;
        const int n = std::uniform_int_distribution<int>(0, 12)(rng);
        for (int i = 0; i < n; ++i) {
            std::string text;
            const int words = std::uniform_int_distribution<int>(0, 30)(rng);
            for (int w = 0; w < words; ++w) text += (w % 3 ? "f(x) " : "name ");
            u.push_back({"c" + std::to_string(i), SourceKind::RationaleClass, "p", text});
        }
        const std::size_t budget = std::uniform_int_distribution<int>(0, 200)(rng);
        for (const TokenCounter* counter : {&default_token_counter(), static_cast<const TokenCounter*>(&ws)}) {
            const auto scored = score_candidates(u, "f name", Scorer::random(round), *counter);
            for (std::size_t i = 0; i < scored.size(); ++i) {
                CHECK(scored[i].token_len == counter->count(u[i].text));
            }
            CHECK(build_tdc(scored, budget).used_tokens <= budget);
        }
    }
}

TEST_CASE("fused candidates keep their keys and kinds") {
    RationaleContext r;
    r.methods.push_back({"f:FUNCTION@a.py:1.1-2.3", "a.py", NodeType::Function, Relation::Calls, {}, "def f(): pass"});
    r.packages.push_back({"a:MODULE@a.py:1.1-2.3", "a.py", NodeType::Module, Relation::Imports, {}, "def f():"});
    AnalogyContext a;
    AnalogyItem ai;
    ai.successor = CodeChunk{"b.py", 6, 10, "text"};
    a.items.push_back(ai);
    const auto u = fuse_candidates(r, a);
    REQUIRE(u.size() == 3);
    CHECK(u[0].source == SourceKind::RationaleMethod);
    CHECK(u[1].source == SourceKind::RationalePackage);
    CHECK(u[2].item_id == "chunk@b.py:6-15");
    CHECK(u[2].source == SourceKind::Analogy);
}
