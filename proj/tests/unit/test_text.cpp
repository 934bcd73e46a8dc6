#include <catch_amalgamated.hpp>

#include "dualctx/error.hpp"
#include "dualctx/similarity.hpp"
#include "dualctx/text.hpp"
#include "python_lexer.hpp"

using namespace dualctx;

TEST_CASE("split_lines treats a trailing newline as a terminator") {
    CHECK(split_lines("").empty());
    CHECK(split_lines("a\nb\n") == std::vector<std::string_view>{"a", "b"});
    CHECK(split_lines("a\r\n\nb") == std::vector<std::string_view>{"a", "", "b"});
}

TEST_CASE("lines_through_cursor") {
    CHECK(lines_through_cursor("a\nb\nc", 2) == std::vector<std::string_view>{"a", "b"});
    CHECK(lines_through_cursor("a\n", 2) == std::vector<std::string_view>{"a", ""});
    CHECK(lines_through_cursor("", 1) == std::vector<std::string_view>{""});
    CHECK_THROWS_AS(lines_through_cursor("a", 2), ParameterError);
    CHECK_THROWS_AS(lines_through_cursor("a\n", 0), ParameterError);
}

TEST_CASE("dedent helpers") {
    CHECK(dedent("    a\n      b\n\n    c") == "a\n  b\n\nc");
    CHECK(dedent_from_column("def f():\n        return 1", 5) == "def f():\n    return 1");
    CHECK(trim("  x y \n") == "x y");
}

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("keyed_uniform is deterministic and in range") {
    for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
        for (int i = 0; i < 500; ++i) {
            const std::string key = "item" + std::to_string(i);
            const double u = keyed_uniform(seed, key);
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            CHECK(u == keyed_uniform(seed, key));
        }
    }
    CHECK(keyed_uniform(1, "x") != keyed_uniform(2, "x"));
}

TEST_CASE("tokenize_code splits words and punctuation") {
    CHECK(tokenize_code("") .empty());
    CHECK(tokenize_code("a b c").size() == 3);
    CHECK(tokenize_code("x = foo(y_1, 2)") ==
          std::vector<std::string>{"x", "=", "foo", "(", "y_1", ",", "2", ")"});
}

TEST_CASE("jaccard and edit similarity") {
    CHECK(jaccard(token_set("a b"), token_set("a b")) == 1.0);
    CHECK(jaccard(token_set("a b"), token_set("b c")) == Catch::Approx(1.0 / 3.0));
    CHECK(jaccard({}, {}) == 1.0);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(edit_similarity("abc", "abd") == Catch::Approx(2.0 / 3.0));
    CHECK(edit_similarity("", "") == 1.0);
}

TEST_CASE("bm25 matches the formula on a two-document corpus") {
    const std::vector<std::vector<std::string>> docs = {{"a", "b", "a"}, {"b", "c"}};
    Bm25Index idx(docs, 1.2, 0.75);
    const double avg = 2.5;
    auto idf = [](double n, double df) { return std::log(1.0 + (n - df + 0.5) / (df + 0.5)); };
    auto term = [&](double tf, double len, double df) {
        return idf(2, df) * tf * 2.2 / (tf + 1.2 * (1 - 0.75 + 0.75 * len / avg));
    };
    CHECK(idx.score({"a"}, 0) == Catch::Approx(term(2, 3, 1)));
    CHECK(idx.score({"a", "b"}, 1) == Catch::Approx(term(1, 2, 2)));
    CHECK(idx.score({"z"}, 0) == 0.0);
}

TEST_CASE("lexer joins bracket continuations and tracks indentation") {
    const auto r = py::lex("def f(a,\n      b):\n    return a  # c\n\n\tx = '''s\nt'''\n");
    REQUIRE(r.lines.size() == 3);
    CHECK(r.lines[0].indent == 0);
    CHECK(r.lines[0].tokens.back().is_op(":"));
    CHECK(r.lines[1].indent == 4);
    CHECK(r.lines[2].indent == 8);
    CHECK(r.lines[2].tokens.back().kind == py::TokKind::String);
    CHECK(r.lines[2].tokens.back().end_line == 6);
    CHECK(r.errors.empty());
}

TEST_CASE("lexer reports unterminated strings") {
    const auto r = py::lex("x = 'abc\n");
    CHECK_FALSE(r.errors.empty());
}
