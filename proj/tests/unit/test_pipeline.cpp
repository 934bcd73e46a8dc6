#include <catch_amalgamated.hpp>

#include <set>

#include "dualctx/error.hpp"
#include "dualctx/pipeline.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dualctx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::set<std::string> tdc_names(const ContextResult& ctx) {
    std::set<std::string> out;
    for (const auto& s : ctx.tdc.selected) {
        out.insert(s.source == SourceKind::Analogy ? s.item_id : s.item_id.substr(0, s.item_id.find(':')));
    }
    return out;
}

}  // namespace

TEST_CASE("config keys, types and validation") {
    PipelineConfig cfg;
    apply_config_json(cfg, json{{"ell", 20}, {"eta", 4}, {"sim", "bm25"}, {"order", "Random"}, {"seed", 9}});
    CHECK(cfg.ell == 20);
    CHECK(cfg.sim == SimilarityKind::Bm25);
    CHECK(cfg.order == PromptOrder::Random);
    CHECK(cfg.seed == 9);
    CHECK_THROWS_WITH(apply_config_json(cfg, json{{"colour", 1}}), Catch::Matchers::ContainsSubstring("colour"));
    CHECK_THROWS_WITH(apply_config_json(cfg, json{{"ell", "ten"}}), Catch::Matchers::ContainsSubstring("ell"));
    CHECK_THROWS_AS(apply_config_json(cfg, json{{"scorer", "magic"}}), ParameterError);
    CHECK_THROWS_AS(apply_config_json(cfg, json{{"seed", -1}}), ParameterError);

    PipelineConfig bad;
    bad.eta = 11;
    CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("eta"));
    bad = {};
    bad.scorer = ScorerKind::Oracle;
    CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("oracle_table"));
    bad = {};
    bad.budget = -1;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("config file overlays defaults and round-trips") {
    const auto dir = testsupport::scratch_dir("cfg");
    testsupport::write_text(dir / "c.json", R"({"budget": 256, "scorer": "lexical-edit"})");
    const auto cfg = load_config_file(dir / "c.json");
    CHECK(cfg.budget == 256);
    CHECK(cfg.scorer == ScorerKind::LexicalEdit);
    CHECK(cfg.ell == 10);
    PipelineConfig back;
    apply_config_json(back, config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    testsupport::write_text(dir / "bad.json", R"({"budget": 256, "extra": true})");
    CHECK_THROWS_AS(load_config_file(dir / "bad.json"), ParameterError);
}

TEST_CASE("index summary for the sample fixture") {
    const auto root = testsupport::copy_fixture("sample_repo");
    const auto summary = json::parse(cmd_index(root, {}));
    CHECK(summary["n_files"] == 2);
    CHECK(summary["n_nodes"].get<int>() >= 5);
    CHECK(summary["n_edges"].get<int>() >= 3);
    CHECK(fs::exists(root / ".dualctx" / "graph.json"));
}

TEST_CASE("an empty repository is not indexed") {
    const auto root = testsupport::scratch_dir("empty");
    CHECK_THROWS_WITH(cmd_index(root, {}), "no files indexed");
}

TEST_CASE("re-indexing an unchanged repository is byte-identical") {
    const auto root = testsupport::copy_fixture("sweep_repo");
    cmd_index(root, {});
    const auto g1 = testsupport::read_text(root / ".dualctx" / "graph.json");
    const auto c1 = testsupport::read_text(root / ".dualctx" / "chunks.json");
    cmd_index(root, {});
    CHECK(testsupport::read_text(root / ".dualctx" / "graph.json") == g1);
    CHECK(testsupport::read_text(root / ".dualctx" / "chunks.json") == c1);
}

TEST_CASE("loaded index matches the in-memory one") {
    const auto root = testsupport::copy_fixture("sweep_repo");
    const PipelineConfig cfg;
    const RepoIndex built = build_index(root, cfg);
    save_index(built, cfg);
    const RepoIndex loaded = load_index(root, cfg);
    CHECK(loaded.graph == built.graph);
    CHECK(loaded.cover.chunks() == built.cover.chunks());
    CHECK(loaded.sources == built.sources);
}

TEST_CASE("missing artifacts are reported as such") {
    const auto root = testsupport::copy_fixture("sample_repo");
    CHECK_THROWS_AS(load_index(root, {}), IndexMissing);
    CHECK_THROWS_AS(cmd_context(root, "module_b.py", 3, {}), IndexMissing);
}

TEST_CASE("custom artifact paths") {
    const auto root = testsupport::copy_fixture("sample_repo");
    const auto out = testsupport::scratch_dir("artifacts");
    PipelineConfig cfg;
    cfg.graph_file = (out / "g.json").string();
    cfg.chunk_index = (out / "c.json").string();
    cmd_index(root, cfg);
    CHECK(fs::exists(out / "g.json"));
    CHECK_FALSE(fs::exists(root / ".dualctx"));
    CHECK_NOTHROW(cmd_context(root, "module_b.py", 3, cfg));
}

TEST_CASE("worked example: a tight budget keeps two classes and one analogy chunk") {
    const auto index = build_index(testsupport::fixture("worked_repo"), {});
    PipelineConfig cfg;
    cfg.budget = 100;
    const auto ctx = run_context(index, "app/handlers.py", 10, cfg);
    CHECK(tdc_names(ctx) == std::set<std::string>{"UserService", "UidTok", "chunk@app/admin.py:1-3"});
    CHECK(ctx.tdc.used_tokens <= 100);
    // With room for everything the function comes back.
    cfg.budget = 4096;
    CHECK(tdc_names(run_context(index, "app/handlers.py", 10, cfg)).count("validate_user") == 1);
}

TEST_CASE("budget 0 still reports both retrieval stages") {
    const auto index = build_index(testsupport::fixture("worked_repo"), {});
    PipelineConfig cfg;
    cfg.budget = 0;
    const auto ctx = run_context(index, "app/handlers.py", 10, cfg);
    CHECK(ctx.tdc.selected.empty());
    CHECK_FALSE(ctx.analogy.items.empty());
    CHECK(ctx.rationale.size() == 3);
    const auto j = context_json(ctx);
    CHECK(j["tdc"]["items"].empty());
    CHECK(j["rationale"]["classes"].size() == 2);
}

TEST_CASE("line 1 of a file whose imports come later has no rationale") {
    const auto index = build_index(testsupport::fixture("worked_repo"), {});
    CHECK(run_context(index, "app/handlers.py", 1, {}).rationale.size() == 0);
}

TEST_CASE("invalid file or line") {
    const auto index = build_index(testsupport::fixture("sample_repo"), {});
    CHECK_THROWS_AS(run_context(index, "nope.py", 1, {}), ParameterError);
    CHECK_THROWS_AS(run_context(index, "module_b.py", 0, {}), ParameterError);
    CHECK_THROWS_AS(run_context(index, "module_b.py", 500, {}), ParameterError);
}

TEST_CASE("a different window size rebuilds the cover") {
    const auto index = build_index(testsupport::fixture("sweep_repo"), {});
    PipelineConfig cfg;
    cfg.ell = 4;
    cfg.eta = 2;
    const auto cover = cover_for(index, cfg);
    CHECK(cover.ell() == 4);
    CHECK(cover.chunks().size() > index.cover.chunks().size());
}

TEST_CASE("every scorer runs through the pipeline") {
    const auto index = build_index(testsupport::fixture("worked_repo"), {});
    const auto dir = testsupport::scratch_dir("oracle");
    for (auto kind : {ScorerKind::LexicalJaccard, ScorerKind::LexicalEdit, ScorerKind::Semantic, ScorerKind::Random}) {
        PipelineConfig cfg;
        cfg.scorer = kind;
        const auto ctx = run_context(index, "app/handlers.py", 10, cfg);
        CHECK(ctx.candidates.size() == ctx.rationale.size() + ctx.analogy.items.size());
    }
    PipelineConfig cfg;
    cfg.scorer = ScorerKind::Oracle;
    cfg.oracle_table = (dir / "t.json").string();
    testsupport::write_text(dir / "t.json", R"({"chunk@app/admin.py:1-3": 1.0})");
    CHECK_THROWS_AS(run_context(index, "app/handlers.py", 10, cfg), DataError);
}

TEST_CASE("prompt stats follow the selected items") {
    const auto index = build_index(testsupport::fixture("worked_repo"), {});
    PipelineConfig cfg;
    cfg.budget = 100;
    const auto ctx = run_context(index, "app/handlers.py", 10, cfg);
    const auto bundle = run_prompt(index, ctx, cfg);
    CHECK(bundle.stats.n_ac == 1);
    CHECK(bundle.stats.n_rc == 2);
    CHECK(bundle.stats.crossfile_tokens == ctx.tdc.used_tokens);
    CHECK(bundle.full_prompt.ends_with("\n    if validate_user(user):"));
}

TEST_CASE("eval over the fixture dataset") {
    PipelineConfig cfg;
    const auto full = run_eval(testsupport::fixture("eval/dataset.jsonl"), testsupport::fixture("eval/completions.jsonl"), cfg);
    CHECK(full.report.n_scored == 4);
    CHECK(full.report.missing.empty());
    CHECK(full.report.code_em == 0.5);
    // Independent recomputation of the means.
    const auto ds = load_dataset(testsupport::fixture("eval/dataset.jsonl"));
    const auto preds = load_completions(testsupport::fixture("eval/completions.jsonl"));
    double es = 0;
    for (const auto& ex : ds) es += oracle::edit_similarity(preds.at(ex.task_id), ex.groundtruth);
    CHECK(full.report.code_es == Catch::Approx(es / 4));
    CHECK(full.report.n_rc > 0);

    const auto partial =
        run_eval(testsupport::fixture("eval/dataset.jsonl"), testsupport::fixture("eval/completions_partial.jsonl"), cfg);
    CHECK(partial.report.missing == std::vector<std::string>{"t4"});
    CHECK(partial.report.n_scored == 3);
}
