#include "dualctx/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dualctx/text.hpp"

namespace dualctx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
}

[[noreturn]] void bad_field(std::string_view key, std::string_view why) {
    throw ParameterError("config field '" + std::string(key) + "': " + std::string(why));
}

int get_int(const json& v, std::string_view key) {
    if (!v.is_number_integer()) {
        bad_field(key, "expected an integer");
    }
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        bad_field(key, "out of range");
    }
    return static_cast<int>(x);
}

double get_double(const json& v, std::string_view key) {
    if (!v.is_number()) {
        bad_field(key, "expected a number");
    }
    return v.get<double>();
}

std::string get_string(const json& v, std::string_view key) {
    if (!v.is_string()) {
        bad_field(key, "expected a string");
    }
    return v.get<std::string>();
}

fs::path manifest_path(const fs::path& root, const PipelineConfig& cfg) {
    return chunk_index_path(root, cfg).parent_path() / "manifest.json";
}

json location_json(const Location& loc) {
    return {{"path", loc.path},
            {"start_line", loc.start_line},
            {"start_col", loc.start_col},
            {"end_line", loc.end_line},
            {"end_col", loc.end_col}};
}

json rationale_items_json(const std::vector<RationaleItem>& items) {
    json out = json::array();
    for (const auto& it : items) {
        out.push_back({{"id", it.origin_id},
                       {"path", it.origin_path},
                       {"kind", std::string(to_string(it.kind))},
                       {"relation", std::string(to_string(it.relation))},
                       {"site", location_json(it.site)},
                       {"text", it.text}});
    }
    return out;
}

json scored_json(const ScoredItem& s) {
    return {{"item_id", s.item_id},
            {"source", std::string(to_string(s.source))},
            {"origin_path", s.origin_path},
            {"score", s.score},
            {"token_len", s.token_len}};
}

}  // namespace

void PipelineConfig::validate() const {
    if (ell < 1) {
        bad_field("ell", "must be >= 1");
    }
    if (eta < 1 || eta > ell) {
        bad_field("eta", "must satisfy 1 <= eta <= ell");
    }
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        bad_field("epsilon", "must be a finite number >= 0");
    }
    if (top_k < 1) {
        bad_field("top_k", "must be >= 1");
    }
    if (budget < 0) {
        bad_field("budget", "must be >= 0");
    }
    if (infile_budget < 0) {
        bad_field("infile_budget", "must be >= 0");
    }
    if (token_counter != "code" && token_counter != "whitespace") {
        bad_field("token_counter", "must be 'code' or 'whitespace'");
    }
    if (include.empty()) {
        bad_field("include", "needs at least one glob");
    }
    if (scorer == ScorerKind::Oracle && oracle_table.empty()) {
        bad_field("oracle_table", "required by the oracle scorer");
    }
    if (!std::isfinite(bm25_k1) || bm25_k1 < 0.0) {
        bad_field("bm25_k1", "must be >= 0");
    }
    if (!(bm25_b >= 0.0 && bm25_b <= 1.0)) {
        bad_field("bm25_b", "must be in [0, 1]");
    }
}

void apply_config_json(PipelineConfig& cfg, const json& j) {
    if (!j.is_object()) {
        throw ParameterError("config must be a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        if (key == "ell") {
            cfg.ell = get_int(v, key);
        } else if (key == "eta") {
            cfg.eta = get_int(v, key);
        } else if (key == "sim") {
            auto k = parse_similarity_kind(get_string(v, key));
            if (!k) {
                bad_field(key, "expected jaccard, edit or bm25");
            }
            cfg.sim = *k;
        } else if (key == "epsilon") {
            cfg.epsilon = get_double(v, key);
        } else if (key == "top_k") {
            cfg.top_k = get_int(v, key);
        } else if (key == "scorer") {
            auto k = parse_scorer_kind(get_string(v, key));
            if (!k) {
                bad_field(key, "unknown scorer");
            }
            cfg.scorer = *k;
        } else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                bad_field(key, "expected a non-negative integer");
            }
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "budget") {
            cfg.budget = get_int(v, key);
        } else if (key == "infile_budget") {
            cfg.infile_budget = get_int(v, key);
        } else if (key == "order") {
            auto o = parse_prompt_order(get_string(v, key));
            if (!o) {
                bad_field(key, "expected HighToLow, LowToHigh or Random");
            }
            cfg.order = *o;
        } else if (key == "rationale_scope") {
            auto r = parse_rationale_scope(get_string(v, key));
            if (!r) {
                bad_field(key, "expected prefix or innermost");
            }
            cfg.rationale_scope = *r;
        } else if (key == "token_counter") {
            cfg.token_counter = get_string(v, key);
        } else if (key == "include") {
            if (!v.is_array()) {
                bad_field(key, "expected a list of globs");
            }
            cfg.include.clear();
            for (const auto& g : v) {
                cfg.include.push_back(get_string(g, key));
            }
        } else if (key == "graph_file") {
            cfg.graph_file = get_string(v, key);
        } else if (key == "chunk_index") {
            cfg.chunk_index = get_string(v, key);
        } else if (key == "oracle_table") {
            cfg.oracle_table = get_string(v, key);
        } else if (key == "bm25_k1") {
            cfg.bm25_k1 = get_double(v, key);
        } else if (key == "bm25_b") {
            cfg.bm25_b = get_double(v, key);
        } else {
            throw ParameterError("unknown config key '" + key + "'");
        }
    }
}

PipelineConfig load_config_file(const fs::path& path, PipelineConfig base) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const DataError&) {
        throw ParameterError("cannot read config file " + path.string());
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParameterError("config file " + path.string() + ": " + e.what());
    }
    apply_config_json(base, j);
    return base;
}

json config_to_json(const PipelineConfig& cfg) {
    return {{"ell", cfg.ell},
            {"eta", cfg.eta},
            {"sim", std::string(to_string(cfg.sim))},
            {"epsilon", cfg.epsilon},
            {"top_k", cfg.top_k},
            {"scorer", std::string(to_string(cfg.scorer))},
            {"seed", cfg.seed},
            {"budget", cfg.budget},
            {"infile_budget", cfg.infile_budget},
            {"order", std::string(to_string(cfg.order))},
            {"rationale_scope", std::string(to_string(cfg.rationale_scope))},
            {"token_counter", cfg.token_counter},
            {"include", cfg.include},
            {"graph_file", cfg.graph_file},
            {"chunk_index", cfg.chunk_index},
            {"oracle_table", cfg.oracle_table},
            {"bm25_k1", cfg.bm25_k1},
            {"bm25_b", cfg.bm25_b}};
}

const TokenCounter& token_counter_for(const PipelineConfig& cfg) {
    static const WhitespaceTokenCounter whitespace;
    if (cfg.token_counter == "whitespace") {
        return whitespace;
    }
    return default_token_counter();
}

Scorer make_scorer(const PipelineConfig& cfg) {
    switch (cfg.scorer) {
        case ScorerKind::LexicalJaccard:
            return Scorer::lexical_jaccard();
        case ScorerKind::LexicalEdit:
            return Scorer::lexical_edit();
        case ScorerKind::Semantic: {
            static const auto provider = std::make_shared<const HashedBagProvider>();
            return Scorer::semantic(provider);
        }
        case ScorerKind::Random:
            return Scorer::random(cfg.seed);
        case ScorerKind::Oracle:
            return Scorer::oracle(parse_oracle_table(read_file(cfg.oracle_table)));
    }
    return Scorer::lexical_jaccard();
}

fs::path default_index_dir(const fs::path& root) { return root / ".dualctx"; }

fs::path graph_path(const fs::path& root, const PipelineConfig& cfg) {
    return cfg.graph_file.empty() ? default_index_dir(root) / "graph.json" : fs::path(cfg.graph_file);
}

fs::path chunk_index_path(const fs::path& root, const PipelineConfig& cfg) {
    return cfg.chunk_index.empty() ? default_index_dir(root) / "chunks.json" : fs::path(cfg.chunk_index);
}

RepoIndex build_index(const fs::path& root, const PipelineConfig& cfg) {
    cfg.validate();
    RepoIndex index;
    index.root = root;
    ScanResult scan = scan_repo(root, cfg.include);
    index.warnings = std::move(scan.warnings);
    if (scan.files.empty()) {
        throw DataError("no files indexed");
    }
    for (const auto& f : scan.files) {
        index.sources.emplace(f.path, f.text);
    }
    index.cover = build_cover(scan.files, cfg.ell, cfg.eta);
    FactExtractor extractor(std::move(scan.files));
    FactSet facts = extractor.extract_all();
    index.diagnostics = std::move(facts.diagnostics);
    index.graph = build_graph(facts.entities, facts.relations);
    return index;
}

json save_index(const RepoIndex& index, const PipelineConfig& cfg) {
    save_graph(index.graph, graph_path(index.root, cfg));
    write_file(chunk_index_path(index.root, cfg), serialize_chunk_index(index.cover));
    json manifest = {{"ell", index.cover.ell()}, {"eta", index.cover.eta()}, {"include", cfg.include}};
    write_file(manifest_path(index.root, cfg), manifest.dump(2) + "\n");
    json diags = json::array();
    for (const auto& d : index.diagnostics) {
        diags.push_back({{"path", d.path}, {"line", d.line}, {"col", d.col}, {"message", d.message}});
    }
    write_file(manifest_path(index.root, cfg).parent_path() / "diagnostics.json", diags.dump(2) + "\n");
    return {{"n_files", index.sources.size()},
            {"n_nodes", index.graph.nodes().size()},
            {"n_edges", index.graph.edges().size()},
            {"n_chunks", index.cover.chunks().size()},
            {"n_diagnostics", index.diagnostics.size()}};
}

RepoIndex load_index(const fs::path& root, const PipelineConfig& cfg) {
    cfg.validate();
    const fs::path gp = graph_path(root, cfg);
    const fs::path cp = chunk_index_path(root, cfg);
    const fs::path mp = manifest_path(root, cfg);
    for (const auto& p : {gp, cp, mp}) {
        if (!fs::exists(p)) {
            throw IndexMissing("index artifact missing: " + p.string() + " (run 'index' first)");
        }
    }
    RepoIndex index;
    index.root = root;
    index.graph = load_graph(gp);
    for (const auto& path : index.graph.paths()) {
        index.sources.emplace(path, module_node(index.graph, path).body_text);
    }
    json manifest;
    try {
        manifest = json::parse(read_file(mp));
        const int ell = manifest.at("ell").get<int>();
        const int eta = manifest.at("eta").get<int>();
        index.cover = parse_chunk_index(read_file(cp), index.sources, ell, eta);
    } catch (const json::exception& e) {
        throw DataError("index manifest " + mp.string() + ": " + e.what());
    }
    return index;
}

ChunkCover cover_for(const RepoIndex& index, const PipelineConfig& cfg) {
    if (index.cover.ell() == cfg.ell && index.cover.eta() == cfg.eta) {
        return index.cover;
    }
    std::vector<SourceFile> files;
    for (const auto& [path, text] : index.sources) {
        files.push_back(SourceFile::from_text(path, text));
    }
    return build_cover(files, cfg.ell, cfg.eta);
}

ContextResult run_context(const RepoIndex& index, std::string_view file, int line, const PipelineConfig& cfg,
                          std::optional<std::string_view> edited_text) {
    cfg.validate();
    auto src = index.sources.find(std::string(file));
    if (src == index.sources.end()) {
        throw ParameterError("file not indexed: " + std::string(file));
    }
    const std::string_view edited = edited_text ? *edited_text : std::string_view(src->second);

    ContextResult ctx;
    ctx.file = std::string(file);
    ctx.line = line;
    ctx.ck_star = unfinished_chunk(edited, line, cfg.ell);

    const ChunkCover cover = cover_for(index, cfg);
    const AnalogyRetriever retriever(cover, cfg.bm25_k1, cfg.bm25_b);
    ctx.analogy = retriever.retrieve(ctx.ck_star.text, cfg.sim, cfg.epsilon, static_cast<std::size_t>(cfg.top_k), file);
    ctx.rationale = retrieve_rationale(index.graph, file, line, cfg.rationale_scope);

    const auto candidates = fuse_candidates(ctx.rationale, ctx.analogy);
    ctx.candidates = score_candidates(candidates, ctx.ck_star.text, make_scorer(cfg), token_counter_for(cfg));
    std::stable_sort(ctx.candidates.begin(), ctx.candidates.end(), rank_before);
    ctx.tdc = build_tdc(ctx.candidates, static_cast<std::size_t>(cfg.budget));
    return ctx;
}

PromptBundle run_prompt(const RepoIndex& index, const ContextResult& ctx, const PipelineConfig& cfg,
                        std::optional<std::string_view> edited_text) {
    auto src = index.sources.find(ctx.file);
    if (src == index.sources.end()) {
        throw ParameterError("file not indexed: " + ctx.file);
    }
    const std::string_view edited = edited_text ? *edited_text : std::string_view(src->second);
    PromptOptions opts;
    opts.order = cfg.order;
    opts.seed = cfg.seed;
    opts.infile_budget = static_cast<std::size_t>(cfg.infile_budget);
    return assemble(ctx.tdc, edited, ctx.line, opts, token_counter_for(cfg));
}

json context_json(const ContextResult& ctx) {
    json analogy = json::array();
    for (const auto& a : ctx.analogy.items) {
        analogy.push_back({{"chunk", a.source_chunk.id()},
                           {"successor", a.successor.id()},
                           {"file", a.successor.file},
                           {"start_line", a.successor.start_line},
                           {"end_line", a.successor.end_line()},
                           {"score", a.score},
                           {"text", a.successor.text}});
    }
    json candidates = json::array();
    for (const auto& s : ctx.candidates) {
        candidates.push_back(scored_json(s));
    }
    json selected = json::array();
    for (const auto& s : ctx.tdc.selected) {
        selected.push_back(scored_json(s));
    }
    return {{"file", ctx.file},
            {"line", ctx.line},
            {"unfinished_chunk", {{"start_line", ctx.ck_star.start_line}, {"end_line", ctx.ck_star.end_line}}},
            {"analogy", analogy},
            {"rationale",
             {{"methods", rationale_items_json(ctx.rationale.methods)},
              {"classes", rationale_items_json(ctx.rationale.classes)},
              {"packages", rationale_items_json(ctx.rationale.packages)}}},
            {"candidates", candidates},
            {"tdc", {{"budget", ctx.tdc.budget}, {"used_tokens", ctx.tdc.used_tokens}, {"items", selected}}}};
}

json prompt_json(const PromptBundle& bundle) {
    return {{"prompt", bundle.full_prompt},
            {"stats",
             {{"n_ac", bundle.stats.n_ac},
              {"n_rc", bundle.stats.n_rc},
              {"crossfile_tokens", bundle.stats.crossfile_tokens},
              {"infile_tokens", bundle.stats.infile_tokens}}}};
}

std::string cmd_index(const fs::path& root, const PipelineConfig& cfg) {
    const RepoIndex index = build_index(root, cfg);
    return save_index(index, cfg).dump() + "\n";
}

std::string cmd_context(const fs::path& root, std::string_view file, int line, const PipelineConfig& cfg) {
    const RepoIndex index = load_index(root, cfg);
    return context_json(run_context(index, file, line, cfg)).dump(2) + "\n";
}

std::string cmd_prompt(const fs::path& root, std::string_view file, int line, const PipelineConfig& cfg, bool raw) {
    const RepoIndex index = load_index(root, cfg);
    const PromptBundle bundle = run_prompt(index, run_context(index, file, line, cfg), cfg);
    return raw ? bundle.full_prompt : prompt_json(bundle).dump(2) + "\n";
}

EvalOutcome run_eval(const fs::path& dataset, const fs::path& completions, const PipelineConfig& cfg) {
    cfg.validate();
    const auto examples = load_dataset(dataset);
    const auto predictions = load_completions(completions);
    const fs::path base = dataset.has_parent_path() ? dataset.parent_path() : fs::path(".");

    std::map<fs::path, RepoIndex> indexes;
    std::vector<ExampleResult> results;
    std::vector<std::string> missing;
    for (const auto& ex : examples) {
        auto pred = predictions.find(ex.task_id);
        if (pred == predictions.end()) {
            missing.push_back(ex.task_id);
            continue;
        }
        const fs::path root = fs::path(ex.repo_root).is_absolute() ? fs::path(ex.repo_root) : base / ex.repo_root;
        auto it = indexes.find(root);
        if (it == indexes.end()) {
            it = indexes.emplace(root, build_index(root, cfg)).first;
        }
        ExampleResult r = score_example(ex, pred->second);
        try {
            const ContextResult ctx = run_context(it->second, ex.file_path, ex.cursor_line, cfg, ex.prefix_text);
            for (const auto& s : ctx.tdc.selected) {
                (s.source == SourceKind::Analogy ? r.n_ac : r.n_rc) += 1;
            }
        } catch (const ParameterError& e) {
            throw DataError("example " + ex.task_id + ": " + e.what());
        }
        results.push_back(std::move(r));
    }
    EvalOutcome out;
    out.report = aggregate(results, std::move(missing), examples.size());
    out.json = report_json(out.report);
    out.table = report_table(out.report);
    return out;
}

}  // namespace dualctx
