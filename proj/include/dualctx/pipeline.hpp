#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dualctx/analogy.hpp"
#include "dualctx/chunking.hpp"
#include "dualctx/code_graph.hpp"
#include "dualctx/error.hpp"
#include "dualctx/metrics.hpp"
#include "dualctx/prompt.hpp"
#include "dualctx/rationale.hpp"
#include "dualctx/rtg.hpp"

namespace dualctx {

struct PipelineConfig {
    int ell = 10;
    int eta = 5;
    SimilarityKind sim = SimilarityKind::Jaccard;
    double epsilon = 0.3;
    int top_k = 5;
    ScorerKind scorer = ScorerKind::LexicalJaccard;
    std::uint64_t seed = 0;
    int budget = 1024;
    int infile_budget = 2048;
    PromptOrder order = PromptOrder::HighToLow;
    RationaleScope rationale_scope = RationaleScope::Prefix;
    std::string token_counter = "code";  // code | whitespace
    std::vector<std::string> include = {"*.py"};
    std::string graph_file;    // default <index dir>/graph.json
    std::string chunk_index;   // default <index dir>/chunks.json
    std::string oracle_table;  // required by the oracle scorer
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;

    // Throws ParameterError naming the offending field.
    void validate() const;
};

// Overlays the keys of a JSON object onto cfg. Unknown keys and ill-typed
// values raise ParameterError.
void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j);
PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base = {});
nlohmann::json config_to_json(const PipelineConfig& cfg);

const TokenCounter& token_counter_for(const PipelineConfig& cfg);
Scorer make_scorer(const PipelineConfig& cfg);

// Raised when index artifacts are absent.
class IndexMissing : public DataError {
public:
    using DataError::DataError;
};

struct RepoIndex {
    std::filesystem::path root;
    std::map<std::string, std::string> sources;  // repo-relative path -> text
    CodeKnowledgeGraph graph;
    ChunkCover cover;
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> warnings;
};

std::filesystem::path default_index_dir(const std::filesystem::path& root);
std::filesystem::path graph_path(const std::filesystem::path& root, const PipelineConfig& cfg);
std::filesystem::path chunk_index_path(const std::filesystem::path& root, const PipelineConfig& cfg);

// Scans, analyzes and chunks a repository in memory. Throws DataError
// "no files indexed" when nothing matches.
RepoIndex build_index(const std::filesystem::path& root, const PipelineConfig& cfg);
// Writes graph and chunk index; returns the summary JSON.
nlohmann::json save_index(const RepoIndex& index, const PipelineConfig& cfg);
// Reads artifacts written by save_index. Chunk text is restored from the
// indexed module text. Throws IndexMissing when an artifact is absent.
RepoIndex load_index(const std::filesystem::path& root, const PipelineConfig& cfg);
// The index's cover, or a fresh one when cfg asks for a different window.
ChunkCover cover_for(const RepoIndex& index, const PipelineConfig& cfg);

struct ContextResult {
    std::string file;
    int line = 0;
    UnfinishedChunk ck_star;
    AnalogyContext analogy;
    RationaleContext rationale;
    std::vector<ScoredItem> candidates;
    TruncatedDualContext tdc;
};

// Edited text defaults to the indexed content of file.
ContextResult run_context(const RepoIndex& index, std::string_view file, int line, const PipelineConfig& cfg,
                          std::optional<std::string_view> edited_text = std::nullopt);
PromptBundle run_prompt(const RepoIndex& index, const ContextResult& ctx, const PipelineConfig& cfg,
                        std::optional<std::string_view> edited_text = std::nullopt);

nlohmann::json context_json(const ContextResult& ctx);
nlohmann::json prompt_json(const PromptBundle& bundle);

// Command bodies shared by the CLI and the HTTP service.
std::string cmd_index(const std::filesystem::path& root, const PipelineConfig& cfg);
std::string cmd_context(const std::filesystem::path& root, std::string_view file, int line, const PipelineConfig& cfg);
std::string cmd_prompt(const std::filesystem::path& root, std::string_view file, int line, const PipelineConfig& cfg,
                       bool raw);

struct EvalOutcome {
    MetricsReport report;
    std::string json;
    std::string table;
};

// repo_root entries are resolved against the dataset file's directory.
EvalOutcome run_eval(const std::filesystem::path& dataset, const std::filesystem::path& completions,
                     const PipelineConfig& cfg);

}  // namespace dualctx
