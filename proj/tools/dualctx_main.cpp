#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dualctx/pipeline.hpp"
#include "dualctx/service.hpp"

namespace {

using dualctx::PipelineConfig;
using nlohmann::json;

struct ConfigFlags {
    std::string config_file;
    std::optional<int> ell, eta, top_k, budget, infile_budget;
    std::optional<double> threshold, bm25_k1, bm25_b;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sim, scorer, order, rationale_scope, token_counter, graph_file, chunk_index, oracle_table;
    std::vector<std::string> include;

    void attach(CLI::App* app) {
        app->add_option("--config", config_file, "JSON config file (same keys as the pipeline config)");
        app->add_option("--ell", ell, "chunk length in lines");
        app->add_option("--eta", eta, "sliding window step");
        app->add_option("--sim", sim, "analogy similarity: jaccard | edit | bm25");
        app->add_option("--threshold", threshold, "analogy similarity threshold epsilon");
        app->add_option("--top-k", top_k, "analogy results kept");
        app->add_option("--scorer", scorer, "lexical-jaccard | lexical-edit | semantic | random | oracle");
        app->add_option("--seed", seed, "seed for random scoring and ordering");
        app->add_option("--budget", budget, "cross-file token budget");
        app->add_option("--infile-budget", infile_budget, "in-file prefix token budget");
        app->add_option("--order", order, "HighToLow | LowToHigh | Random");
        app->add_option("--rationale-scope", rationale_scope, "prefix | innermost");
        app->add_option("--token-counter", token_counter, "code | whitespace");
        app->add_option("--include", include, "file globs to index");
        app->add_option("--graph-file", graph_file, "graph artifact path");
        app->add_option("--chunk-index", chunk_index, "chunk index artifact path");
        app->add_option("--oracle-table", oracle_table, "JSON map of item id to score");
        app->add_option("--bm25-k1", bm25_k1);
        app->add_option("--bm25-b", bm25_b);
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_file.empty()) {
            cfg = dualctx::load_config_file(config_file, cfg);
        }
        json j = json::object();
        auto put = [&j](const char* key, const auto& opt) {
            if (opt) {
                j[key] = *opt;
            }
        };
        put("ell", ell);
        put("eta", eta);
        put("sim", sim);
        put("epsilon", threshold);
        put("top_k", top_k);
        put("scorer", scorer);
        put("seed", seed);
        put("budget", budget);
        put("infile_budget", infile_budget);
        put("order", order);
        put("rationale_scope", rationale_scope);
        put("token_counter", token_counter);
        put("graph_file", graph_file);
        put("chunk_index", chunk_index);
        put("oracle_table", oracle_table);
        put("bm25_k1", bm25_k1);
        put("bm25_b", bm25_b);
        if (!include.empty()) {
            j["include"] = include;
        }
        dualctx::apply_config_json(cfg, j);
        cfg.validate();
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repository-level code completion context builder"};
    app.require_subcommand(1);

    ConfigFlags flags;
    std::string root = ".";
    std::string file;
    int line = 0;
    bool raw = false;
    std::string dataset, completions, format = "table", host = "127.0.0.1";
    int port = 8080;

    auto* index = app.add_subcommand("index", "analyze a repository and write the index artifacts");
    index->add_option("root", root, "repository root")->required();
    flags.attach(index);

    auto* context = app.add_subcommand("context", "report analogy, rationale and truncated contexts at a cursor");
    auto* prompt = app.add_subcommand("prompt", "assemble the completion prompt at a cursor");
    for (auto* sub : {context, prompt}) {
        sub->add_option("--root", root, "repository root");
        sub->add_option("--file", file, "repo-relative file")->required();
        sub->add_option("--line", line, "1-based cursor line")->required();
        flags.attach(sub);
    }
    prompt->add_flag("--raw", raw, "print the prompt text only");

    auto* eval = app.add_subcommand("eval", "score completions against a dataset");
    eval->add_option("--dataset", dataset, "dataset JSONL")->required();
    eval->add_option("--completions", completions, "completions JSONL")->required();
    eval->add_option("--format", format, "table | json")->check(CLI::IsMember({"table", "json"}));
    flags.attach(eval);

    auto* serve = app.add_subcommand("serve", "serve context and prompt endpoints over HTTP");
    serve->add_option("--root", root, "repository root");
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    flags.attach(serve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const PipelineConfig cfg = flags.resolve();
        if (index->parsed()) {
            std::cout << dualctx::cmd_index(root, cfg);
        } else if (context->parsed()) {
            std::cout << dualctx::cmd_context(root, file, line, cfg);
        } else if (prompt->parsed()) {
            std::cout << dualctx::cmd_prompt(root, file, line, cfg, raw);
        } else if (eval->parsed()) {
            const auto outcome = dualctx::run_eval(dataset, completions, cfg);
            std::cout << (format == "json" ? outcome.json : outcome.table);
            if (!outcome.report.missing.empty()) {
                for (const auto& id : outcome.report.missing) {
                    std::cerr << "missing prediction: " << id << "\n";
                }
                return 2;
            }
        } else if (serve->parsed()) {
            dualctx::Service service(root, cfg);
            if (!service.has_index()) {
                std::cerr << "warning: no index under " << root << "; POST /v1/index to build one\n";
            }
            std::cerr << "listening on " << host << ":" << port << "\n";
            dualctx::serve(service, host, port);
        }
    } catch (const dualctx::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const dualctx::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
