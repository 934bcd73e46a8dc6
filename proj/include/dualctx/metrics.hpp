#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dualctx {

struct LanguageProfile {
    std::string name;
    std::set<std::string, std::less<>> keywords;
};

const LanguageProfile& python_profile();
// JSON {"name": ..., "keywords": [...]}.
LanguageProfile parse_language_profile(std::string_view json_text);

// Whitespace-trimmed string equality.
int code_em(std::string_view pred, std::string_view gt);
// edit_similarity of the trimmed strings.
double code_es(std::string_view pred, std::string_view gt);

// Maximal [A-Za-z_][A-Za-z0-9_]* runs that are not keywords of the profile.
std::vector<std::string> extract_identifiers(std::string_view code, const LanguageProfile& profile = python_profile());

struct IdentifierScores {
    double em = 0.0;
    double p = 0.0;
    double r = 0.0;
    double f1 = 0.0;
};

// Precision and recall over the multiset intersection of identifiers.
IdentifierScores identifier_metrics(std::string_view pred, std::string_view gt,
                                    const LanguageProfile& profile = python_profile());
IdentifierScores identifier_scores(const std::vector<std::string>& pred, const std::vector<std::string>& gt);

struct EvalExample {
    std::string task_id;
    std::string repo_root;
    std::string file_path;
    int cursor_line = 1;
    std::string prefix_text;
    std::string groundtruth;
};

struct ExampleResult {
    std::string task_id;
    double code_em = 0.0;
    double code_es = 0.0;
    IdentifierScores id;
    std::size_t n_ac = 0;
    std::size_t n_rc = 0;
};

struct MetricsReport {
    std::size_t n_examples = 0;
    std::size_t n_scored = 0;
    double code_em = 0.0;
    double code_es = 0.0;
    double id_em = 0.0;
    double id_p = 0.0;
    double id_r = 0.0;
    double id_f1 = 0.0;
    double n_ac = 0.0;
    double n_rc = 0.0;
    std::vector<std::string> missing;  // task ids without a prediction
    std::vector<ExampleResult> per_example;
};

// One EvalExample per line; blank lines skipped. Throws DataError naming the
// line on malformed records.
std::vector<EvalExample> parse_dataset(std::string_view jsonl);
std::vector<EvalExample> load_dataset(const std::filesystem::path& path);
// task_id -> prediction.
std::map<std::string, std::string> parse_completions(std::string_view jsonl);
std::map<std::string, std::string> load_completions(const std::filesystem::path& path);

ExampleResult score_example(const EvalExample& ex, std::string_view prediction,
                            const LanguageProfile& profile = python_profile());

// Means over the scored examples; missing ones are listed and skipped.
MetricsReport aggregate(const std::vector<ExampleResult>& results, std::vector<std::string> missing,
                        std::size_t n_examples);

std::string report_json(const MetricsReport& report);
// Aligned table, metrics scaled by 100.
std::string report_table(const MetricsReport& report);

}  // namespace dualctx
