#include "dualctx/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualctx/error.hpp"
#include "dualctx/similarity.hpp"
#include "dualctx/text.hpp"

namespace dualctx {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Fn>
void for_each_record(std::string_view jsonl, std::string_view what, Fn fn) {
    std::size_t lineno = 0;
    for (auto line : split_lines(jsonl)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object()) {
            throw DataError(std::string(what) + " line " + std::to_string(lineno) + ": expected an object");
        }
        try {
            fn(j, lineno);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::string require_string(const nlohmann::json& j, const char* key, std::string_view what, std::size_t lineno) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw DataError(std::string(what) + " line " + std::to_string(lineno) + ": field '" + key +
                        "' must be a string");
    }
    return j.at(key).get<std::string>();
}

}  // namespace

const LanguageProfile& python_profile() {
    static const LanguageProfile profile{
        "python",
        {"False", "None",   "True",    "and",      "as",     "assert", "async", "await",    "break",
         "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
         "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
         "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield"}};
    return profile;
}

LanguageProfile parse_language_profile(std::string_view json_text) {
    LanguageProfile p;
    try {
        auto j = nlohmann::json::parse(json_text);
        p.name = j.at("name").get<std::string>();
        for (const auto& k : j.at("keywords")) {
            p.keywords.insert(k.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("language profile: ") + e.what());
    }
    return p;
}

int code_em(std::string_view pred, std::string_view gt) { return trim(pred) == trim(gt) ? 1 : 0; }

double code_es(std::string_view pred, std::string_view gt) { return edit_similarity(trim(pred), trim(gt)); }

std::vector<std::string> extract_identifiers(std::string_view code, const LanguageProfile& profile) {
    std::vector<std::string> out;
    auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto tail = [&](char c) { return head(c) || std::isdigit(static_cast<unsigned char>(c)); };
    std::size_t i = 0;
    while (i < code.size()) {
        if (head(code[i]) && (i == 0 || !tail(code[i - 1]))) {
            std::size_t j = i + 1;
            while (j < code.size() && tail(code[j])) {
                ++j;
            }
            std::string_view word = code.substr(i, j - i);
            if (!profile.keywords.contains(word)) {
                out.emplace_back(word);
            }
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

IdentifierScores identifier_scores(const std::vector<std::string>& pred, const std::vector<std::string>& gt) {
    IdentifierScores s;
    s.em = pred == gt ? 1.0 : 0.0;
    std::map<std::string_view, long> counts;
    for (const auto& g : gt) {
        ++counts[g];
    }
    long common = 0;
    for (const auto& p : pred) {
        auto it = counts.find(p);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    s.p = pred.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(pred.size());
    s.r = gt.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(gt.size());
    s.f1 = s.p + s.r > 0.0 ? 2.0 * s.p * s.r / (s.p + s.r) : 0.0;
    return s;
}

IdentifierScores identifier_metrics(std::string_view pred, std::string_view gt, const LanguageProfile& profile) {
    return identifier_scores(extract_identifiers(pred, profile), extract_identifiers(gt, profile));
}

std::vector<EvalExample> parse_dataset(std::string_view jsonl) {
    std::vector<EvalExample> out;
    for_each_record(jsonl, "dataset", [&](const nlohmann::json& j, std::size_t lineno) {
        EvalExample ex;
        ex.task_id = require_string(j, "task_id", "dataset", lineno);
        ex.repo_root = require_string(j, "repo_root", "dataset", lineno);
        ex.file_path = require_string(j, "file_path", "dataset", lineno);
        ex.prefix_text = require_string(j, "prefix_text", "dataset", lineno);
        ex.groundtruth = require_string(j, "groundtruth", "dataset", lineno);
        if (!j.contains("cursor_line") || !j.at("cursor_line").is_number_integer()) {
            throw DataError("dataset line " + std::to_string(lineno) + ": field 'cursor_line' must be an integer");
        }
        ex.cursor_line = j.at("cursor_line").get<int>();
        if (ex.groundtruth.empty()) {
            throw DataError("dataset line " + std::to_string(lineno) + ": groundtruth is empty");
        }
        out.push_back(std::move(ex));
    });
    return out;
}

std::vector<EvalExample> load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

std::map<std::string, std::string> parse_completions(std::string_view jsonl) {
    std::map<std::string, std::string> out;
    for_each_record(jsonl, "completions", [&](const nlohmann::json& j, std::size_t lineno) {
        out[require_string(j, "task_id", "completions", lineno)] = require_string(j, "prediction", "completions", lineno);
    });
    return out;
}

std::map<std::string, std::string> load_completions(const std::filesystem::path& path) {
    return parse_completions(read_file(path));
}

ExampleResult score_example(const EvalExample& ex, std::string_view prediction, const LanguageProfile& profile) {
    ExampleResult r;
    r.task_id = ex.task_id;
    r.code_em = code_em(prediction, ex.groundtruth);
    r.code_es = code_es(prediction, ex.groundtruth);
    r.id = identifier_metrics(prediction, ex.groundtruth, profile);
    return r;
}

MetricsReport aggregate(const std::vector<ExampleResult>& results, std::vector<std::string> missing,
                        std::size_t n_examples) {
    MetricsReport rep;
    rep.n_examples = n_examples;
    rep.n_scored = results.size();
    rep.missing = std::move(missing);
    rep.per_example = results;
    std::sort(rep.per_example.begin(), rep.per_example.end(),
              [](const ExampleResult& a, const ExampleResult& b) { return a.task_id < b.task_id; });
    if (results.empty()) {
        return rep;
    }
    // Summed in task-id order so the means do not depend on input order.
    for (const auto& r : rep.per_example) {
        rep.code_em += r.code_em;
        rep.code_es += r.code_es;
        rep.id_em += r.id.em;
        rep.id_p += r.id.p;
        rep.id_r += r.id.r;
        rep.id_f1 += r.id.f1;
        rep.n_ac += static_cast<double>(r.n_ac);
        rep.n_rc += static_cast<double>(r.n_rc);
    }
    const double n = static_cast<double>(results.size());
    for (double* m : {&rep.code_em, &rep.code_es, &rep.id_em, &rep.id_p, &rep.id_r, &rep.id_f1, &rep.n_ac,
                      &rep.n_rc}) {
        *m /= n;
    }
    return rep;
}

std::string report_json(const MetricsReport& report) {
    nlohmann::json j;
    j["n_examples"] = report.n_examples;
    j["n_scored"] = report.n_scored;
    j["code_em"] = report.code_em;
    j["code_es"] = report.code_es;
    j["id_em"] = report.id_em;
    j["id_p"] = report.id_p;
    j["id_r"] = report.id_r;
    j["id_f1"] = report.id_f1;
    j["n_ac"] = report.n_ac;
    j["n_rc"] = report.n_rc;
    j["missing"] = report.missing;
    auto& per = j["per_example"] = nlohmann::json::array();
    for (const auto& r : report.per_example) {
        per.push_back({{"task_id", r.task_id},
                       {"code_em", r.code_em},
                       {"code_es", r.code_es},
                       {"id_em", r.id.em},
                       {"id_p", r.id.p},
                       {"id_r", r.id.r},
                       {"id_f1", r.id.f1},
                       {"n_ac", r.n_ac},
                       {"n_rc", r.n_rc}});
    }
    return j.dump(2) + "\n";
}

std::string report_table(const MetricsReport& report) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%6s | %-15s | %-31s | %-15s\n", "", "Code Match", "Identifier Match",
                  "No. of CTXs");
    out += buf;
    std::snprintf(buf, sizeof buf, "%6s | %7s %7s | %7s %7s %7s %7s | %7s %7s\n", "n", "EM", "ES", "EM", "P", "R",
                  "F1", "AC", "RC");
    out += buf;
    std::snprintf(buf, sizeof buf, "%6zu | %7.2f %7.2f | %7.2f %7.2f %7.2f %7.2f | %7.2f %7.2f\n", report.n_scored,
                  100 * report.code_em, 100 * report.code_es, 100 * report.id_em, 100 * report.id_p,
                  100 * report.id_r, 100 * report.id_f1, report.n_ac, report.n_rc);
    out += buf;
    if (!report.missing.empty()) {
        out += "missing predictions: " + std::to_string(report.missing.size()) + "\n";
    }
    return out;
}

}  // namespace dualctx
