#include "dualctx/source_model.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "dualctx/error.hpp"
#include "dualctx/text.hpp"

namespace dualctx {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kEntityKindNames = {"MODULE", "CLASS", "FUNCTION", "VARIABLE"};
constexpr std::array<std::string_view, 7> kRelationNames = {"Imports",   "Calls",       "Instantiates", "Uses",
                                                            "Construct", "BaseClassOf", "Overrides"};

bool class_match(std::string_view pattern, std::size_t& p, char c) {
    // pattern[p] == '['
    std::size_t i = p + 1;
    bool negate = false;
    if (i < pattern.size() && (pattern[i] == '!' || pattern[i] == '^')) {
        negate = true;
        ++i;
    }
    bool matched = false;
    bool first = true;
    while (i < pattern.size() && (first || pattern[i] != ']')) {
        first = false;
        char lo = pattern[i];
        char hi = lo;
        if (i + 2 < pattern.size() && pattern[i + 1] == '-' && pattern[i + 2] != ']') {
            hi = pattern[i + 2];
            i += 2;
        }
        if (lo <= c && c <= hi) {
            matched = true;
        }
        ++i;
    }
    if (i >= pattern.size()) {
        // unterminated class: treat '[' literally
        return false;
    }
    p = i + 1;
    return matched != negate;
}

bool glob_impl(std::string_view pat, std::string_view s) {
    std::size_t p = 0;
    std::size_t i = 0;
    while (p < pat.size()) {
        const char pc = pat[p];
        if (pc == '*') {
            const bool deep = p + 1 < pat.size() && pat[p + 1] == '*';
            std::size_t next = p + (deep ? 2 : 1);
            if (deep && next < pat.size() && pat[next] == '/') {
                // "**/" also matches zero directories
                if (glob_impl(pat.substr(next + 1), s.substr(i))) {
                    return true;
                }
            }
            for (std::size_t k = i; k <= s.size(); ++k) {
                if (glob_impl(pat.substr(next), s.substr(k))) {
                    return true;
                }
                if (k < s.size() && s[k] == '/' && !deep) {
                    break;
                }
            }
            return false;
        }
        if (i >= s.size()) {
            return false;
        }
        if (pc == '?') {
            if (s[i] == '/') {
                return false;
            }
            ++p;
            ++i;
            continue;
        }
        if (pc == '[') {
            std::size_t q = p;
            if (class_match(pat, q, s[i])) {
                p = q;
                ++i;
                continue;
            }
            if (q != p) {
                return false;
            }
            // unterminated: literal '['
        }
        if (pc != s[i]) {
            return false;
        }
        ++p;
        ++i;
    }
    return i == s.size();
}

json location_to_json(const Location& loc) {
    return json{{"path", loc.path},
                {"start_line", loc.start_line},
                {"start_col", loc.start_col},
                {"end_line", loc.end_line},
                {"end_col", loc.end_col}};
}

Location location_from_json(const json& j, const std::string& what) {
    if (!j.is_object()) {
        throw DataError(what + ": location must be an object");
    }
    Location loc;
    try {
        loc.path = j.at("path").get<std::string>();
        loc.start_line = j.at("start_line").get<int>();
        loc.start_col = j.at("start_col").get<int>();
        loc.end_line = j.at("end_line").get<int>();
        loc.end_col = j.at("end_col").get<int>();
    } catch (const json::exception& e) {
        throw DataError(what + ": bad location (" + e.what() + ")");
    }
    if (!loc.valid()) {
        throw DataError(what + ": location " + render_location(loc) + " violates ordering or range invariants");
    }
    return loc;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

SourceFile SourceFile::from_text(std::string path, std::string text) {
    SourceFile f;
    f.path = std::move(path);
    f.line_count = static_cast<int>(split_lines(text).size());
    f.text = std::move(text);
    return f;
}

bool Location::valid() const {
    if (path.empty() || start_line < 1 || start_col < 1 || end_line < 1 || end_col < 1) {
        return false;
    }
    return std::pair(start_line, start_col) <= std::pair(end_line, end_col);
}

std::string render_location(const Location& loc) {
    return loc.path + ":" + std::to_string(loc.start_line) + "." + std::to_string(loc.start_col) + "-" +
           std::to_string(loc.end_line) + "." + std::to_string(loc.end_col);
}

std::string_view to_string(EntityKind kind) { return kEntityKindNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(Relation relation) { return kRelationNames[static_cast<std::size_t>(relation)]; }

std::optional<EntityKind> parse_entity_kind(std::string_view s) {
    for (std::size_t i = 0; i < kEntityKindNames.size(); ++i) {
        if (kEntityKindNames[i] == s) {
            return static_cast<EntityKind>(i);
        }
    }
    return std::nullopt;
}

std::optional<Relation> parse_relation(std::string_view s) {
    for (std::size_t i = 0; i < kRelationNames.size(); ++i) {
        if (kRelationNames[i] == s) {
            return static_cast<Relation>(i);
        }
    }
    return std::nullopt;
}

std::string EntityFact::id() const {
    std::string out = name;
    out += ':';
    out += to_string(kind);
    out += '@';
    out += render_location(location);
    return out;
}

bool glob_match(std::string_view pattern, std::string_view path) {
    if (pattern.find('/') == std::string_view::npos) {
        const auto slash = path.rfind('/');
        if (slash != std::string_view::npos) {
            path = path.substr(slash + 1);
        }
    }
    return glob_impl(pattern, path);
}

ScanResult scan_repo(const std::filesystem::path& root, const std::vector<std::string>& include_globs) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw DataError("repository root is not a readable directory: " + root.string());
    }
    ScanResult result;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        throw DataError("cannot read repository root " + root.string() + ": " + ec.message());
    }
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            result.warnings.push_back("directory iteration error: " + ec.message());
            ec.clear();
            continue;
        }
        const fs::path& p = it->path();
        const std::string base = p.filename().string();
        if (it->is_directory(ec)) {
            if (!base.empty() && base[0] == '.') {
                it.disable_recursion_pending();
            }
            continue;
        }
        if (!it->is_regular_file(ec)) {
            continue;
        }
        const std::string rel = p.lexically_relative(root).generic_string();
        const bool wanted = std::any_of(include_globs.begin(), include_globs.end(),
                                        [&](const std::string& g) { return glob_match(g, rel); });
        if (!wanted) {
            continue;
        }
        std::ifstream in(p, std::ios::binary);
        if (!in) {
            result.warnings.push_back("skipped unreadable file: " + rel);
            continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        result.files.push_back(SourceFile::from_text(rel, ss.str()));
    }
    std::sort(result.files.begin(), result.files.end(),
              [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
    return result;
}

std::string module_name_for_path(std::string_view path) {
    std::string p(path);
    if (p.size() >= 3 && p.compare(p.size() - 3, 3, ".py") == 0) {
        p.resize(p.size() - 3);
    }
    constexpr std::string_view init = "__init__";
    if (p == init) {
        return "";
    }
    if (p.size() > init.size() && p.compare(p.size() - init.size() - 1, init.size() + 1, "/__init__") == 0) {
        p.resize(p.size() - init.size() - 1);
    }
    std::replace(p.begin(), p.end(), '/', '.');
    return p;
}

std::string serialize_facts(const FactSet& facts) {
    json entities = json::array();
    for (const auto& e : facts.entities) {
        entities.push_back(json{{"id", e.id()},
                                {"name", e.name},
                                {"kind", to_string(e.kind)},
                                {"location", location_to_json(e.location)},
                                {"signature_text", e.signature_text},
                                {"body_text", e.body_text}});
    }
    json relations = json::array();
    for (const auto& r : facts.relations) {
        relations.push_back(json{{"relation", to_string(r.relation)},
                                 {"source_id", r.source_id},
                                 {"target_id", r.target_id},
                                 {"site", r.site ? location_to_json(*r.site) : json(nullptr)}});
    }
    return json{{"entities", std::move(entities)}, {"relations", std::move(relations)}}.dump(2) + "\n";
}

FactSet parse_facts(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError("facts file is not valid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("entities") || !doc.contains("relations") ||
        !doc["entities"].is_array() || !doc["relations"].is_array()) {
        throw DataError("facts file must be an object with \"entities\" and \"relations\" arrays");
    }
    FactSet out;
    const auto& ents = doc["entities"];
    for (std::size_t i = 0; i < ents.size(); ++i) {
        const std::string what = "entity record " + std::to_string(i);
        const auto& j = ents[i];
        if (!j.is_object()) {
            throw DataError(what + ": not an object");
        }
        EntityFact e;
        try {
            e.name = j.at("name").get<std::string>();
            const auto kind_str = j.at("kind").get<std::string>();
            auto kind = parse_entity_kind(kind_str);
            if (!kind) {
                throw DataError(what + ": unknown kind '" + kind_str + "'");
            }
            e.kind = *kind;
            e.signature_text = j.value("signature_text", std::string{});
            e.body_text = j.value("body_text", std::string{});
        } catch (const json::exception& ex) {
            throw DataError(what + ": " + ex.what());
        }
        if (!j.contains("location")) {
            throw DataError(what + ": missing location");
        }
        e.location = location_from_json(j["location"], what);
        if (j.contains("id")) {
            if (!j["id"].is_string() || j["id"].get<std::string>() != e.id()) {
                throw DataError(what + ": id does not match name:kind@location (expected " + e.id() + ")");
            }
        }
        out.entities.push_back(std::move(e));
    }
    const auto& rels = doc["relations"];
    for (std::size_t i = 0; i < rels.size(); ++i) {
        const std::string what = "relation record " + std::to_string(i);
        const auto& j = rels[i];
        if (!j.is_object()) {
            throw DataError(what + ": not an object");
        }
        RelationFact r;
        try {
            const auto rel_str = j.at("relation").get<std::string>();
            auto rel = parse_relation(rel_str);
            if (!rel) {
                throw DataError(what + ": unknown relation '" + rel_str + "'");
            }
            r.relation = *rel;
            r.source_id = j.at("source_id").get<std::string>();
            r.target_id = j.at("target_id").get<std::string>();
        } catch (const json::exception& ex) {
            throw DataError(what + ": " + ex.what());
        }
        if (j.contains("site") && !j["site"].is_null()) {
            r.site = location_from_json(j["site"], what);
        }
        out.relations.push_back(std::move(r));
    }
    return out;
}

FactSet load_external_facts(const std::filesystem::path& path) { return parse_facts(read_file(path)); }

}  // namespace dualctx
