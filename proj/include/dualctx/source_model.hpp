#pragma once

#include <compare>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualctx {

struct SourceFile {
    std::string path;  // repo-relative, '/'-separated
    std::string text;
    int line_count = 0;

    static SourceFile from_text(std::string path, std::string text);
};

// 1-based, inclusive positions.
struct Location {
    std::string path;
    int start_line = 1;
    int start_col = 1;
    int end_line = 1;
    int end_col = 1;

    bool contains_line(int line) const { return start_line <= line && line <= end_line; }
    int line_span() const { return end_line - start_line; }
    bool valid() const;

    auto operator<=>(const Location&) const = default;
    bool operator==(const Location&) const = default;
};

// "path:start_line.start_col-end_line.end_col"
std::string render_location(const Location& loc);

enum class EntityKind { Module, Class, Function, Variable };

enum class Relation { Imports, Calls, Instantiates, Uses, Construct, BaseClassOf, Overrides };

std::string_view to_string(EntityKind kind);
std::string_view to_string(Relation relation);
std::optional<EntityKind> parse_entity_kind(std::string_view s);
std::optional<Relation> parse_relation(std::string_view s);

struct EntityFact {
    std::string name;
    EntityKind kind = EntityKind::Module;
    Location location;
    std::string signature_text;
    std::string body_text;

    // "name:KIND@location"
    std::string id() const;

    bool operator==(const EntityFact&) const = default;
};

struct RelationFact {
    Relation relation = Relation::Uses;
    std::string source_id;
    std::string target_id;
    std::optional<Location> site;

    bool operator==(const RelationFact&) const = default;
};

struct Diagnostic {
    std::string path;
    int line = 0;
    int col = 0;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

struct FactSet {
    std::vector<EntityFact> entities;
    std::vector<RelationFact> relations;
    std::vector<Diagnostic> diagnostics;
};

struct ScanResult {
    std::vector<SourceFile> files;
    std::vector<std::string> warnings;
};

// Recursively collects files under root whose repo-relative path matches any of
// the globs. Hidden directories (".git", ".dualctx", ...) are not descended into.
// Throws DataError when root is missing or unreadable.
ScanResult scan_repo(const std::filesystem::path& root, const std::vector<std::string>& include_globs);

// fnmatch-style matching with '*', '?', '**' and [...] classes. Patterns without
// a '/' match against the basename.
bool glob_match(std::string_view pattern, std::string_view path);

// Runs the built-in Python-subset analyzer over a repository snapshot and links
// cross-file references. Entities and relations are ordered by file path, then
// by source position.
class FactExtractor {
public:
    explicit FactExtractor(std::vector<SourceFile> files);
    ~FactExtractor();
    FactExtractor(FactExtractor&&) noexcept;
    FactExtractor& operator=(FactExtractor&&) noexcept;

    // Facts contributed by one file (relations sourced in that file).
    FactSet extract_facts(std::string_view path) const;
    // The merged stream for all files.
    FactSet extract_all() const;

    const std::vector<SourceFile>& files() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Convenience: facts for a single standalone file (no cross-file resolution).
FactSet extract_facts(const SourceFile& file);

// Facts file I/O (JSON {"entities": [...], "relations": [...]}).
std::string serialize_facts(const FactSet& facts);
FactSet parse_facts(std::string_view json_text);
FactSet load_external_facts(const std::filesystem::path& path);

// Module dotted name for a repo-relative python path ("pkg/__init__.py" -> "pkg").
std::string module_name_for_path(std::string_view path);

}  // namespace dualctx
