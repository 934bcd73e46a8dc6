#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualctx/code_graph.hpp"

namespace dualctx {

struct RationaleItem {
    std::string origin_id;  // node id of the edge's out-node
    std::string origin_path;
    NodeType kind = NodeType::Function;
    EdgeRelation relation = EdgeRelation::Imports;  // relation of the earliest edge reaching it
    Location site;                                  // earliest site reaching it
    std::string text;
};

struct RationaleContext {
    std::vector<RationaleItem> methods;   // FUNCTION out-nodes (full code text)
    std::vector<RationaleItem> classes;   // CLASS out-nodes (class signature)
    std::vector<RationaleItem> packages;  // MODULE and VARIABLE out-nodes (signatures)

    std::size_t size() const { return methods.size() + classes.size() + packages.size(); }
};

// FUNCTION: declaration header. CLASS: header followed by each field and method
// header in source order. MODULE: signatures of its top-level classes and
// functions. VARIABLE: declaration statement. Text is dedented.
std::string signature_of(const Node& node, const CodeKnowledgeGraph& graph);

enum class RationaleScope {
    // Edges of every node that is innermost at some line up to the cursor, so
    // the result only grows as the cursor moves down.
    Prefix,
    // Only the node innermost at the cursor line.
    Innermost,
};

std::string_view to_string(RationaleScope scope);
std::optional<RationaleScope> parse_rationale_scope(std::string_view s);

// Rationale context for a cursor line: edges of the innermost node filtered by
// {Construct, BaseClassOf, Overrides, Calls, Instantiates, Uses}, plus the
// module's Imports edges. An edge contributes its out-node (the referenced
// entity) when that node lives in another file and the edge site starts before
// cursor_line. Each out-node contributes once, at its earliest site. Throws
// ParameterError for an unindexed path.
RationaleContext retrieve_rationale(const CodeKnowledgeGraph& graph, std::string_view path, int cursor_line,
                                    RationaleScope scope = RationaleScope::Prefix);

}  // namespace dualctx
