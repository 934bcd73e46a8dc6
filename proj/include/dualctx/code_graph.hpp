#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dualctx/source_model.hpp"

namespace dualctx {

using NodeType = EntityKind;
using EdgeRelation = Relation;

struct Node {
    std::string name;
    NodeType kind = NodeType::Module;
    Location location;
    std::string signature_text;
    std::string body_text;

    std::string id() const;
    bool operator==(const Node&) const = default;
};

struct Edge {
    EdgeRelation relation = EdgeRelation::Uses;
    std::string from_id;
    std::string to_id;
    std::optional<Location> site;
    // Position in canonical edge order; distinguishes parallel edges and is not
    // part of the public id.
    std::size_t index = 0;

    // "relation@site", with "-" for a missing site.
    std::string id() const;
};

// Multi-directed graph of code entities. Immutable once built; all queries are
// const and safe to call concurrently.
class CodeKnowledgeGraph {
public:
    CodeKnowledgeGraph() = default;

    const std::map<std::string, Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Node* find(std::string_view id) const;
    const Node& node(std::string_view id) const;

    const std::vector<std::size_t>& out_edges(std::string_view id) const;
    const std::vector<std::size_t>& in_edges(std::string_view id) const;

    // Node ids located in path, in source order.
    const std::vector<std::string>& nodes_in(std::string_view path) const;
    bool has_path(std::string_view path) const;
    std::vector<std::string> paths() const;

    // Same node ids and contents, same edge multiset.
    bool operator==(const CodeKnowledgeGraph& other) const;

    friend CodeKnowledgeGraph build_graph(const std::vector<EntityFact>&, const std::vector<RelationFact>&);

private:
    void index();

    std::map<std::string, Node> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> out_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> in_;
    std::map<std::string, std::vector<std::string>, std::less<>> by_path_;
};

// Entities with identical ids collapse into one node; every relation becomes an
// edge (parallel edges are kept). Edges are stored in canonical order, so the
// result does not depend on input order. Throws DataError on dangling endpoints
// or on two different entities sharing an id.
CodeKnowledgeGraph build_graph(const std::vector<EntityFact>& entities, const std::vector<RelationFact>& relations);

// Node whose span contains line with the smallest line span (ties: later start);
// the MODULE node when nothing narrower contains it.
const Node& innermost_enclosing(const CodeKnowledgeGraph& graph, std::string_view path, int line);

// Edges incident to node (either direction) whose relation is in the filter,
// ordered by (site, id).
std::vector<Edge> related_edges(const CodeKnowledgeGraph& graph, const Node& node,
                                const std::set<EdgeRelation>& relations);

const Node& module_node(const CodeKnowledgeGraph& graph, std::string_view path);

// Outgoing Imports edges of a MODULE node.
std::vector<Edge> import_edges(const CodeKnowledgeGraph& graph, const Node& module);

std::string serialize_graph(const CodeKnowledgeGraph& graph);
CodeKnowledgeGraph parse_graph(std::string_view json_text);
void save_graph(const CodeKnowledgeGraph& graph, const std::filesystem::path& path);
CodeKnowledgeGraph load_graph(const std::filesystem::path& path);

}  // namespace dualctx
