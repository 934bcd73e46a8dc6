#include "dualctx/code_graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualctx/error.hpp"

namespace dualctx {

using nlohmann::json;

namespace {

const std::vector<std::size_t> kNoEdges;
const std::vector<std::string> kNoNodes;

json location_json(const Location& loc) {
    return json{{"path", loc.path},
                {"start_line", loc.start_line},
                {"start_col", loc.start_col},
                {"end_line", loc.end_line},
                {"end_col", loc.end_col}};
}

EntityFact to_fact(const Node& n) {
    return EntityFact{n.name, n.kind, n.location, n.signature_text, n.body_text};
}

bool edge_less(const Edge& a, const Edge& b) {
    return std::tie(a.from_id, a.to_id, a.relation, a.site) < std::tie(b.from_id, b.to_id, b.relation, b.site);
}

}  // namespace

std::string Node::id() const { return to_fact(*this).id(); }

std::string Edge::id() const {
    std::string out(to_string(relation));
    out += '@';
    out += site ? render_location(*site) : std::string("-");
    return out;
}

const Node* CodeKnowledgeGraph::find(std::string_view id) const {
    auto it = nodes_.find(std::string(id));
    return it == nodes_.end() ? nullptr : &it->second;
}

const Node& CodeKnowledgeGraph::node(std::string_view id) const {
    const Node* n = find(id);
    if (!n) {
        throw ParameterError("node not in graph: " + std::string(id));
    }
    return *n;
}

const std::vector<std::size_t>& CodeKnowledgeGraph::out_edges(std::string_view id) const {
    auto it = out_.find(id);
    return it == out_.end() ? kNoEdges : it->second;
}

const std::vector<std::size_t>& CodeKnowledgeGraph::in_edges(std::string_view id) const {
    auto it = in_.find(id);
    return it == in_.end() ? kNoEdges : it->second;
}

const std::vector<std::string>& CodeKnowledgeGraph::nodes_in(std::string_view path) const {
    auto it = by_path_.find(path);
    return it == by_path_.end() ? kNoNodes : it->second;
}

bool CodeKnowledgeGraph::has_path(std::string_view path) const { return by_path_.find(path) != by_path_.end(); }

std::vector<std::string> CodeKnowledgeGraph::paths() const {
    std::vector<std::string> out;
    out.reserve(by_path_.size());
    for (const auto& [p, _] : by_path_) {
        out.push_back(p);
    }
    return out;
}

bool CodeKnowledgeGraph::operator==(const CodeKnowledgeGraph& other) const {
    if (nodes_ != other.nodes_ || edges_.size() != other.edges_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& a = edges_[i];
        const Edge& b = other.edges_[i];
        if (a.relation != b.relation || a.from_id != b.from_id || a.to_id != b.to_id || a.site != b.site) {
            return false;
        }
    }
    return true;
}

void CodeKnowledgeGraph::index() {
    out_.clear();
    in_.clear();
    by_path_.clear();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        out_[edges_[i].from_id].push_back(i);
        in_[edges_[i].to_id].push_back(i);
    }
    for (const auto& [id, n] : nodes_) {
        by_path_[n.location.path].push_back(id);
    }
    for (auto& [path, ids] : by_path_) {
        std::sort(ids.begin(), ids.end(), [this](const std::string& a, const std::string& b) {
            const Location& la = nodes_.at(a).location;
            const Location& lb = nodes_.at(b).location;
            return std::tie(la, a) < std::tie(lb, b);
        });
    }
}

CodeKnowledgeGraph build_graph(const std::vector<EntityFact>& entities, const std::vector<RelationFact>& relations) {
    CodeKnowledgeGraph g;
    for (const auto& e : entities) {
        Node n{e.name, e.kind, e.location, e.signature_text, e.body_text};
        const std::string id = e.id();
        auto [it, inserted] = g.nodes_.emplace(id, n);
        if (!inserted && !(it->second == n)) {
            throw DataError("conflicting entities share id " + id);
        }
    }
    g.edges_.reserve(relations.size());
    for (std::size_t i = 0; i < relations.size(); ++i) {
        const auto& r = relations[i];
        for (const std::string* end : {&r.source_id, &r.target_id}) {
            if (!g.nodes_.count(*end)) {
                throw DataError("relation " + std::to_string(i) + " (" + std::string(to_string(r.relation)) + " " +
                                r.source_id + " -> " + r.target_id + ") has dangling endpoint " + *end);
            }
        }
        g.edges_.push_back(Edge{r.relation, r.source_id, r.target_id, r.site, 0});
    }
    std::stable_sort(g.edges_.begin(), g.edges_.end(), edge_less);
    for (std::size_t i = 0; i < g.edges_.size(); ++i) {
        g.edges_[i].index = i;
    }
    g.index();
    return g;
}

const Node& innermost_enclosing(const CodeKnowledgeGraph& graph, std::string_view path, int line) {
    const Node& module = module_node(graph, path);
    const Node* best = nullptr;
    for (const auto& id : graph.nodes_in(path)) {
        const Node& n = graph.node(id);
        if (n.kind == NodeType::Module || !n.location.contains_line(line)) {
            continue;
        }
        if (!best) {
            best = &n;
            continue;
        }
        const int span = n.location.line_span();
        const int best_span = best->location.line_span();
        const auto start = std::pair(n.location.start_line, n.location.start_col);
        const auto best_start = std::pair(best->location.start_line, best->location.start_col);
        if (span < best_span || (span == best_span && start > best_start)) {
            best = &n;
        }
    }
    return best ? *best : module;
}

std::vector<Edge> related_edges(const CodeKnowledgeGraph& graph, const Node& node,
                                const std::set<EdgeRelation>& relations) {
    std::vector<std::size_t> idx;
    if (relations.empty()) {
        return {};
    }
    const std::string id = node.id();
    for (const auto* list : {&graph.out_edges(id), &graph.in_edges(id)}) {
        for (std::size_t i : *list) {
            if (relations.count(graph.edges()[i].relation)) {
                idx.push_back(i);
            }
        }
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<Edge> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(graph.edges()[i]);
    }
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return std::make_tuple(a.site, a.id(), a.index) < std::make_tuple(b.site, b.id(), b.index);
    });
    return out;
}

const Node& module_node(const CodeKnowledgeGraph& graph, std::string_view path) {
    for (const auto& id : graph.nodes_in(path)) {
        const Node& n = graph.node(id);
        if (n.kind == NodeType::Module) {
            return n;
        }
    }
    throw ParameterError("path is not indexed: " + std::string(path));
}

std::vector<Edge> import_edges(const CodeKnowledgeGraph& graph, const Node& module) {
    std::vector<Edge> out;
    for (std::size_t i : graph.out_edges(module.id())) {
        if (graph.edges()[i].relation == EdgeRelation::Imports) {
            out.push_back(graph.edges()[i]);
        }
    }
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return std::make_tuple(a.site, a.id(), a.index) < std::make_tuple(b.site, b.id(), b.index);
    });
    return out;
}

std::string serialize_graph(const CodeKnowledgeGraph& graph) {
    json nodes = json::array();
    for (const auto& [id, n] : graph.nodes()) {
        nodes.push_back(json{{"id", id},
                             {"name", n.name},
                             {"kind", to_string(n.kind)},
                             {"location", location_json(n.location)},
                             {"signature_text", n.signature_text},
                             {"body_text", n.body_text}});
    }
    json edges = json::array();
    for (const auto& e : graph.edges()) {
        edges.push_back(json{{"id", e.id()},
                             {"relation", to_string(e.relation)},
                             {"from", e.from_id},
                             {"to", e.to_id},
                             {"site", e.site ? location_json(*e.site) : json(nullptr)}});
    }
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}.dump(2) + "\n";
}

CodeKnowledgeGraph parse_graph(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError("corrupt graph file at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges") || !doc["nodes"].is_array() ||
        !doc["edges"].is_array()) {
        throw DataError("graph file must be an object with \"nodes\" and \"edges\" arrays");
    }
    // Reuse the facts schema and its validation.
    json facts{{"entities", json::array()}, {"relations", json::array()}};
    for (const auto& n : doc["nodes"]) {
        facts["entities"].push_back(n);
    }
    for (const auto& e : doc["edges"]) {
        if (!e.is_object()) {
            throw DataError("graph edge record is not an object");
        }
        facts["relations"].push_back(json{{"relation", e.value("relation", json())},
                                          {"source_id", e.value("from", json())},
                                          {"target_id", e.value("to", json())},
                                          {"site", e.value("site", json())}});
    }
    FactSet fs = parse_facts(facts.dump());
    return build_graph(fs.entities, fs.relations);
}

void save_graph(const CodeKnowledgeGraph& graph, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write graph file " + path.string());
    }
    out << serialize_graph(graph);
}

CodeKnowledgeGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read graph file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_graph(ss.str());
}

}  // namespace dualctx
