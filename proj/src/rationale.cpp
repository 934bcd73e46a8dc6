#include "dualctx/rationale.hpp"

#include <algorithm>
#include <map>

#include "dualctx/text.hpp"
#include "python_lexer.hpp"

namespace dualctx {

namespace {

const std::set<EdgeRelation> kRelatedRelations = {EdgeRelation::Construct, EdgeRelation::BaseClassOf,
                                                  EdgeRelation::Overrides, EdgeRelation::Calls,
                                                  EdgeRelation::Instantiates, EdgeRelation::Uses};

class TextSlicer {
public:
    explicit TextSlicer(const std::string& text) : text_(text) {
        offsets_.push_back(0);
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '\n') {
                offsets_.push_back(i + 1);
            }
        }
    }

    // From the start of `line` through (end_line, end_col) inclusive.
    std::string lines_through(int line, int end_line, int end_col) const {
        const std::size_t b = offsets_.at(line - 1);
        const std::size_t e = std::min(text_.size(), offsets_.at(end_line - 1) + end_col);
        return b < e ? text_.substr(b, e - b) : std::string{};
    }

private:
    const std::string& text_;
    std::vector<std::size_t> offsets_;
};

std::size_t block_colon(const std::vector<py::Token>& toks) {
    int depth = 0;
    int lambdas = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& t = toks[i];
        if (t.is_op("(") || t.is_op("[") || t.is_op("{")) {
            ++depth;
        } else if (t.is_op(")") || t.is_op("]") || t.is_op("}")) {
            --depth;
        } else if (depth == 0 && t.is_name("lambda")) {
            ++lambdas;
        } else if (depth == 0 && t.is_op(":")) {
            if (lambdas == 0) {
                return i;
            }
            --lambdas;
        }
    }
    return toks.size();
}

bool is_field_statement(const std::vector<py::Token>& toks) {
    if (toks.size() < 2 || toks[0].kind != py::TokKind::Name || py::is_keyword(toks[0].text)) {
        return false;
    }
    if (toks[1].is_op(":") || toks[1].is_op("=")) {
        return true;
    }
    // a, b = ...
    for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[i].is_op("=")) {
            return true;
        }
        if (!(toks[i].is_op(",") || (toks[i].kind == py::TokKind::Name && !py::is_keyword(toks[i].text)))) {
            return false;
        }
    }
    return false;
}

std::string class_signature(const Node& node) {
    const std::string absolute =
        std::string(static_cast<std::size_t>(std::max(0, node.location.start_col - 1)), ' ') + node.body_text;
    const auto lexed = py::lex(absolute);
    if (lexed.lines.empty()) {
        return dedent_from_column(node.signature_text, node.location.start_col);
    }
    TextSlicer slicer(absolute);
    std::vector<std::string> parts;
    const auto& header = lexed.lines.front();
    const std::size_t colon = block_colon(header.tokens);
    const auto& hl = header.tokens[std::min(colon, header.tokens.size() - 1)];
    parts.push_back(slicer.lines_through(header.tokens.front().line, hl.end_line, hl.end_col));

    int member_indent = -1;
    for (std::size_t li = 1; li < lexed.lines.size(); ++li) {
        const auto& line = lexed.lines[li];
        if (line.indent <= header.indent) {
            break;
        }
        if (member_indent < 0) {
            member_indent = line.indent;
        }
        if (line.indent != member_indent) {
            continue;
        }
        const auto& toks = line.tokens;
        std::size_t first = 0;
        if (toks[0].is_name("async") && toks.size() > 1) {
            first = 1;
        }
        if (toks[first].is_name("def") || toks[first].is_name("class")) {
            const std::size_t c = block_colon(toks);
            const auto& last = toks[std::min(c, toks.size() - 1)];
            parts.push_back(slicer.lines_through(toks.front().line, last.end_line, last.end_col));
        } else if (is_field_statement(toks)) {
            const auto& last = toks.back();
            parts.push_back(slicer.lines_through(toks.front().line, last.end_line, last.end_col));
        }
    }
    std::string joined;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) {
            joined.push_back('\n');
        }
        joined += parts[i];
    }
    return dedent(joined);
}

bool strictly_inside(const Location& inner, const Location& outer) {
    return std::pair(outer.start_line, outer.start_col) <= std::pair(inner.start_line, inner.start_col) &&
           std::pair(inner.end_line, inner.end_col) <= std::pair(outer.end_line, outer.end_col) &&
           !(inner == outer);
}

std::string module_signature(const Node& module, const CodeKnowledgeGraph& graph) {
    std::vector<const Node*> defs;
    for (const auto& id : graph.nodes_in(module.location.path)) {
        const Node& n = graph.node(id);
        if (n.kind == NodeType::Class || n.kind == NodeType::Function) {
            defs.push_back(&n);
        }
    }
    std::string out;
    for (const Node* n : defs) {
        const bool nested = std::any_of(defs.begin(), defs.end(), [&](const Node* other) {
            return other != n && strictly_inside(n->location, other->location);
        });
        if (nested) {
            continue;
        }
        if (!out.empty()) {
            out.push_back('\n');
        }
        out += signature_of(*n, graph);
    }
    return out;
}

}  // namespace

std::string signature_of(const Node& node, const CodeKnowledgeGraph& graph) {
    switch (node.kind) {
        case NodeType::Function:
        case NodeType::Variable:
            return dedent_from_column(node.signature_text, node.location.start_col);
        case NodeType::Class:
            return class_signature(node);
        case NodeType::Module:
            return module_signature(node, graph);
    }
    return {};
}

std::string_view to_string(RationaleScope scope) {
    return scope == RationaleScope::Prefix ? "prefix" : "innermost";
}

std::optional<RationaleScope> parse_rationale_scope(std::string_view s) {
    if (s == "prefix") {
        return RationaleScope::Prefix;
    }
    if (s == "innermost") {
        return RationaleScope::Innermost;
    }
    return std::nullopt;
}

RationaleContext retrieve_rationale(const CodeKnowledgeGraph& graph, std::string_view path, int cursor_line,
                                    RationaleScope scope) {
    const Node& module = module_node(graph, path);

    std::vector<Edge> all;
    auto take_node = [&](const Node& node) {
        for (auto& e : related_edges(graph, node, kRelatedRelations)) {
            all.push_back(std::move(e));
        }
    };
    if (scope == RationaleScope::Innermost) {
        take_node(innermost_enclosing(graph, path, cursor_line));
    } else {
        // Every node that is innermost somewhere in lines 1..cursor_line.
        std::map<std::string, const Node*> seen;
        for (int m = 1; m <= cursor_line; ++m) {
            const Node& n = innermost_enclosing(graph, path, m);
            seen.emplace(n.id(), &n);
        }
        for (const auto& [_, n] : seen) {
            take_node(*n);
        }
    }
    for (auto& e : import_edges(graph, module)) {
        all.push_back(std::move(e));
    }

    std::map<std::string, RationaleItem> picked;
    for (const Edge& e : all) {
        const Node& out = graph.node(e.to_id);
        if (out.location.path == path || !e.site || e.site->start_line >= cursor_line) {
            continue;
        }
        auto it = picked.find(e.to_id);
        if (it != picked.end()) {
            if (*e.site < it->second.site) {
                it->second.site = *e.site;
                it->second.relation = e.relation;
            }
            continue;
        }
        RationaleItem item;
        item.origin_id = e.to_id;
        item.origin_path = out.location.path;
        item.kind = out.kind;
        item.relation = e.relation;
        item.site = *e.site;
        item.text = out.kind == NodeType::Function ? dedent_from_column(out.body_text, out.location.start_col)
                                                   : signature_of(out, graph);
        picked.emplace(e.to_id, std::move(item));
    }

    std::vector<RationaleItem> items;
    for (auto& [_, item] : picked) {
        items.push_back(std::move(item));
    }
    std::sort(items.begin(), items.end(), [](const RationaleItem& a, const RationaleItem& b) {
        return std::tie(a.site, a.origin_id) < std::tie(b.site, b.origin_id);
    });
    RationaleContext ctx;
    for (auto& item : items) {
        switch (item.kind) {
            case NodeType::Function:
                ctx.methods.push_back(std::move(item));
                break;
            case NodeType::Class:
                ctx.classes.push_back(std::move(item));
                break;
            case NodeType::Module:
            case NodeType::Variable:
                ctx.packages.push_back(std::move(item));
                break;
        }
    }
    return ctx;
}

}  // namespace dualctx
