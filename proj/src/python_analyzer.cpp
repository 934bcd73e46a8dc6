// Built-in analyzer for a statically resolvable Python subset.
//
// Pass 1 (per file, pure): lex into logical lines, recover class/def blocks from
// indentation, create entity facts, record name bindings per scope and keep the
// statements whose names still need resolving.
//
// Pass 2 (repo-wide): resolve imports against the module table, then scan the
// recorded statements and emit relation facts. Resolution is name based: locals,
// enclosing function scopes, the module namespace, then builtins. Attribute
// access is followed only through names bound to repository modules.

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>
#include <variant>

#include "dualctx/error.hpp"
#include "dualctx/source_model.hpp"
#include "dualctx/text.hpp"
#include "python_lexer.hpp"

namespace dualctx {

namespace {

using py::LogicalLine;
using py::TokKind;
using py::Token;
using Tokens = std::vector<Token>;

const std::unordered_set<std::string_view>& builtins() {
    static const std::unordered_set<std::string_view> names = {
        "abs", "aiter", "all", "anext", "any", "ascii", "bin", "bool", "breakpoint", "bytearray", "bytes",
        "callable", "chr", "classmethod", "compile", "complex", "copyright", "credits", "delattr", "dict", "dir",
        "divmod", "enumerate", "eval", "exec", "exit", "filter", "float", "format", "frozenset", "getattr",
        "globals", "hasattr", "hash", "help", "hex", "id", "input", "int", "isinstance", "issubclass", "iter",
        "len", "license", "list", "locals", "map", "max", "memoryview", "min", "next", "object", "oct", "open",
        "ord", "pow", "print", "property", "quit", "range", "repr", "reversed", "round", "set", "setattr",
        "slice", "sorted", "staticmethod", "str", "sum", "super", "tuple", "type", "vars", "zip", "__import__",
        "__name__", "__file__", "__doc__", "__spec__", "__package__", "__loader__", "__builtins__", "__debug__",
        "__dict__", "__class__", "__all__", "NotImplemented", "Ellipsis", "BaseException", "BaseExceptionGroup",
        "Exception", "ExceptionGroup", "ArithmeticError", "AssertionError", "AttributeError", "BlockingIOError",
        "BrokenPipeError", "BufferError", "ChildProcessError", "ConnectionAbortedError", "ConnectionError",
        "ConnectionRefusedError", "ConnectionResetError", "EOFError", "EnvironmentError", "FileExistsError",
        "FileNotFoundError", "FloatingPointError", "GeneratorExit", "IOError", "ImportError", "IndentationError",
        "IndexError", "InterruptedError", "IsADirectoryError", "KeyError", "KeyboardInterrupt", "LookupError",
        "MemoryError", "ModuleNotFoundError", "NameError", "NotADirectoryError", "NotImplementedError",
        "OSError", "OverflowError", "PermissionError", "ProcessLookupError", "RecursionError", "ReferenceError",
        "RuntimeError", "StopAsyncIteration", "StopIteration", "SyntaxError", "SystemError", "SystemExit",
        "TabError", "TimeoutError", "TypeError", "UnboundLocalError", "UnicodeDecodeError",
        "UnicodeEncodeError", "UnicodeError", "UnicodeTranslateError", "ValueError", "ZeroDivisionError",
        "Warning", "UserWarning", "DeprecationWarning", "PendingDeprecationWarning", "SyntaxWarning",
        "RuntimeWarning", "FutureWarning", "ImportWarning", "UnicodeWarning", "BytesWarning", "ResourceWarning",
        "EncodingWarning", "self", "cls", "match", "case", "_"};
    return names;
}

struct Binding {
    enum class Kind { Entity, Opaque, ImportedName, ImportedModule };
    Kind kind = Kind::Opaque;
    int entity = -1;
    std::string module;  // as written, made absolute for relative imports
    bool absolute = true;
    std::string name;
};

struct Scope {
    enum class Kind { Module, Class, Function };
    Kind kind = Kind::Module;
    int entity = 0;
    int parent = -1;
    int header_indent = -1;
    std::map<std::string, Binding> bindings;
};

struct Stmt {
    int scope = 0;
    Tokens tokens;
    std::vector<char> skip;
};

struct ImportedItem {
    std::string module;
    bool absolute = true;
    std::optional<std::string> member;  // set for from-imports
    Location site;
};

struct BaseExpr {
    Tokens tokens;
    int scope = 0;
};

struct ClassInfo {
    int entity = 0;
    int scope = 0;
    std::vector<BaseExpr> bases;
    Location header;
};

struct FileModel {
    const SourceFile* file = nullptr;
    std::string module;
    std::vector<std::string> package_parts;
    std::vector<std::size_t> line_offsets;
    std::vector<EntityFact> entities;
    std::vector<Scope> scopes;
    std::vector<Stmt> stmts;
    std::vector<ImportedItem> imports;  // module-level only
    std::vector<ClassInfo> classes;
    std::map<int, Location> function_headers;
    std::vector<Diagnostic> diagnostics;
};

bool is_compound_keyword(std::string_view w) {
    return w == "if" || w == "elif" || w == "else" || w == "while" || w == "for" || w == "try" || w == "except" ||
           w == "finally" || w == "with";
}

bool is_open(const Token& t) { return t.kind == TokKind::Op && (t.text == "(" || t.text == "[" || t.text == "{"); }
bool is_close(const Token& t) { return t.kind == TokKind::Op && (t.text == ")" || t.text == "]" || t.text == "}"); }

bool is_augmented_op(const Token& t) {
    static const std::set<std::string_view> ops = {"+=", "-=", "*=", "/=", "//=", "%=", "**=",
                                                   ">>=", "<<=", "&=", "|=", "^=", "@="};
    return t.kind == TokKind::Op && ops.count(t.text) > 0;
}

bool is_ref_name(const Token& t) { return t.kind == TokKind::Name && !py::is_keyword(t.text); }

// Index of the bracket matching toks[open], or end when unbalanced.
std::size_t matching_close(const Tokens& toks, std::size_t open, std::size_t end) {
    int depth = 0;
    for (std::size_t i = open; i < end; ++i) {
        if (is_open(toks[i])) {
            ++depth;
        } else if (is_close(toks[i])) {
            if (--depth == 0) {
                return i;
            }
        }
    }
    return end;
}

// First ':' at bracket depth 0 in [b, e) that does not belong to a lambda.
std::size_t find_block_colon(const Tokens& toks, std::size_t b, std::size_t e) {
    int depth = 0;
    int pending_lambdas = 0;
    for (std::size_t i = b; i < e; ++i) {
        const Token& t = toks[i];
        if (is_open(t)) {
            ++depth;
        } else if (is_close(t)) {
            depth = std::max(0, depth - 1);
        } else if (depth == 0 && t.is_name("lambda")) {
            ++pending_lambdas;
        } else if (depth == 0 && t.is_op(":")) {
            if (pending_lambdas > 0) {
                --pending_lambdas;
            } else {
                return i;
            }
        }
    }
    return e;
}

class ModelBuilder {
public:
    explicit ModelBuilder(const SourceFile& file) {
        m_.file = &file;
        m_.module = module_name_for_path(file.path);
        const bool is_init = file.path == "__init__.py" ||
                             (file.path.size() > 12 && file.path.ends_with("/__init__.py"));
        std::string pkg = m_.module;
        if (!is_init) {
            const auto dot = pkg.rfind('.');
            pkg = dot == std::string::npos ? std::string{} : pkg.substr(0, dot);
        }
        std::size_t start = 0;
        while (!pkg.empty() && start <= pkg.size()) {
            const auto dot = pkg.find('.', start);
            m_.package_parts.push_back(pkg.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
            if (dot == std::string::npos) {
                break;
            }
            start = dot + 1;
        }
        m_.line_offsets.push_back(0);
        for (std::size_t i = 0; i < file.text.size(); ++i) {
            if (file.text[i] == '\n') {
                m_.line_offsets.push_back(i + 1);
            }
        }
    }

    FileModel build() {
        const SourceFile& f = *m_.file;
        auto lines = split_lines(f.text);
        EntityFact mod;
        mod.name = m_.module.empty() ? std::string("__init__") : m_.module;
        mod.kind = EntityKind::Module;
        mod.location.path = f.path;
        mod.location.end_line = std::max<int>(1, static_cast<int>(lines.size()));
        mod.location.end_col = lines.empty() ? 1 : std::max<int>(1, static_cast<int>(lines.back().size()));
        mod.body_text = f.text;
        m_.entities.push_back(std::move(mod));
        Scope module_scope;
        m_.scopes.push_back(module_scope);

        auto lexed = py::lex(f.text);
        for (const auto& err : lexed.errors) {
            m_.diagnostics.push_back({f.path, err.line, err.col, err.message});
        }
        stack_ = {0};
        for (const LogicalLine& line : lexed.lines) {
            while (stack_.size() > 1 && line.indent <= m_.scopes[stack_.back()].header_indent) {
                stack_.pop_back();
            }
            handle_statement(line.tokens, 0, line.tokens.size(), stack_.back(), line.indent, true);
            const Token& last = line.tokens.back();
            for (std::size_t k = 1; k < stack_.size(); ++k) {
                set_end(m_.scopes[stack_[k]].entity, last);
            }
        }
        return std::move(m_);
    }

private:
    std::string slice(int sl, int sc, int el, int ec) const {
        const std::string& text = m_.file->text;
        auto off = [&](int line, int col) -> std::size_t {
            if (line < 1 || static_cast<std::size_t>(line) > m_.line_offsets.size()) {
                return text.size();
            }
            return std::min(text.size(), m_.line_offsets[line - 1] + static_cast<std::size_t>(col - 1));
        };
        const std::size_t b = off(sl, sc);
        const std::size_t e = std::min(text.size(), off(el, ec) + 1);
        return b < e ? text.substr(b, e - b) : std::string{};
    }

    Location span(const Token& first, const Token& last) const {
        return Location{m_.file->path, first.line, first.col, last.end_line, last.end_col};
    }

    void set_end(int entity, const Token& last) {
        EntityFact& e = m_.entities[entity];
        if (std::pair(last.end_line, last.end_col) > std::pair(e.location.end_line, e.location.end_col)) {
            e.location.end_line = last.end_line;
            e.location.end_col = last.end_col;
        }
        e.body_text = slice(e.location.start_line, e.location.start_col, e.location.end_line, e.location.end_col);
    }

    int add_entity(std::string name, EntityKind kind, const Token& first, const Token& header_last) {
        EntityFact e;
        e.name = std::move(name);
        e.kind = kind;
        e.location = span(first, header_last);
        e.signature_text = slice(first.line, first.col, header_last.end_line, header_last.end_col);
        e.body_text = e.signature_text;
        m_.entities.push_back(std::move(e));
        return static_cast<int>(m_.entities.size()) - 1;
    }

    void bind(int scope, const std::string& name, Binding b) {
        auto& bindings = m_.scopes[scope].bindings;
        if (bindings.find(name) == bindings.end()) {
            bindings.emplace(name, std::move(b));
        }
    }

    void bind_opaque(int scope, const std::string& name) { bind(scope, name, Binding{}); }

    void add_stmt(int scope, const Tokens& toks, std::size_t b, std::size_t e, std::vector<char> skip = {}) {
        if (b >= e) {
            return;
        }
        Stmt s;
        s.scope = scope;
        s.tokens.assign(toks.begin() + static_cast<std::ptrdiff_t>(b), toks.begin() + static_cast<std::ptrdiff_t>(e));
        if (skip.empty()) {
            skip.assign(s.tokens.size(), 0);
        }
        s.skip = std::move(skip);
        m_.stmts.push_back(std::move(s));
    }

    void diag(const Token& t, std::string msg) {
        m_.diagnostics.push_back({m_.file->path, t.line, t.col, std::move(msg)});
    }

    void handle_statement(const Tokens& toks, std::size_t b, std::size_t e, int scope, int indent, bool block_ok) {
        if (b >= e) {
            return;
        }
        const Token& first = toks[b];
        if (first.is_op("@")) {
            add_stmt(scope, toks, b, e);
            return;
        }
        if (first.is_name("async") && b + 1 < e) {
            if (toks[b + 1].is_name("def")) {
                handle_def(toks, b, b + 1, e, scope, indent, block_ok);
                return;
            }
            handle_statement_keyword(toks, b + 1, e, scope, indent, block_ok);
            return;
        }
        if (first.is_name("class")) {
            handle_class(toks, b, e, scope, indent, block_ok);
            return;
        }
        if (first.is_name("def")) {
            handle_def(toks, b, b, e, scope, indent, block_ok);
            return;
        }
        handle_statement_keyword(toks, b, e, scope, indent, block_ok);
    }

    void handle_statement_keyword(const Tokens& toks, std::size_t b, std::size_t e, int scope, int indent,
                                  bool block_ok) {
        const Token& first = toks[b];
        if (first.is_name("import")) {
            handle_import(toks, b, e, scope);
            return;
        }
        if (first.is_name("from")) {
            handle_from(toks, b, e, scope);
            return;
        }
        if (first.is_name("global") || first.is_name("nonlocal") || first.is_name("pass")) {
            return;
        }
        if (first.kind == TokKind::Name && (first.text == "match" || first.text == "case") && e - b >= 3 &&
            toks[e - 1].is_op(":") && !toks[b + 1].is_op("=") && !toks[b + 1].is_op(".") &&
            !toks[b + 1].is_op("(") && find_block_colon(toks, b, e) == e - 1) {
            if (first.text == "match") {
                add_stmt(scope, toks, b + 1, e - 1);
            }
            return;
        }
        if (first.kind == TokKind::Name && is_compound_keyword(first.text)) {
            const std::size_t colon = find_block_colon(toks, b, e);
            std::vector<char> skip(colon - b, 0);
            if (first.text == "for") {
                bind_targets_until(toks, b + 1, colon, "in", scope, skip, b);
            } else if (first.text == "with" || first.text == "except") {
                bind_as_targets(toks, b, colon, scope, skip, b);
            }
            add_stmt(scope, toks, b, colon, std::move(skip));
            if (colon + 1 < e) {
                handle_statement(toks, colon + 1, e, scope, indent, false);
            }
            return;
        }
        handle_simple(toks, b, e, scope);
    }

    // Binds NAME tokens of a target list [b, stop_word) at any unpacking depth.
    void bind_targets_until(const Tokens& toks, std::size_t b, std::size_t e, std::string_view stop_word, int scope,
                            std::vector<char>& skip, std::size_t skip_base) {
        for (std::size_t i = b; i < e; ++i) {
            if (toks[i].is_name(stop_word)) {
                break;
            }
            if (is_ref_name(toks[i]) && (i == b || !toks[i - 1].is_op(".")) &&
                (i + 1 >= e || (!toks[i + 1].is_op(".") && !toks[i + 1].is_op("[") && !toks[i + 1].is_op("(")))) {
                bind_opaque(scope, toks[i].text);
                skip[i - skip_base] = 1;
            }
        }
    }

    void bind_as_targets(const Tokens& toks, std::size_t b, std::size_t e, int scope, std::vector<char>& skip,
                         std::size_t skip_base) {
        for (std::size_t i = b; i + 1 < e; ++i) {
            if (toks[i].is_name("as") && is_ref_name(toks[i + 1])) {
                bind_opaque(scope, toks[i + 1].text);
                skip[i + 1 - skip_base] = 1;
            }
        }
    }

    void handle_simple(const Tokens& toks, std::size_t b, std::size_t e, int scope) {
        std::vector<char> skip(e - b, 0);
        // assignment '=' positions at depth 0, up to the first lambda
        std::vector<std::size_t> eqs;
        int depth = 0;
        for (std::size_t i = b; i < e; ++i) {
            const Token& t = toks[i];
            if (is_open(t)) {
                ++depth;
            } else if (is_close(t)) {
                depth = std::max(0, depth - 1);
            } else if (depth == 0 && t.is_name("lambda")) {
                break;
            } else if (depth == 0 && t.is_op("=")) {
                eqs.push_back(i);
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> target_names;  // (token index, stmt end index)
        if (!eqs.empty()) {
            std::size_t seg = b;
            for (std::size_t eq : eqs) {
                collect_unpack_targets(toks, seg, eq, target_names);
                seg = eq + 1;
            }
        } else if (e - b >= 2 && is_ref_name(toks[b]) && toks[b + 1].is_op(":")) {
            target_names.push_back({b, e});
        } else if (e - b >= 2 && is_ref_name(toks[b]) && is_augmented_op(toks[b + 1])) {
            if (m_.scopes[scope].kind == Scope::Kind::Function) {
                bind_opaque(scope, toks[b].text);
            }
        }
        for (std::size_t i = b; i + 1 < e; ++i) {
            if (is_ref_name(toks[i]) && toks[i + 1].is_op(":=")) {
                bind_opaque(scope, toks[i].text);
                skip[i - b] = 1;
            }
        }
        for (auto [idx, _] : target_names) {
            const Token& name = toks[idx];
            skip[idx - b] = 1;
            const Scope& sc = m_.scopes[scope];
            if (sc.kind == Scope::Kind::Module) {
                if (sc.bindings.count(name.text)) {
                    continue;
                }
                const int ent = add_entity(name.text, EntityKind::Variable, name, toks[e - 1]);
                Binding bnd;
                bnd.kind = Binding::Kind::Entity;
                bnd.entity = ent;
                bind(scope, name.text, bnd);
            } else {
                bind_opaque(scope, name.text);
            }
        }
        add_stmt(scope, toks, b, e, std::move(skip));
    }

    // Names in [b, e) that are bound by assignment (plain or tuple/list unpacking).
    static void collect_unpack_targets(const Tokens& toks, std::size_t b, std::size_t e,
                                       std::vector<std::pair<std::size_t, std::size_t>>& out) {
        std::vector<bool> unpack_stack;
        for (std::size_t i = b; i < e; ++i) {
            const Token& t = toks[i];
            const bool at_start =
                i == b || toks[i - 1].is_op(",") || toks[i - 1].is_op("*") || (is_open(toks[i - 1]) &&
                                                                               !unpack_stack.empty() &&
                                                                               unpack_stack.back());
            if (t.is_op("(") || t.is_op("[")) {
                const bool parent_ok = unpack_stack.empty() || unpack_stack.back();
                unpack_stack.push_back(parent_ok && at_start);
                continue;
            }
            if (t.is_op("{")) {
                unpack_stack.push_back(false);
                continue;
            }
            if (is_close(t)) {
                if (!unpack_stack.empty()) {
                    unpack_stack.pop_back();
                }
                continue;
            }
            if (!is_ref_name(t)) {
                continue;
            }
            const bool inside_ok = unpack_stack.empty() || unpack_stack.back();
            const bool followed_ok = i + 1 >= e || toks[i + 1].is_op(",") || is_close(toks[i + 1]) ||
                                     toks[i + 1].is_op(":");
            if (inside_ok && at_start && followed_ok) {
                out.push_back({i, e});
            }
        }
    }

    void handle_class(const Tokens& toks, std::size_t b, std::size_t e, int scope, int indent, bool block_ok) {
        if (b + 1 >= e || !is_ref_name(toks[b + 1])) {
            diag(toks[b], "malformed class header");
            return;
        }
        const std::size_t colon = find_block_colon(toks, b, e);
        if (colon >= e) {
            diag(toks[b], "class header without ':'");
            return;
        }
        const Token& name = toks[b + 1];
        const int ent = add_entity(name.text, EntityKind::Class, toks[b], toks[colon]);
        Binding bnd;
        bnd.kind = Binding::Kind::Entity;
        bnd.entity = ent;
        bind(scope, name.text, bnd);

        Scope cls;
        cls.kind = Scope::Kind::Class;
        cls.entity = ent;
        cls.parent = scope;
        cls.header_indent = indent;
        m_.scopes.push_back(cls);
        const int new_scope = static_cast<int>(m_.scopes.size()) - 1;

        ClassInfo info;
        info.entity = ent;
        info.scope = new_scope;
        info.header = span(toks[b], toks[colon]);
        std::vector<char> skip(colon - b, 0);
        skip[0] = 1;
        skip[1] = 1;
        if (b + 2 < colon && toks[b + 2].is_op("(")) {
            const std::size_t close = matching_close(toks, b + 2, colon);
            std::size_t arg = b + 3;
            while (arg < close) {
                std::size_t arg_end = arg;
                int depth = 0;
                while (arg_end < close) {
                    if (is_open(toks[arg_end])) {
                        ++depth;
                    } else if (is_close(toks[arg_end])) {
                        --depth;
                    } else if (depth == 0 && toks[arg_end].is_op(",")) {
                        break;
                    }
                    ++arg_end;
                }
                bool dotted = arg < arg_end && is_ref_name(toks[arg]);
                for (std::size_t k = arg + 1; dotted && k < arg_end; ++k) {
                    dotted = ((k - arg) % 2 == 1) ? toks[k].is_op(".") : is_ref_name(toks[k]);
                }
                dotted = dotted && (arg_end - arg) % 2 == 1;
                if (dotted) {
                    BaseExpr base;
                    base.scope = scope;
                    base.tokens.assign(toks.begin() + static_cast<std::ptrdiff_t>(arg),
                                       toks.begin() + static_cast<std::ptrdiff_t>(arg_end));
                    info.bases.push_back(std::move(base));
                    for (std::size_t k = arg; k < arg_end; ++k) {
                        skip[k - b] = 1;
                    }
                }
                arg = arg_end + 1;
            }
        }
        add_stmt(scope, toks, b, colon, std::move(skip));
        m_.classes.push_back(std::move(info));

        if (colon + 1 < e) {
            handle_statement(toks, colon + 1, e, new_scope, indent + 1, false);
            set_end(ent, toks[e - 1]);
        } else if (block_ok) {
            stack_.push_back(new_scope);
        }
    }

    void handle_def(const Tokens& toks, std::size_t start, std::size_t kw, std::size_t e, int scope, int indent,
                    bool block_ok) {
        if (kw + 2 >= e || !is_ref_name(toks[kw + 1]) || !toks[kw + 2].is_op("(")) {
            diag(toks[kw], "malformed function header");
            return;
        }
        const std::size_t open = kw + 2;
        const std::size_t close = matching_close(toks, open, e);
        const std::size_t colon = find_block_colon(toks, close, e);
        if (close >= e || colon >= e) {
            diag(toks[kw], "function header without ':'");
            return;
        }
        const Token& name = toks[kw + 1];
        const int ent = add_entity(name.text, EntityKind::Function, toks[start], toks[colon]);
        Binding bnd;
        bnd.kind = Binding::Kind::Entity;
        bnd.entity = ent;
        bind(scope, name.text, bnd);
        m_.function_headers[ent] = span(toks[start], toks[colon]);

        Scope fn;
        fn.kind = Scope::Kind::Function;
        fn.entity = ent;
        fn.parent = scope;
        fn.header_indent = indent;
        m_.scopes.push_back(fn);
        const int new_scope = static_cast<int>(m_.scopes.size()) - 1;

        std::vector<char> skip(colon - start, 0);
        for (std::size_t k = start; k <= kw + 1; ++k) {
            skip[k - start] = 1;
        }
        // parameter names sit at the start of each depth-1 item, after optional '*' / '**'
        int depth = 0;
        bool at_param_start = false;
        for (std::size_t i = open; i < close; ++i) {
            const Token& t = toks[i];
            if (is_open(t)) {
                ++depth;
                at_param_start = depth == 1;
                continue;
            }
            if (is_close(t)) {
                --depth;
                continue;
            }
            if (depth == 1 && t.is_op(",")) {
                at_param_start = true;
                continue;
            }
            if (depth == 1 && at_param_start && (t.is_op("*") || t.is_op("**") || t.is_op("/"))) {
                continue;
            }
            if (depth == 1 && at_param_start && is_ref_name(t)) {
                bind_opaque(new_scope, t.text);
                skip[i - start] = 1;
            }
            at_param_start = false;
        }
        add_stmt(scope, toks, start, colon, std::move(skip));

        if (colon + 1 < e) {
            handle_statement(toks, colon + 1, e, new_scope, indent + 1, false);
            set_end(ent, toks[e - 1]);
        } else if (block_ok) {
            stack_.push_back(new_scope);
        }
    }

    // Reads NAME ('.' NAME)* starting at i; returns the dotted string and advances i.
    static std::string read_dotted(const Tokens& toks, std::size_t& i, std::size_t e) {
        std::string out;
        while (i < e && is_ref_name(toks[i])) {
            out += toks[i].text;
            if (i + 2 < e && toks[i + 1].is_op(".") && is_ref_name(toks[i + 2])) {
                out += '.';
                i += 2;
                continue;
            }
            ++i;
            break;
        }
        return out;
    }

    void handle_import(const Tokens& toks, std::size_t b, std::size_t e, int scope) {
        std::size_t i = b + 1;
        while (i < e) {
            const std::size_t first = i;
            const std::string dotted = read_dotted(toks, i, e);
            if (dotted.empty()) {
                diag(toks[std::min(i, e - 1)], "unsupported import syntax");
                return;
            }
            const std::size_t last = i - 1;
            std::string bound = dotted.substr(0, dotted.find('.'));
            std::string target = bound;
            if (i + 1 < e && toks[i].is_name("as") && is_ref_name(toks[i + 1])) {
                bound = toks[i + 1].text;
                target = dotted;
                i += 2;
            }
            Binding bnd;
            bnd.kind = Binding::Kind::ImportedModule;
            bnd.module = target;
            bind(scope, bound, bnd);
            if (scope == 0) {
                m_.imports.push_back({dotted, true, std::nullopt, span(toks[first], toks[last])});
            }
            if (i < e && toks[i].is_op(",")) {
                ++i;
            } else {
                break;
            }
        }
    }

    void handle_from(const Tokens& toks, std::size_t b, std::size_t e, int scope) {
        std::size_t i = b + 1;
        int level = 0;
        while (i < e && (toks[i].is_op(".") || toks[i].is_op("..."))) {
            level += static_cast<int>(toks[i].text.size());
            ++i;
        }
        std::string rel = read_dotted(toks, i, e);
        if (i >= e || !toks[i].is_name("import")) {
            diag(toks[b], "malformed from-import");
            return;
        }
        ++i;
        std::string module = rel;
        bool absolute = level == 0;
        if (level > 0) {
            if (static_cast<std::size_t>(level - 1) > m_.package_parts.size()) {
                diag(toks[b], "relative import beyond top-level package");
                return;
            }
            std::string base;
            for (std::size_t k = 0; k + (level - 1) < m_.package_parts.size(); ++k) {
                if (!base.empty()) {
                    base += '.';
                }
                base += m_.package_parts[k];
            }
            module = base.empty() ? rel : (rel.empty() ? base : base + "." + rel);
        }
        if (i < e && toks[i].is_op("*")) {
            diag(toks[i], "star import from '" + module + "' is not supported");
            return;
        }
        if (i < e && toks[i].is_op("(")) {
            ++i;
        }
        while (i < e) {
            if (toks[i].is_op(")")) {
                break;
            }
            if (!is_ref_name(toks[i])) {
                diag(toks[i], "unsupported import syntax");
                return;
            }
            const Token& name = toks[i];
            std::string bound = name.text;
            ++i;
            if (i + 1 < e && toks[i].is_name("as") && is_ref_name(toks[i + 1])) {
                bound = toks[i + 1].text;
                i += 2;
            }
            Binding bnd;
            bnd.kind = Binding::Kind::ImportedName;
            bnd.module = module;
            bnd.absolute = absolute;
            bnd.name = name.text;
            bind(scope, bound, bnd);
            if (scope == 0) {
                m_.imports.push_back({module, absolute, name.text, span(name, name)});
            }
            if (i < e && toks[i].is_op(",")) {
                ++i;
            }
        }
    }

    FileModel m_;
    std::vector<int> stack_;
};

struct EntityRef {
    int file = -1;
    int entity = -1;
    auto operator<=>(const EntityRef&) const = default;
};

struct Unresolved {};
struct OpaqueRef {};
struct ModuleRef {
    std::string dotted;
};
using Resolved = std::variant<Unresolved, OpaqueRef, EntityRef, ModuleRef>;

bool position_le(int l1, int c1, int l2, int c2) { return std::pair(l1, c1) <= std::pair(l2, c2); }

}  // namespace

struct FactExtractor::Impl {
    std::vector<SourceFile> files;
    std::vector<FileModel> models;
    std::map<std::string, int> module_index;
    std::set<std::string> package_prefixes;
    std::vector<std::vector<RelationFact>> relations;  // per file, by source file
    std::map<EntityRef, std::vector<EntityRef>> class_bases;

    void build() {
        std::sort(files.begin(), files.end(), [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
        for (std::size_t i = 1; i < files.size(); ++i) {
            if (files[i].path == files[i - 1].path) {
                throw DataError("duplicate source path: " + files[i].path);
            }
        }
        models.reserve(files.size());
        for (const auto& f : files) {
            models.push_back(ModelBuilder(f).build());
        }
        for (std::size_t i = 0; i < models.size(); ++i) {
            module_index.emplace(models[i].module, static_cast<int>(i));
            std::string prefix = models[i].module;
            while (true) {
                const auto dot = prefix.rfind('.');
                if (dot == std::string::npos) {
                    break;
                }
                prefix.resize(dot);
                package_prefixes.insert(prefix);
            }
        }
        relations.resize(models.size());
        for (std::size_t fi = 0; fi < models.size(); ++fi) {
            link_file(static_cast<int>(fi));
        }
        for (std::size_t fi = 0; fi < models.size(); ++fi) {
            link_class_hierarchy(static_cast<int>(fi));
        }
        for (auto& rels : relations) {
            std::sort(rels.begin(), rels.end(), [](const RelationFact& a, const RelationFact& b) {
                return std::tie(a.site, a.relation, a.source_id, a.target_id) <
                       std::tie(b.site, b.relation, b.source_id, b.target_id);
            });
        }
    }

    bool module_exists(const std::string& dotted) const {
        return module_index.count(dotted) > 0 || package_prefixes.count(dotted) > 0;
    }

    std::optional<std::string> locate_module(int fi, const std::string& dotted, bool absolute) const {
        if (module_exists(dotted)) {
            return dotted;
        }
        if (!absolute) {
            return std::nullopt;
        }
        // fall back to source roots below the repository root (e.g. "src/")
        const auto& parts = models[fi].package_parts;
        std::string prefix;
        for (const auto& part : parts) {
            prefix = prefix.empty() ? part : prefix + "." + part;
            const std::string candidate = prefix + "." + dotted;
            if (module_exists(candidate)) {
                return candidate;
            }
        }
        return std::nullopt;
    }

    Resolved module_ref(const std::string& dotted) const { return ModuleRef{dotted}; }

    Resolved member(const std::string& module, const std::string& name, int depth) const {
        if (depth > 16) {
            return Unresolved{};
        }
        auto it = module_index.find(module);
        if (it != module_index.end()) {
            const auto& bindings = models[it->second].scopes[0].bindings;
            auto b = bindings.find(name);
            if (b != bindings.end()) {
                return convert(it->second, b->second, depth + 1);
            }
        }
        const std::string sub = module.empty() ? name : module + "." + name;
        if (module_exists(sub)) {
            return ModuleRef{sub};
        }
        return Unresolved{};
    }

    Resolved convert(int fi, const Binding& b, int depth) const {
        switch (b.kind) {
            case Binding::Kind::Entity:
                return EntityRef{fi, b.entity};
            case Binding::Kind::Opaque:
                return OpaqueRef{};
            case Binding::Kind::ImportedModule: {
                auto loc = locate_module(fi, b.module, true);
                if (!loc) {
                    return OpaqueRef{};
                }
                return ModuleRef{*loc};
            }
            case Binding::Kind::ImportedName: {
                auto loc = locate_module(fi, b.module, b.absolute);
                if (!loc) {
                    return OpaqueRef{};
                }
                return member(*loc, b.name, depth);
            }
        }
        return Unresolved{};
    }

    Resolved resolve_name(int fi, int scope, const std::string& name) const {
        const auto& scopes = models[fi].scopes;
        bool innermost = true;
        for (int s = scope; s != -1; s = scopes[s].parent) {
            if (scopes[s].kind == Scope::Kind::Class && !innermost) {
                continue;
            }
            innermost = false;
            auto it = scopes[s].bindings.find(name);
            if (it != scopes[s].bindings.end()) {
                return convert(fi, it->second, 0);
            }
        }
        if (builtins().count(name)) {
            return OpaqueRef{};
        }
        return Unresolved{};
    }

    // Resolves NAME ('.' NAME)* beginning at toks[i]; returns the index of the last consumed token.
    std::size_t resolve_chain(int fi, int scope, const Tokens& toks, std::size_t i, Resolved& out) {
        out = resolve_name(fi, scope, toks[i].text);
        std::size_t j = i;
        while (std::holds_alternative<ModuleRef>(out) && j + 2 < toks.size() && toks[j + 1].is_op(".") &&
               is_ref_name(toks[j + 2])) {
            Resolved next = member(std::get<ModuleRef>(out).dotted, toks[j + 2].text, 0);
            if (std::holds_alternative<Unresolved>(next)) {
                auto& m = models[fi];
                m.diagnostics.push_back({m.file->path, toks[j + 2].line, toks[j + 2].col,
                                         "unresolved module attribute '" + std::get<ModuleRef>(out).dotted + "." +
                                             toks[j + 2].text + "'"});
                out = OpaqueRef{};
                return j + 2;
            }
            out = std::move(next);
            j += 2;
        }
        return j;
    }

    const EntityFact& entity(const EntityRef& r) const { return models[r.file].entities[r.entity]; }

    int innermost_at(int fi, int line, int col) const {
        const auto& ents = models[fi].entities;
        int best = 0;
        for (std::size_t k = 1; k < ents.size(); ++k) {
            const Location& l = ents[k].location;
            if (!position_le(l.start_line, l.start_col, line, col) || !position_le(line, col, l.end_line, l.end_col)) {
                continue;
            }
            const Location& bl = ents[best].location;
            const bool later_start = std::pair(l.start_line, l.start_col) > std::pair(bl.start_line, bl.start_col);
            const bool same_start = std::pair(l.start_line, l.start_col) == std::pair(bl.start_line, bl.start_col);
            const bool tighter = std::pair(l.end_line, l.end_col) < std::pair(bl.end_line, bl.end_col);
            if (best == 0 || later_start || (same_start && tighter)) {
                best = static_cast<int>(k);
            }
        }
        return best;
    }

    void emit(int fi, Relation rel, int source_entity, const EntityRef& target, const Location& site) {
        RelationFact r;
        r.relation = rel;
        r.source_id = models[fi].entities[source_entity].id();
        r.target_id = entity(target).id();
        r.site = site;
        relations[fi].push_back(std::move(r));
    }

    void link_file(int fi) {
        FileModel& m = models[fi];
        const int module_entity = 0;
        for (const auto& imp : m.imports) {
            std::optional<std::string> loc = locate_module(fi, imp.module, imp.absolute);
            if (!loc) {
                m.diagnostics.push_back({m.file->path, imp.site.start_line, imp.site.start_col,
                                         "unresolved import '" + imp.module + "'"});
                continue;
            }
            Resolved target = imp.member ? member(*loc, *imp.member, 0) : module_ref(*loc);
            if (auto* mod = std::get_if<ModuleRef>(&target)) {
                auto it = module_index.find(mod->dotted);
                if (it == module_index.end()) {
                    continue;  // namespace package without an __init__.py
                }
                target = EntityRef{it->second, 0};
            }
            if (auto* ref = std::get_if<EntityRef>(&target)) {
                emit(fi, Relation::Imports, module_entity, *ref, imp.site);
            } else if (std::holds_alternative<Unresolved>(target)) {
                m.diagnostics.push_back({m.file->path, imp.site.start_line, imp.site.start_col,
                                         "cannot resolve '" + imp.member.value_or("") + "' in module '" + *loc + "'"});
            }
        }
        for (const Stmt& stmt : m.stmts) {
            scan_stmt(fi, stmt);
        }
        for (const ClassInfo& ci : m.classes) {
            for (const BaseExpr& base : ci.bases) {
                Resolved r;
                const std::size_t last = resolve_chain(fi, base.scope, base.tokens, 0, r);
                const Location site{m.file->path, base.tokens.front().line, base.tokens.front().col,
                                    base.tokens[last].end_line, base.tokens[last].end_col};
                if (auto* ref = std::get_if<EntityRef>(&r); ref && entity(*ref).kind == EntityKind::Class) {
                    emit(fi, Relation::BaseClassOf, ci.entity, *ref, site);
                    class_bases[EntityRef{fi, ci.entity}].push_back(*ref);
                } else if (std::holds_alternative<Unresolved>(r)) {
                    m.diagnostics.push_back(
                        {m.file->path, site.start_line, site.start_col, "unresolved base class '" +
                                                                            base.tokens.front().text + "'"});
                }
            }
        }
    }

    void scan_stmt(int fi, const Stmt& stmt) {
        FileModel& m = models[fi];
        const Tokens& toks = stmt.tokens;
        // comprehension targets and lambda parameters are local to the statement
        std::set<std::string> locals;
        std::vector<char> local_pos(toks.size(), 0);
        {
            int depth = 0;
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (is_open(toks[i])) {
                    ++depth;
                } else if (is_close(toks[i])) {
                    --depth;
                } else if (toks[i].is_name("for") && depth > 0) {
                    for (std::size_t k = i + 1; k < toks.size() && !toks[k].is_name("in"); ++k) {
                        if (is_ref_name(toks[k])) {
                            locals.insert(toks[k].text);
                            local_pos[k] = 1;
                        }
                    }
                } else if (toks[i].is_name("lambda")) {
                    for (std::size_t k = i + 1; k < toks.size() && !toks[k].is_op(":"); ++k) {
                        if (is_ref_name(toks[k]) && (toks[k - 1].is_name("lambda") || toks[k - 1].is_op(",") ||
                                                     toks[k - 1].is_op("*") || toks[k - 1].is_op("**"))) {
                            locals.insert(toks[k].text);
                            local_pos[k] = 1;
                        }
                    }
                }
            }
        }
        std::vector<char> brackets;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (is_open(t)) {
                brackets.push_back(t.text[0]);
                continue;
            }
            if (is_close(t)) {
                if (!brackets.empty()) {
                    brackets.pop_back();
                }
                continue;
            }
            if (!is_ref_name(t) || stmt.skip[i] || local_pos[i] || locals.count(t.text)) {
                continue;
            }
            if (i > 0 && toks[i - 1].is_op(".")) {
                continue;
            }
            if (i + 1 < toks.size() && toks[i + 1].is_op("=") && !brackets.empty() && brackets.back() == '(') {
                continue;  // keyword argument
            }
            Resolved r;
            const std::size_t j = resolve_chain(fi, stmt.scope, toks, i, r);
            if (std::holds_alternative<Unresolved>(r)) {
                m.diagnostics.push_back({m.file->path, t.line, t.col, "unresolved name '" + t.text + "'"});
            } else if (auto* ref = std::get_if<EntityRef>(&r)) {
                const EntityKind kind = entity(*ref).kind;
                const bool call = j + 1 < toks.size() && toks[j + 1].is_op("(");
                std::optional<Relation> rel;
                if (kind == EntityKind::Class) {
                    rel = call ? Relation::Instantiates : Relation::Uses;
                } else if (kind == EntityKind::Function) {
                    rel = call ? Relation::Calls : Relation::Uses;
                } else if (kind == EntityKind::Variable) {
                    rel = Relation::Uses;
                }
                if (rel) {
                    const Location site{m.file->path, t.line, t.col, toks[j].end_line, toks[j].end_col};
                    emit(fi, *rel, innermost_at(fi, t.line, t.col), *ref, site);
                }
            }
            i = j;
        }
    }

    std::optional<EntityRef> class_member(const EntityRef& cls, const std::string& name) const {
        const FileModel& m = models[cls.file];
        for (const ClassInfo& ci : m.classes) {
            if (ci.entity != cls.entity) {
                continue;
            }
            auto it = m.scopes[ci.scope].bindings.find(name);
            if (it != m.scopes[ci.scope].bindings.end() && it->second.kind == Binding::Kind::Entity &&
                m.entities[it->second.entity].kind == EntityKind::Function) {
                return EntityRef{cls.file, it->second.entity};
            }
        }
        return std::nullopt;
    }

    // Depth-first over resolved bases, left to right.
    std::optional<EntityRef> inherited_member(const EntityRef& cls, const std::string& name,
                                              std::set<EntityRef>& seen) const {
        auto it = class_bases.find(cls);
        if (it == class_bases.end()) {
            return std::nullopt;
        }
        for (const EntityRef& base : it->second) {
            if (!seen.insert(base).second) {
                continue;
            }
            if (auto found = class_member(base, name)) {
                return found;
            }
            if (auto found = inherited_member(base, name, seen)) {
                return found;
            }
        }
        return std::nullopt;
    }

    void link_class_hierarchy(int fi) {
        const FileModel& m = models[fi];
        for (const ClassInfo& ci : m.classes) {
            const EntityRef self{fi, ci.entity};
            for (const auto& [name, binding] : m.scopes[ci.scope].bindings) {
                if (binding.kind != Binding::Kind::Entity ||
                    m.entities[binding.entity].kind != EntityKind::Function) {
                    continue;
                }
                std::set<EntityRef> seen{self};
                if (auto base_method = inherited_member(self, name, seen)) {
                    emit(fi, Relation::Overrides, binding.entity, *base_method, m.function_headers.at(binding.entity));
                }
            }
            std::optional<EntityRef> ctor = class_member(self, "__init__");
            if (!ctor) {
                std::set<EntityRef> seen{self};
                ctor = inherited_member(self, "__init__", seen);
            }
            if (ctor) {
                emit(fi, Relation::Construct, ci.entity, *ctor, ci.header);
            }
        }
    }

    FactSet facts_for(int fi) const {
        FactSet out;
        const FileModel& m = models[fi];
        out.entities = m.entities;
        std::stable_sort(out.entities.begin() + 1, out.entities.end(), [](const EntityFact& a, const EntityFact& b) {
            return std::pair(a.location.start_line, a.location.start_col) <
                   std::pair(b.location.start_line, b.location.start_col);
        });
        out.relations = relations[fi];
        out.diagnostics = m.diagnostics;
        std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return std::pair(a.line, a.col) < std::pair(b.line, b.col);
        });
        return out;
    }
};

FactExtractor::FactExtractor(std::vector<SourceFile> files) : impl_(std::make_unique<Impl>()) {
    impl_->files = std::move(files);
    impl_->build();
}

FactExtractor::~FactExtractor() = default;
FactExtractor::FactExtractor(FactExtractor&&) noexcept = default;
FactExtractor& FactExtractor::operator=(FactExtractor&&) noexcept = default;

FactSet FactExtractor::extract_facts(std::string_view path) const {
    for (std::size_t i = 0; i < impl_->files.size(); ++i) {
        if (impl_->files[i].path == path) {
            return impl_->facts_for(static_cast<int>(i));
        }
    }
    throw ParameterError("file not part of the analyzed snapshot: " + std::string(path));
}

FactSet FactExtractor::extract_all() const {
    FactSet out;
    for (std::size_t i = 0; i < impl_->files.size(); ++i) {
        FactSet f = impl_->facts_for(static_cast<int>(i));
        std::move(f.entities.begin(), f.entities.end(), std::back_inserter(out.entities));
        std::move(f.relations.begin(), f.relations.end(), std::back_inserter(out.relations));
        std::move(f.diagnostics.begin(), f.diagnostics.end(), std::back_inserter(out.diagnostics));
    }
    return out;
}

const std::vector<SourceFile>& FactExtractor::files() const { return impl_->files; }

FactSet extract_facts(const SourceFile& file) { return FactExtractor({file}).extract_facts(file.path); }

}  // namespace dualctx
