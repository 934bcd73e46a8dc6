#include <catch_amalgamated.hpp>

#include <set>

#include "dualctx/error.hpp"
#include "dualctx/rationale.hpp"
#include "support.hpp"

using namespace dualctx;

namespace {

CodeKnowledgeGraph graph_of(const std::vector<SourceFile>& files) {
    const FactSet f = FactExtractor(files).extract_all();
    return build_graph(f.entities, f.relations);
}

CodeKnowledgeGraph fixture_graph(const std::string& name) {
    return graph_of(scan_repo(testsupport::fixture(name), {"*.py"}).files);
}

std::set<std::string> names(const std::vector<RationaleItem>& items) {
    std::set<std::string> out;
    for (const auto& it : items) {
        out.insert(it.origin_id.substr(0, it.origin_id.find(':')));
    }
    return out;
}

std::set<std::string> all_ids(const RationaleContext& ctx) {
    std::set<std::string> out;
    for (const auto* bucket : {&ctx.methods, &ctx.classes, &ctx.packages}) {
        for (const auto& it : *bucket) {
            out.insert(it.origin_id);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("worked example: two imported classes and one imported function") {
    const auto g = fixture_graph("worked_repo");
    const auto ctx = retrieve_rationale(g, "app/handlers.py", 10);
    CHECK(names(ctx.methods) == std::set<std::string>{"validate_user"});
    CHECK(names(ctx.classes) == std::set<std::string>{"UserService", "UidTok"});
    CHECK(ctx.packages.empty());
    // Functions contribute their full text, classes a signature.
    CHECK(ctx.methods[0].text.find("return \"disabled\" not in flags") != std::string::npos);
    for (const auto& c : ctx.classes) {
        CHECK(c.text.find("return") == std::string::npos);
    }
}

TEST_CASE("edges at or after the cursor are excluded") {
    const auto g = fixture_graph("sample_repo");
    CHECK(retrieve_rationale(g, "module_b.py", 1).size() == 0);
    const auto ctx = retrieve_rationale(g, "module_b.py", 2);
    CHECK(names(ctx.classes) == std::set<std::string>{"ClassX"});
}

TEST_CASE("out-nodes in the edited file are excluded") {
    const auto g = fixture_graph("sample_repo");
    // function_F instantiates ClassX and uses variable_V, all in module_a.py.
    CHECK(retrieve_rationale(g, "module_a.py", 13).size() == 0);
}

TEST_CASE("an out-node reached by several edges appears once at its earliest site") {
    const auto g = graph_of({
        SourceFile::from_text("lib.py", "def helper(x):\n    return x\n"),
        SourceFile::from_text("app.py",
                              "from lib import helper\n\n\ndef run():\n    a = helper(1)\n    b = helper(2)\n"
                              "    return a + b\n"),
    });
    const auto ctx = retrieve_rationale(g, "app.py", 7);
    REQUIRE(ctx.methods.size() == 1);
    CHECK(ctx.methods[0].site.start_line == 1);
    CHECK(ctx.methods[0].relation == Relation::Imports);
    CHECK(ctx.methods[0].text == "def helper(x):\n    return x");
}

TEST_CASE("calls through a module import reach the function") {
    const auto g = graph_of({
        SourceFile::from_text("lib.py", "LIMIT = 3\n\n\ndef helper(x):\n    return x + LIMIT\n"),
        SourceFile::from_text("app.py", "import lib\n\n\ndef run():\n    return lib.helper(lib.LIMIT)\n"),
    });
    const auto ctx = retrieve_rationale(g, "app.py", 6);
    CHECK(names(ctx.methods) == std::set<std::string>{"helper"});
    CHECK(names(ctx.packages) == std::set<std::string>{"lib", "LIMIT"});
}

TEST_CASE("overridden base methods are part of the scope") {
    const auto g = fixture_graph("sweep_repo");
    const auto inner = retrieve_rationale(g, "shop/billing/tax.py", 13, RationaleScope::Innermost);
    CHECK(names(inner.methods).count("apply") == 1);
    // Moving past the overriding method drops the edge under the innermost scope
    // but keeps it under the prefix scope.
    const auto later_inner = retrieve_rationale(g, "shop/billing/tax.py", 17, RationaleScope::Innermost);
    CHECK(names(later_inner.methods).count("apply") == 0);
    const auto later_prefix = retrieve_rationale(g, "shop/billing/tax.py", 17, RationaleScope::Prefix);
    CHECK(names(later_prefix.methods).count("apply") == 1);
}

TEST_CASE("items are cross-file, before the cursor, and present in the graph") {
    const auto g = fixture_graph("sweep_repo");
    for (const auto& path : g.paths()) {
        const int n = module_node(g, path).location.end_line;
        for (int line = 1; line <= n; ++line) {
            const auto ctx = retrieve_rationale(g, path, line);
            for (const auto* bucket : {&ctx.methods, &ctx.classes, &ctx.packages}) {
                for (const auto& it : *bucket) {
                    REQUIRE(g.find(it.origin_id) != nullptr);
                    CHECK(it.origin_path != path);
                    CHECK(it.site.start_line < line);
                }
            }
        }
    }
}

TEST_CASE("prefix scope is monotone in the cursor line") {
    for (const char* fx : {"sample_repo", "worked_repo", "sweep_repo"}) {
        const auto g = fixture_graph(fx);
        for (const auto& path : g.paths()) {
            const int n = module_node(g, path).location.end_line;
            std::set<std::string> prev;
            for (int line = 1; line <= n + 1; ++line) {
                const auto cur = all_ids(retrieve_rationale(g, path, line));
                CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
                prev = cur;
            }
        }
    }
}

TEST_CASE("signature_of by node kind") {
    const auto g = fixture_graph("sample_repo");
    const Node& cls = innermost_enclosing(g, "module_a.py", 5);
    CHECK(signature_of(cls, g) == "class ClassX:\n    scale = 2\n    def compute(self, value):");
    const Node& fn = innermost_enclosing(g, "module_a.py", 12);
    CHECK(signature_of(fn, g) == "def function_F():");
    const Node& var = innermost_enclosing(g, "module_a.py", 1);
    CHECK(signature_of(var, g) == "variable_V = 10");
    CHECK(signature_of(module_node(g, "module_a.py"), g) ==
          "class ClassX:\n    scale = 2\n    def compute(self, value):\ndef function_F():");
}

TEST_CASE("class signatures keep multi-line headers and skip bodies") {
    const auto g = graph_of({SourceFile::from_text(
        "m.py",
        "class Box(object):\n    \"\"\"Doc.\"\"\"\n    size: int = 0\n\n    @property\n    def area(self,\n"
        "             unit=1):\n        return self.size * unit\n\n    class Inner:\n        pass\n"
        "    async def load(self):\n        pass\n")});
    const Node& cls = innermost_enclosing(g, "m.py", 2);
    REQUIRE(cls.name == "Box");
    CHECK(signature_of(cls, g) ==
          "class Box(object):\n    size: int = 0\n    def area(self,\n             unit=1):\n"
          "    class Inner:\n    async def load(self):");
}

TEST_CASE("an unindexed path is an error") {
    const auto g = fixture_graph("sample_repo");
    CHECK_THROWS_AS(retrieve_rationale(g, "missing.py", 1), ParameterError);
}
