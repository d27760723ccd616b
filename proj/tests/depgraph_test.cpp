#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "tom/depgraph.hpp"
#include "tom/parser.hpp"

#include "test_util.hpp"

using namespace tom;
using tom::test::fixture_version;
using tom::test::parse_or_die;

namespace {

bool has_edge(const DependencyGraph& g, const EntityId& from, const EntityId& to, EdgeKind kind) {
    return g.edges.count({from, to, kind}) > 0;
}

} // namespace

TEST_CASE("fig2 class: setters write, getSum reads, no calls") {
    auto prog = fixture_version("fig2/base");
    DependencyGraph g = extract_dependencies(*prog);

    EntityId x = EntityId::field("C", "x");
    EntityId y = EntityId::field("C", "y");
    EntityId setX = EntityId::method("C", "setX", 1);
    EntityId setY = EntityId::method("C", "setY", 1);
    EntityId getSum = EntityId::method("C", "getSum", 0);

    CHECK(g.nodes == std::set<EntityId>{x, y, setX, setY, getSum});
    CHECK(has_edge(g, setX, x, EdgeKind::writes));
    CHECK(has_edge(g, setY, y, EdgeKind::writes));
    CHECK(has_edge(g, getSum, x, EdgeKind::reads));
    CHECK(has_edge(g, getSum, y, EdgeKind::reads));
    for (const auto& e : g.edges) CHECK(e.kind != EdgeKind::calls);
}

TEST_CASE("method call produces a calls edge") {
    auto prog = parse_or_die(
        "class C { fn m1(): int { return 1; } fn m2(): int { return this.m1(); } }");
    DependencyGraph g = extract_dependencies(*prog);
    CHECK(has_edge(g, EntityId::method("C", "m2", 0), EntityId::method("C", "m1", 0),
                   EdgeKind::calls));
}

TEST_CASE("empty class yields an empty graph") {
    auto prog = parse_or_die("class C { }");
    DependencyGraph g = extract_dependencies(*prog);
    CHECK(g.nodes.empty());
    CHECK(g.edges.empty());
}

TEST_CASE("constructor assignments are defines edges, new is a calls edge") {
    auto prog = parse_or_die(R"(
class C {
    var f: int = 0;
    init(v: int) {
        this.f = v;
    }
    fn reader(): int {
        return this.f;
    }
}
fn make(): int {
    var c: C = new C(3);
    return c.reader();
}
)");
    DependencyGraph g = extract_dependencies(*prog);
    EntityId ctor = EntityId::ctor("C", 1);
    EntityId f = EntityId::field("C", "f");
    CHECK(has_edge(g, ctor, f, EdgeKind::defines));
    CHECK_FALSE(has_edge(g, ctor, f, EdgeKind::writes));
    CHECK(has_edge(g, EntityId::function("make", 0), ctor, EdgeKind::calls));
    CHECK(has_edge(g, EntityId::function("make", 0), EntityId::method("C", "reader", 0),
                   EdgeKind::calls));

    SUBCASE("defines edges run only constructor -> field") {
        for (const auto& e : g.edges) {
            if (e.kind == EdgeKind::defines) {
                CHECK(e.from.kind == EntityKind::constructor);
                CHECK(e.to.kind == EntityKind::field);
            }
        }
    }

    SUBCASE("get_impacted on the constructor includes its defined fields and callers") {
        std::set<EntityId> impacted = get_impacted(g, ctor);
        CHECK(impacted == std::set<EntityId>{f, EntityId::function("make", 0)});
    }
}

TEST_CASE("get_impacted examples") {
    auto prog = fixture_version("fig2/base");
    DependencyGraph g = extract_dependencies(*prog);

    SUBCASE("field x is impacted by its writer and reader") {
        CHECK(get_impacted(g, EntityId::field("C", "x")) ==
              std::set<EntityId>{EntityId::method("C", "setX", 1),
                                 EntityId::method("C", "getSum", 0)});
    }
    SUBCASE("a method with no callers has no reverse dependents") {
        CHECK(get_impacted(g, EntityId::method("C", "getSum", 0)).empty());
    }
    SUBCASE("unknown entity yields the empty set") {
        CHECK(get_impacted(g, EntityId::method("C", "nothere", 0)).empty());
    }
}

TEST_CASE("get_impacted agrees with a raw edge scan on fixtures") {
    for (const char* path : {"fig2/merge", "income/merge", "account/buggy"}) {
        auto prog = fixture_version(path);
        DependencyGraph g = extract_dependencies(*prog);
        for (const auto& node : g.nodes) {
            std::set<EntityId> expected;
            for (const auto& e : g.edges) {
                if (e.to == node && (e.kind == EdgeKind::calls || e.kind == EdgeKind::reads ||
                                     e.kind == EdgeKind::writes))
                    expected.insert(e.from);
                if (node.kind == EntityKind::constructor && e.from == node &&
                    e.kind == EdgeKind::defines)
                    expected.insert(e.to);
            }
            CHECK(get_impacted(g, node) == expected);
        }
    }
}

TEST_CASE("extraction is insensitive to file ordering") {
    std::string file_a = "class A { var v: int = 0; fn m(): int { return this.v; } }";
    std::string file_b = "fn top(): int { var a: A = new A(); return a.m(); }";
    auto p1 = parse_program({{"a.mlg", file_a}, {"b.mlg", file_b}});
    auto p2 = parse_program({{"b.mlg", file_b}, {"a.mlg", file_a}});
    REQUIRE(p1.ok());
    REQUIRE(p2.ok());
    DependencyGraph g1 = extract_dependencies(*p1.program);
    DependencyGraph g2 = extract_dependencies(*p2.program);
    CHECK(g1.nodes == g2.nodes);
    CHECK(g1.edges == g2.edges);
}

TEST_CASE("every calls edge has a syntactic call site") {
    auto prog = fixture_version("account/buggy");
    DependencyGraph g = extract_dependencies(*prog);
    for (const auto& e : g.edges) {
        if (e.kind != EdgeKind::calls) continue;
        const Span* span = entity_span(*prog, e.from);
        REQUIRE(span != nullptr);
        // the callee's name must occur inside the caller's source extent
        const SourceFile* file = prog->find_file(span->file);
        REQUIRE(file != nullptr);
        std::string body = file->text.substr(span->begin, span->end - span->begin);
        CHECK(body.find(e.to.name) != std::string::npos);
    }
}

TEST_CASE("graph dumps") {
    auto prog = parse_or_die("class C { var x: int = 0; fn m(): int { return this.x; } }");
    DependencyGraph g = extract_dependencies(*prog);
    std::string dot = graph_to_dot(g);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("\"C.m\" -> \"C.x\"") != std::string::npos);
    std::string json = graph_to_json(g);
    CHECK(json.find("\"C/method/m/0\"") != std::string::npos);
    CHECK(json.find("reads") != std::string::npos);
}
