#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "tom/uut_select.hpp"

#include "test_util.hpp"

using namespace tom;
using tom::test::fixture_version;
using tom::test::parse_or_die;

namespace {

DependencyGraph graph_of(std::set<EntityId> nodes, std::set<DepEdge> edges) {
    DependencyGraph g;
    g.nodes = std::move(nodes);
    g.edges = std::move(edges);
    return g;
}

// ---- independent oracle -------------------------------------------------
// Materializes full reachability sets by repeated whole-set expansion: R_0 =
// seeds, R_k = R_{k-1} union expand(R_{k-1}). No frontier bookkeeping shared
// with the implementation.

std::set<EntityId> oracle_expand(const DependencyGraph& g, const std::set<EntityId>& from) {
    std::set<EntityId> out = from;
    for (const auto& e : g.edges) {
        if (from.count(e.to) &&
            (e.kind == EdgeKind::calls || e.kind == EdgeKind::reads || e.kind == EdgeKind::writes))
            out.insert(e.from);
        if (from.count(e.from) && e.kind == EdgeKind::defines &&
            e.from.kind == EntityKind::constructor)
            out.insert(e.to);
        if (from.count(e.from) && e.kind == EdgeKind::writes && e.from.kind == EntityKind::method)
            out.insert(e.to);
    }
    return out;
}

std::vector<std::set<EntityId>> oracle_layers(const DependencyGraph& g,
                                              const std::set<EntityId>& seeds, int depth) {
    std::vector<std::set<EntityId>> reach{seeds};
    for (int d = 1; d <= depth; ++d) reach.push_back(oracle_expand(g, reach.back()));
    return reach;
}

int oracle_first_depth(const std::vector<std::set<EntityId>>& reach, const EntityId& id) {
    for (std::size_t d = 0; d < reach.size(); ++d)
        if (reach[d].count(id)) return static_cast<int>(d);
    return -1;
}

struct OracleSelection {
    std::vector<std::pair<EntityId, int>> uuts;
    bool fallback_used = false;
};

OracleSelection oracle_select(const DependencyGraph& g,
                              const std::vector<std::set<EntityId>>& seed_sets, int d, int n) {
    OracleSelection out;
    bool any = false;
    for (const auto& s : seed_sets) any = any || !s.empty();
    if (!any) return out;

    std::vector<std::vector<std::set<EntityId>>> reach;
    for (const auto& seeds : seed_sets) reach.push_back(oracle_layers(g, seeds, d));

    auto intersection_at = [&](int depth) {
        std::vector<std::pair<EntityId, int>> inter;
        for (const auto& id : g.nodes) {
            if (!id.callable()) continue;
            bool everywhere = true;
            int min_depth = depth + 1;
            for (const auto& layers : reach) {
                if (!layers[static_cast<std::size_t>(depth)].count(id)) {
                    everywhere = false;
                    break;
                }
                min_depth = std::min(min_depth, oracle_first_depth(layers, id));
            }
            if (everywhere) inter.emplace_back(id, min_depth);
        }
        // also consider seed entities that are not graph nodes (none in our
        // generators, but keep the scan honest)
        std::sort(inter.begin(), inter.end(), [](const auto& x, const auto& y) {
            if (x.second != y.second) return x.second < y.second;
            return x.first < y.first;
        });
        return inter;
    };

    std::vector<std::pair<EntityId, int>> uuts;
    for (int depth = 1; depth <= d; ++depth) {
        uuts = intersection_at(depth);
        if (static_cast<int>(uuts.size()) > n) {
            uuts.resize(static_cast<std::size_t>(n));
            out.uuts = std::move(uuts);
            return out;
        }
    }
    if (!uuts.empty()) {
        out.uuts = std::move(uuts);
        return out;
    }
    out.fallback_used = true;
    std::set<EntityId> fallback;
    for (const auto& seeds : seed_sets)
        for (const auto& id : seeds)
            if (id.callable()) fallback.insert(id);
    for (const auto& id : fallback) {
        if (static_cast<int>(out.uuts.size()) >= n) break;
        out.uuts.emplace_back(id, 0);
    }
    return out;
}

void check_against_oracle(const DependencyGraph& g,
                          const std::vector<std::set<EntityId>>& seed_sets,
                          const SelectionConfig& config) {
    UutSelection got = select_uuts_on_graph(g, seed_sets, config);
    OracleSelection expected = oracle_select(g, seed_sets, config.max_depth, config.max_uuts);
    CHECK(got.fallback_used == expected.fallback_used);
    REQUIRE(got.uuts.size() == expected.uuts.size());
    for (std::size_t i = 0; i < got.uuts.size(); ++i) {
        CHECK(got.uuts[i].entity == expected.uuts[i].first);
        CHECK(got.uuts[i].min_depth == expected.uuts[i].second);
    }
}

// ---- random graph generator ---------------------------------------------

struct RandomGraph {
    DependencyGraph graph;
    std::vector<EntityId> nodes;
};

RandomGraph random_graph(std::mt19937_64& rng) {
    RandomGraph out;
    int classes = 1 + static_cast<int>(rng() % 3);
    std::vector<EntityId> callables, fields;
    for (int c = 0; c < classes; ++c) {
        std::string cls = "C" + std::to_string(c);
        int nfields = static_cast<int>(rng() % 4);
        for (int f = 0; f < nfields; ++f) fields.push_back(EntityId::field(cls, "f" + std::to_string(f)));
        if (rng() % 2) callables.push_back(EntityId::ctor(cls, static_cast<int>(rng() % 3)));
        int nmethods = 1 + static_cast<int>(rng() % 5);
        for (int m = 0; m < nmethods; ++m)
            callables.push_back(EntityId::method(cls, "m" + std::to_string(m), static_cast<int>(rng() % 2)));
    }
    int nfuncs = static_cast<int>(rng() % 3);
    for (int f = 0; f < nfuncs; ++f)
        callables.push_back(EntityId::function("g" + std::to_string(f), static_cast<int>(rng() % 2)));

    for (const auto& id : callables) out.graph.nodes.insert(id);
    for (const auto& id : fields) out.graph.nodes.insert(id);
    out.nodes.assign(out.graph.nodes.begin(), out.graph.nodes.end());

    int edges = static_cast<int>(rng() % 61);
    for (int e = 0; e < edges && !callables.empty(); ++e) {
        const EntityId& from = callables[rng() % callables.size()];
        switch (rng() % 4) {
            case 0: { // calls
                const EntityId& to = callables[rng() % callables.size()];
                out.graph.edges.insert({from, to, EdgeKind::calls});
                break;
            }
            case 1: { // reads
                if (fields.empty()) break;
                out.graph.edges.insert({from, fields[rng() % fields.size()], EdgeKind::reads});
                break;
            }
            case 2: { // writes, from methods/functions only
                if (fields.empty() || from.kind != EntityKind::method) break;
                out.graph.edges.insert({from, fields[rng() % fields.size()], EdgeKind::writes});
                break;
            }
            default: { // defines, constructor -> own-class field
                if (from.kind != EntityKind::constructor) break;
                std::vector<EntityId> own;
                for (const auto& f : fields)
                    if (f.class_name == from.class_name) own.push_back(f);
                if (own.empty()) break;
                out.graph.edges.insert({from, own[rng() % own.size()], EdgeKind::defines});
                break;
            }
        }
    }
    return out;
}

std::set<EntityId> random_seed_set(std::mt19937_64& rng, const std::vector<EntityId>& nodes) {
    std::set<EntityId> seeds;
    if (nodes.empty()) return seeds;
    int count = static_cast<int>(rng() % 4); // occasionally empty
    for (int i = 0; i < count; ++i) seeds.insert(nodes[rng() % nodes.size()]);
    return seeds;
}

} // namespace

TEST_CASE("impacted_closure on a linear call chain") {
    EntityId m1 = EntityId::method("C", "m1", 0);
    EntityId m2 = EntityId::method("C", "m2", 0);
    EntityId m3 = EntityId::method("C", "m3", 0);
    DependencyGraph g = graph_of({m1, m2, m3},
                                 {{m3, m2, EdgeKind::calls}, {m2, m1, EdgeKind::calls}});
    ImpactedSet set = impacted_closure(g, {m1}, 2);
    REQUIRE(set.entries.size() == 3);
    CHECK(set.entries.at(m1) == 0);
    CHECK(set.entries.at(m2) == 1);
    CHECK(set.entries.at(m3) == 2);
}

TEST_CASE("impacted_closure at depth 0 is exactly the seeds") {
    EntityId m1 = EntityId::method("C", "m1", 0);
    EntityId m2 = EntityId::method("C", "m2", 0);
    DependencyGraph g = graph_of({m1, m2}, {{m2, m1, EdgeKind::calls}});
    ImpactedSet set = impacted_closure(g, {m1}, 0);
    CHECK(set.entries == std::map<EntityId, int>{{m1, 0}});
}

TEST_CASE("impacted_closure on a diamond records first-reached depths") {
    EntityId m1 = EntityId::method("C", "m1", 0);
    EntityId m2 = EntityId::method("C", "m2", 0);
    EntityId m3 = EntityId::method("C", "m3", 0);
    EntityId m4 = EntityId::method("C", "m4", 0);
    DependencyGraph g = graph_of({m1, m2, m3, m4}, {{m2, m1, EdgeKind::calls},
                                                    {m3, m1, EdgeKind::calls},
                                                    {m4, m2, EdgeKind::calls},
                                                    {m4, m3, EdgeKind::calls}});
    ImpactedSet set = impacted_closure(g, {m1}, 2);
    CHECK(set.entries ==
          std::map<EntityId, int>{{m1, 0}, {m2, 1}, {m3, 1}, {m4, 2}});
}

TEST_CASE("impacted_closure is monotone in depth") {
    std::mt19937_64 rng(5150);
    for (int k = 0; k < 30; ++k) {
        RandomGraph rg = random_graph(rng);
        std::set<EntityId> seeds = random_seed_set(rng, rg.nodes);
        for (int d = 0; d < 4; ++d) {
            ImpactedSet smaller = impacted_closure(rg.graph, seeds, d);
            ImpactedSet larger = impacted_closure(rg.graph, seeds, d + 1);
            for (const auto& [id, depth] : smaller.entries) {
                REQUIRE(larger.entries.count(id) == 1);
                CHECK(larger.entries.at(id) == depth);
            }
        }
    }
}

TEST_CASE("fig2 selection: intersection through written fields is getSum") {
    auto base = fixture_version("fig2/base");
    auto alpha = fixture_version("fig2/alpha");
    auto beta = fixture_version("fig2/beta");
    auto merge = fixture_version("fig2/merge");
    UutSelection sel = select_uuts(*merge, {base, alpha, beta}, {});
    CHECK_FALSE(sel.fallback_used);
    REQUIRE(sel.uuts.size() == 1);
    CHECK(sel.uuts[0].entity == EntityId::method("C", "getSum", 0));
    CHECK(sel.uuts[0].min_depth == 2);
}

TEST_CASE("no changes anywhere: empty selection without fallback") {
    auto base = fixture_version("fig2/base");
    UutSelection sel = select_uuts(*base, {base, base}, {});
    CHECK(sel.uuts.empty());
    CHECK_FALSE(sel.fallback_used);
}

TEST_CASE("constructor chain example: ctor defines f, m1 reads f, m2 calls m1") {
    const char* common = R"(
class C {
    var f: int = 0;
    init(v: int) {
        %INIT%
    }
    fn m1(): int {
        %M1%
    }
    fn m2(): int {
        return this.m1() * 2;
    }
}
)";
    auto instantiate = [&](const std::string& init_body, const std::string& m1_body) {
        std::string text = common;
        text.replace(text.find("%INIT%"), 6, init_body);
        text.replace(text.find("%M1%"), 4, m1_body);
        return parse_or_die(text);
    };
    auto target = instantiate("this.f = v;", "return this.f;");
    auto variant_a = instantiate("this.f = v + 1;", "return this.f;"); // ctor changed
    auto variant_b = instantiate("this.f = v;", "return this.f + 1;"); // m1 changed

    SelectionConfig config;
    config.max_depth = 3;
    config.max_uuts = 3;
    UutSelection sel = select_uuts(*target, {variant_a, variant_b}, config);
    CHECK_FALSE(sel.fallback_used);
    REQUIRE(sel.uuts.size() == 2);
    CHECK(sel.uuts[0].entity == EntityId::method("C", "m1", 0));
    CHECK(sel.uuts[1].entity == EntityId::method("C", "m2", 0));
}

TEST_CASE("selection is invariant under permutation of the variants") {
    auto base = fixture_version("fig2/base");
    auto alpha = fixture_version("fig2/alpha");
    auto beta = fixture_version("fig2/beta");
    auto merge = fixture_version("fig2/merge");
    std::vector<ProgramPtr> variants{base, alpha, beta};
    std::sort(variants.begin(), variants.end());
    UutSelection reference = select_uuts(*merge, variants, {});
    do {
        UutSelection sel = select_uuts(*merge, variants, {});
        CHECK(sel.fallback_used == reference.fallback_used);
        CHECK(sel.uuts == reference.uuts);
    } while (std::next_permutation(variants.begin(), variants.end()));
}

TEST_CASE("fallback returns the callable changed entities when nothing intersects") {
    EntityId a = EntityId::method("C", "a", 0);
    EntityId b = EntityId::method("C", "b", 0);
    DependencyGraph g = graph_of({a, b}, {});
    UutSelection sel = select_uuts_on_graph(g, {{a}, {b}}, {});
    CHECK(sel.fallback_used);
    REQUIRE(sel.uuts.size() == 2);
    CHECK(sel.uuts[0].entity == a);
    CHECK(sel.uuts[1].entity == b);
}

TEST_CASE("fields propagate impact but are dropped from the final list") {
    EntityId f = EntityId::field("C", "f");
    EntityId m = EntityId::method("C", "m", 0);
    DependencyGraph g = graph_of({f, m}, {{m, f, EdgeKind::reads}});
    // both variants changed the field: reader m is the common impact
    UutSelection sel = select_uuts_on_graph(g, {{f}, {f}}, {});
    CHECK_FALSE(sel.fallback_used);
    REQUIRE(sel.uuts.size() == 1);
    CHECK(sel.uuts[0].entity == m);
    for (const auto& u : sel.uuts) CHECK(u.entity.kind != EntityKind::field);
}

TEST_CASE("early return caps the list once the intersection exceeds max_uuts") {
    std::set<EntityId> nodes;
    std::set<DepEdge> edges;
    EntityId seed = EntityId::method("C", "seed", 0);
    nodes.insert(seed);
    for (int i = 0; i < 6; ++i) {
        EntityId caller = EntityId::method("C", "caller" + std::to_string(i), 0);
        nodes.insert(caller);
        edges.insert({caller, seed, EdgeKind::calls});
    }
    DependencyGraph g = graph_of(nodes, edges);
    SelectionConfig config;
    config.max_uuts = 3;
    UutSelection sel = select_uuts_on_graph(g, {{seed}, {seed}}, config);
    CHECK_FALSE(sel.fallback_used);
    CHECK(sel.uuts.size() == 3);
    CHECK(sel.uuts[0].entity == seed); // depth 0 sorts first
}

TEST_CASE("select_uuts equals the brute-force oracle on 50 random graphs") {
    std::mt19937_64 rng(424242);
    int fallback_cases = 0;
    for (int k = 0; k < 50; ++k) {
        RandomGraph rg = random_graph(rng);
        int variants = 1 + static_cast<int>(rng() % 3);
        std::vector<std::set<EntityId>> seed_sets;
        for (int v = 0; v < variants; ++v) seed_sets.push_back(random_seed_set(rng, rg.nodes));
        SelectionConfig config;
        config.max_depth = 1 + static_cast<int>(rng() % 5);
        config.max_uuts = 1 + static_cast<int>(rng() % 4);
        check_against_oracle(rg.graph, seed_sets, config);
        if (select_uuts_on_graph(rg.graph, seed_sets, config).fallback_used) ++fallback_cases;
    }
    CHECK(fallback_cases > 0); // the sample must actually exercise the fallback
}

TEST_CASE("fallback_used iff the intersection stays empty through max_depth") {
    std::mt19937_64 rng(777);
    for (int k = 0; k < 30; ++k) {
        RandomGraph rg = random_graph(rng);
        std::vector<std::set<EntityId>> seed_sets{random_seed_set(rng, rg.nodes),
                                                  random_seed_set(rng, rg.nodes)};
        SelectionConfig config;
        config.max_depth = 3;
        UutSelection sel = select_uuts_on_graph(rg.graph, seed_sets, config);

        bool any_seed = false;
        for (const auto& s : seed_sets) any_seed = any_seed || !s.empty();
        bool empty_everywhere = true;
        for (int d = 1; d <= config.max_depth && empty_everywhere; ++d) {
            std::vector<std::set<EntityId>> reach;
            for (const auto& seeds : seed_sets) reach.push_back(oracle_layers(rg.graph, seeds, d).back());
            for (const auto& id : rg.graph.nodes) {
                if (!id.callable()) continue;
                bool everywhere = true;
                for (const auto& r : reach) everywhere = everywhere && r.count(id) > 0;
                if (everywhere) {
                    empty_everywhere = false;
                    break;
                }
            }
        }
        CHECK(sel.fallback_used == (any_seed && empty_everywhere));
    }
}
