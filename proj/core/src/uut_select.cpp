#include "tom/uut_select.hpp"

#include <algorithm>

#include "tom/diffing.hpp"

namespace tom {

namespace {

std::set<EntityId> expand(const DependencyGraph& graph, const EntityId& entity) {
    std::set<EntityId> next = get_impacted(graph, entity);
    if (entity.kind == EntityKind::method) {
        auto written = graph.written_fields(entity);
        next.insert(written.begin(), written.end());
    }
    return next;
}

void advance_layer(const DependencyGraph& graph, ImpactedSet& set, int depth) {
    std::set<EntityId> frontier;
    for (const auto& [id, d] : set.entries)
        if (d == depth - 1) frontier.insert(id);
    for (const auto& id : frontier) {
        for (const auto& next : expand(graph, id)) {
            set.entries.emplace(next, depth); // keeps the first-reached depth
        }
    }
}

std::vector<UutEntry> intersect_callable(const std::vector<ImpactedSet>& sets) {
    std::vector<UutEntry> out;
    if (sets.empty()) return out;
    for (const auto& [id, d0] : sets[0].entries) {
        if (!id.callable()) continue;
        int min_depth = d0;
        bool everywhere = true;
        for (std::size_t i = 1; i < sets.size(); ++i) {
            auto it = sets[i].entries.find(id);
            if (it == sets[i].entries.end()) {
                everywhere = false;
                break;
            }
            min_depth = std::min(min_depth, it->second);
        }
        if (everywhere) out.push_back({id, min_depth});
    }
    std::sort(out.begin(), out.end(), [](const UutEntry& a, const UutEntry& b) {
        if (a.min_depth != b.min_depth) return a.min_depth < b.min_depth;
        return a.entity < b.entity;
    });
    return out;
}

} // namespace

ImpactedSet impacted_closure(const DependencyGraph& graph, const std::set<EntityId>& seeds,
                             int depth) {
    ImpactedSet set;
    for (const auto& s : seeds) set.entries.emplace(s, 0);
    for (int d = 1; d <= depth; ++d) advance_layer(graph, set, d);
    return set;
}

std::vector<EntityId> UutSelection::entities() const {
    std::vector<EntityId> out;
    out.reserve(uuts.size());
    for (const auto& u : uuts) out.push_back(u.entity);
    return out;
}

UutSelection select_uuts_on_graph(const DependencyGraph& graph,
                                  const std::vector<std::set<EntityId>>& seed_sets,
                                  const SelectionConfig& config) {
    UutSelection result;

    bool any_seed = false;
    for (const auto& seeds : seed_sets) any_seed = any_seed || !seeds.empty();
    if (!any_seed) return result; // nothing changed anywhere: nothing to select

    std::vector<ImpactedSet> impacted;
    impacted.reserve(seed_sets.size());
    for (const auto& seeds : seed_sets) impacted.push_back(impacted_closure(graph, seeds, 0));

    // Expand depth by depth; the candidate set is inspected after each depth.
    std::vector<UutEntry> uuts;
    for (int d = 1; d <= config.max_depth; ++d) {
        for (auto& set : impacted) advance_layer(graph, set, d);
        uuts = intersect_callable(impacted);
        if (static_cast<int>(uuts.size()) > config.max_uuts) {
            uuts.resize(static_cast<std::size_t>(config.max_uuts));
            result.uuts = std::move(uuts);
            return result;
        }
    }
    if (!uuts.empty()) {
        result.uuts = std::move(uuts);
        return result;
    }

    // No common impacted entity within the depth bound: fall back to the
    // callable changed/added entities of all variants, capped like any
    // selection result.
    result.fallback_used = true;
    std::set<EntityId> fallback;
    for (const auto& seeds : seed_sets)
        for (const auto& id : seeds)
            if (id.callable()) fallback.insert(id);
    for (const auto& id : fallback) {
        if (static_cast<int>(result.uuts.size()) >= config.max_uuts) break;
        result.uuts.push_back({id, 0});
    }
    return result;
}

UutSelection select_uuts(const Program& target, const std::vector<ProgramPtr>& variants,
                         const SelectionConfig& config) {
    DependencyGraph graph = extract_dependencies(target);
    std::vector<std::set<EntityId>> seed_sets;
    seed_sets.reserve(variants.size());
    for (const auto& v : variants) seed_sets.push_back(entity_diff(*v, target).seeds());
    return select_uuts_on_graph(graph, seed_sets, config);
}

} // namespace tom
