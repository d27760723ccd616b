#ifndef TOM_UUT_SELECT_HPP
#define TOM_UUT_SELECT_HPP

#include <map>
#include <set>
#include <vector>

#include "tom/ast.hpp"
#include "tom/depgraph.hpp"
#include "tom/entity.hpp"

namespace tom {

struct SelectionConfig {
    int max_depth = 5; // d
    int max_uuts = 3;  // n
    bool valid() const { return max_depth >= 1 && max_uuts >= 1; }
};

// Entities reachable from the seeds, keyed by the depth at which each was
// first reached (0 for seeds).
struct ImpactedSet {
    std::map<EntityId, int> entries;

    bool contains(const EntityId& id) const { return entries.count(id) > 0; }
};

// Breadth-first impact layering. Expansion of an entity is get_impacted plus,
// for a method, the fields it writes; a changed writer thereby reaches the
// written field at the next depth and that field's readers one depth later.
ImpactedSet impacted_closure(const DependencyGraph& graph, const std::set<EntityId>& seeds,
                             int depth);

struct UutEntry {
    EntityId entity;
    int min_depth = 0; // minimum first-reached depth across variants

    bool operator==(const UutEntry&) const = default;
};

struct UutSelection {
    std::vector<UutEntry> uuts; // callable entities only, at most max_uuts
    bool fallback_used = false;

    std::vector<EntityId> entities() const;
    bool empty() const { return uuts.empty(); }
};

// Core of the selection algorithm on an explicit graph with one seed set per
// variant. Expands all sets depth by depth; after each depth the candidate
// set is the intersection of all impacted sets restricted to callable
// entities, ordered by (min depth across variants, EntityId); returns the
// first max_uuts early once the candidate set exceeds max_uuts. An
// intersection still empty after max_depth falls back to the callable seed
// entities of all variants (fallback_used = true), also capped at max_uuts.
UutSelection select_uuts_on_graph(const DependencyGraph& graph,
                                  const std::vector<std::set<EntityId>>& seed_sets,
                                  const SelectionConfig& config);

// Program-level entry: seeds variant i with entity_diff(variants[i], target)
// over the target's dependency graph.
UutSelection select_uuts(const Program& target, const std::vector<ProgramPtr>& variants,
                         const SelectionConfig& config);

} // namespace tom

#endif
