#ifndef TOM_DEPGRAPH_HPP
#define TOM_DEPGRAPH_HPP

#include <map>
#include <set>
#include <string>

#include "tom/ast.hpp"
#include "tom/entity.hpp"

namespace tom {

enum class EdgeKind { calls, reads, writes, defines };

std::string edge_kind_name(EdgeKind k);

struct DepEdge {
    EntityId from;
    EntityId to;
    EdgeKind kind;

    auto operator<=>(const DepEdge&) const = default;
};

struct DependencyGraph {
    std::set<EntityId> nodes;
    std::set<DepEdge> edges;

    bool has_node(const EntityId& id) const { return nodes.count(id) > 0; }
    // Fields written by a callable entity (forward writes edges).
    std::set<EntityId> written_fields(const EntityId& id) const;
    // Fields defined by a constructor (forward defines edges).
    std::set<EntityId> defined_fields(const EntityId& id) const;
};

// One node per field/constructor/method (including top-level functions);
// calls edges for every syntactic invocation including `new`; reads/writes
// edges for field accesses; constructor field assignments create defines
// edges instead of writes.
DependencyGraph extract_dependencies(const Program& program);

// Reverse dependents of `entity`: every X with an edge (X, entity,
// calls|reads|writes); plus, for a constructor, the fields it defines so a
// later exploration depth reaches their readers. Unknown entity -> empty.
std::set<EntityId> get_impacted(const DependencyGraph& graph, const EntityId& entity);

// Debug dumps used by the CLI.
std::string graph_to_json(const DependencyGraph& graph);
std::string graph_to_dot(const DependencyGraph& graph);

// Span of an entity's definition in its program, when present.
const Span* entity_span(const Program& program, const EntityId& id);

// All entities of a program in EntityId order.
std::set<EntityId> program_entities(const Program& program);

} // namespace tom

#endif
