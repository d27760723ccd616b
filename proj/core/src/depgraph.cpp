#include "tom/depgraph.hpp"

#include <sstream>

namespace tom {

std::string edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::calls: return "calls";
        case EdgeKind::reads: return "reads";
        case EdgeKind::writes: return "writes";
        case EdgeKind::defines: return "defines";
    }
    return "calls";
}

std::set<EntityId> DependencyGraph::written_fields(const EntityId& id) const {
    std::set<EntityId> out;
    for (const auto& e : edges)
        if (e.from == id && e.kind == EdgeKind::writes) out.insert(e.to);
    return out;
}

std::set<EntityId> DependencyGraph::defined_fields(const EntityId& id) const {
    std::set<EntityId> out;
    for (const auto& e : edges)
        if (e.from == id && e.kind == EdgeKind::defines) out.insert(e.to);
    return out;
}

namespace {

class Extractor {
public:
    Extractor(const Program& prog, DependencyGraph& graph) : prog_(prog), graph_(graph) {}

    void run() {
        for (const auto& cls : prog_.classes) {
            for (const auto& f : cls.fields) graph_.nodes.insert(EntityId::field(cls.name, f.name));
            if (cls.constructor) {
                EntityId id = EntityId::ctor(cls.name, cls.constructor->arity());
                graph_.nodes.insert(id);
                walk_method(*cls.constructor, id, /*is_ctor=*/true);
            }
            for (const auto& m : cls.methods) {
                EntityId id = EntityId::method(cls.name, m.name, m.arity());
                graph_.nodes.insert(id);
                walk_method(m, id, /*is_ctor=*/false);
            }
        }
        for (const auto& fn : prog_.functions) {
            EntityId id = EntityId::function(fn.name, fn.arity());
            graph_.nodes.insert(id);
            walk_method(fn, id, /*is_ctor=*/false);
        }
    }

private:
    const Program& prog_;
    DependencyGraph& graph_;
    const MethodDef* current_ = nullptr;
    EntityId current_id_;
    bool in_ctor_ = false;

    void add_edge(const EntityId& to, EdgeKind kind) {
        graph_.edges.insert({current_id_, to, kind});
    }

    void walk_method(const MethodDef& m, const EntityId& id, bool is_ctor) {
        current_ = &m;
        current_id_ = id;
        in_ctor_ = is_ctor;
        for (const auto& s : m.body) walk_stmt(*s);
    }

    void walk_stmt(const Stmt& stmt) {
        if (const auto* d = std::get_if<VarDeclStmt>(&stmt.node)) {
            walk_expr(*d->init);
        } else if (const auto* a = std::get_if<AssignStmt>(&stmt.node)) {
            walk_expr(*a->value);
        } else if (const auto* fa = std::get_if<FieldAssignStmt>(&stmt.node)) {
            walk_expr(*fa->value);
            EntityId field = EntityId::field(current_->owner_class, fa->field);
            add_edge(field, in_ctor_ ? EdgeKind::defines : EdgeKind::writes);
        } else if (const auto* i = std::get_if<IfStmt>(&stmt.node)) {
            walk_expr(*i->cond);
            for (const auto& s : i->then_body) walk_stmt(*s);
            for (const auto& s : i->else_body) walk_stmt(*s);
        } else if (const auto* w = std::get_if<WhileStmt>(&stmt.node)) {
            walk_expr(*w->cond);
            for (const auto& s : w->body) walk_stmt(*s);
        } else if (const auto* r = std::get_if<ReturnStmt>(&stmt.node)) {
            if (r->value) walk_expr(*r->value);
        } else if (const auto* e = std::get_if<ExprStmt>(&stmt.node)) {
            walk_expr(*e->expr);
        }
    }

    void walk_expr(const Expr& expr) {
        if (const auto* f = std::get_if<FieldRefExpr>(&expr.node)) {
            add_edge(EntityId::field(current_->owner_class, f->field), EdgeKind::reads);
            return;
        }
        if (const auto* u = std::get_if<UnaryExpr>(&expr.node)) {
            walk_expr(*u->operand);
            return;
        }
        if (const auto* b = std::get_if<BinaryExpr>(&expr.node)) {
            walk_expr(*b->lhs);
            walk_expr(*b->rhs);
            return;
        }
        if (const auto* c = std::get_if<CallExpr>(&expr.node)) {
            for (const auto& a : c->args) walk_expr(*a);
            int arity = static_cast<int>(c->args.size());
            if (c->target == CallExpr::Target::toplevel)
                add_edge(EntityId::function(c->method, arity), EdgeKind::calls);
            else
                add_edge(EntityId::method(c->resolved_class, c->method, arity), EdgeKind::calls);
            return;
        }
        if (const auto* n = std::get_if<NewExpr>(&expr.node)) {
            for (const auto& a : n->args) walk_expr(*a);
            if (n->calls_ctor)
                add_edge(EntityId::ctor(n->class_name, static_cast<int>(n->args.size())),
                         EdgeKind::calls);
            return;
        }
    }
};

} // namespace

DependencyGraph extract_dependencies(const Program& program) {
    DependencyGraph graph;
    Extractor(program, graph).run();
    return graph;
}

std::set<EntityId> get_impacted(const DependencyGraph& graph, const EntityId& entity) {
    std::set<EntityId> out;
    if (!graph.has_node(entity)) return out;
    for (const auto& e : graph.edges) {
        if (e.to == entity &&
            (e.kind == EdgeKind::calls || e.kind == EdgeKind::reads || e.kind == EdgeKind::writes))
            out.insert(e.from);
    }
    if (entity.kind == EntityKind::constructor) {
        auto defined = graph.defined_fields(entity);
        out.insert(defined.begin(), defined.end());
    }
    return out;
}

std::string graph_to_json(const DependencyGraph& graph) {
    std::ostringstream os;
    os << "{\n  \"nodes\": [";
    bool first = true;
    for (const auto& n : graph.nodes) {
        os << (first ? "" : ", ") << "\"" << n.key() << "\"";
        first = false;
    }
    os << "],\n  \"edges\": [";
    first = true;
    for (const auto& e : graph.edges) {
        os << (first ? "" : ",");
        os << "\n    {\"from\": \"" << e.from.key() << "\", \"to\": \"" << e.to.key()
           << "\", \"kind\": \"" << edge_kind_name(e.kind) << "\"}";
        first = false;
    }
    os << (graph.edges.empty() ? "]" : "\n  ]") << "\n}\n";
    return os.str();
}

std::string graph_to_dot(const DependencyGraph& graph) {
    std::ostringstream os;
    os << "digraph deps {\n";
    for (const auto& n : graph.nodes) os << "  \"" << n.display() << "\";\n";
    for (const auto& e : graph.edges)
        os << "  \"" << e.from.display() << "\" -> \"" << e.to.display() << "\" [label=\""
           << edge_kind_name(e.kind) << "\"];\n";
    os << "}\n";
    return os.str();
}

const Span* entity_span(const Program& program, const EntityId& id) {
    if (id.class_name.empty()) {
        const MethodDef* fn = program.find_function(id.name, id.arity);
        return fn ? &fn->span : nullptr;
    }
    const ClassDef* cls = program.find_class(id.class_name);
    if (!cls) return nullptr;
    switch (id.kind) {
        case EntityKind::field: {
            const FieldDef* f = cls->find_field(id.name);
            return f ? &f->span : nullptr;
        }
        case EntityKind::constructor:
            return cls->constructor && cls->constructor->arity() == id.arity
                       ? &cls->constructor->span
                       : nullptr;
        case EntityKind::method: {
            const MethodDef* m = cls->find_method(id.name, id.arity);
            return m ? &m->span : nullptr;
        }
    }
    return nullptr;
}

std::set<EntityId> program_entities(const Program& program) {
    std::set<EntityId> out;
    for (const auto& cls : program.classes) {
        for (const auto& f : cls.fields) out.insert(EntityId::field(cls.name, f.name));
        if (cls.constructor) out.insert(EntityId::ctor(cls.name, cls.constructor->arity()));
        for (const auto& m : cls.methods) out.insert(EntityId::method(cls.name, m.name, m.arity()));
    }
    for (const auto& fn : program.functions) out.insert(EntityId::function(fn.name, fn.arity()));
    return out;
}

} // namespace tom
