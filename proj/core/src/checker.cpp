#include "tom/checker.hpp"

#include <map>
#include <set>
#include <string>

namespace tom {

namespace {

class Checker {
public:
    Checker(Program& prog, std::vector<Diagnostic>& diags) : prog_(prog), diags_(diags) {}

    void run() {
        check_duplicates();
        if (!diags_.empty()) return;
        for (auto& cls : prog_.classes) {
            for (auto& f : cls.fields) check_field(cls, f);
            if (cls.constructor) check_method(&cls, *cls.constructor);
            for (auto& m : cls.methods) check_method(&cls, m);
        }
        for (auto& fn : prog_.functions) check_method(nullptr, fn);
    }

private:
    Program& prog_;
    std::vector<Diagnostic>& diags_;
    const ClassDef* current_class_ = nullptr;
    const MethodDef* current_method_ = nullptr;
    std::map<std::string, Type> locals_;

    void error(const Span& span, const std::string& msg) {
        diags_.push_back({span.file, span.first_line, 1, msg});
    }

    void check_duplicates() {
        std::set<std::string> class_names;
        for (const auto& cls : prog_.classes) {
            if (!class_names.insert(cls.name).second)
                error(cls.span, "duplicate class " + cls.name);
            std::set<std::string> field_names;
            for (const auto& f : cls.fields)
                if (!field_names.insert(f.name).second)
                    error(f.span, "duplicate field " + cls.name + "." + f.name);
            std::set<std::pair<std::string, int>> sigs;
            for (const auto& m : cls.methods)
                if (!sigs.insert({m.name, m.arity()}).second)
                    error(m.span, "duplicate method " + cls.name + "." + m.name);
        }
        std::set<std::pair<std::string, int>> fn_sigs;
        for (const auto& fn : prog_.functions)
            if (!fn_sigs.insert({fn.name, fn.arity()}).second)
                error(fn.span, "duplicate function " + fn.name);
    }

    void check_field(const ClassDef& cls, FieldDef& f) {
        if (!f.declared.is_value_type()) {
            error(f.span, "field " + cls.name + "." + f.name + " must be int or bool");
            return;
        }
        // Initializers are literals, optionally negated.
        const Expr* e = f.init.get();
        if (e && std::holds_alternative<UnaryExpr>(e->node)) {
            const auto& u = std::get<UnaryExpr>(e->node);
            if (u.op == UnaryOp::neg) e = u.operand.get();
        }
        bool literal = e && (std::holds_alternative<IntLitExpr>(e->node) ||
                             std::holds_alternative<BoolLitExpr>(e->node));
        if (!literal) {
            error(f.span, "field initializer for " + cls.name + "." + f.name +
                              " must be a literal");
            return;
        }
        Type init_ty = std::holds_alternative<IntLitExpr>(e->node) ? Type::int_t() : Type::bool_t();
        if (std::holds_alternative<UnaryExpr>(f.init->node) && init_ty.kind != Type::Kind::int_t)
            error(f.span, "cannot negate a bool initializer");
        if (init_ty != f.declared)
            error(f.span, "initializer type " + init_ty.str() + " does not match declared " +
                              f.declared.str());
        f.init->type = init_ty;
    }

    void check_method(const ClassDef* cls, MethodDef& m) {
        current_class_ = cls;
        current_method_ = &m;
        locals_.clear();
        for (const auto& p : m.params) {
            if (p.type.kind == Type::Kind::class_t && !prog_.find_class(p.type.class_name))
                error(p.span, "unknown class " + p.type.class_name + " in parameter " + p.name);
            if (!locals_.emplace(p.name, p.type).second)
                error(p.span, "duplicate parameter " + p.name);
        }
        if (m.return_type.kind == Type::Kind::class_t)
            error(m.span, "method " + m.name + " cannot return a class value");
        check_body(m.body);
        if (m.return_type.kind != Type::Kind::void_t && !always_returns(m.body))
            error(m.span, "method " + qualified(m) + ": missing return on some path");
    }

    std::string qualified(const MethodDef& m) const {
        return m.owner_class.empty() ? m.name : m.owner_class + "." + m.name;
    }

    // Locals are block-scoped: a declaration is visible from its statement to
    // the end of the enclosing block only, so every runtime use is dominated
    // by its declaration.
    void check_body(const std::vector<StmtPtr>& body) {
        auto saved = locals_;
        for (const auto& s : body) check_stmt(*s);
        locals_ = std::move(saved);
    }

    void check_stmt(Stmt& stmt) {
        std::visit([&](auto& node) { check_node(stmt.span, node); }, stmt.node);
    }

    void check_node(const Span& span, VarDeclStmt& d) {
        if (d.declared.kind == Type::Kind::class_t && !prog_.find_class(d.declared.class_name)) {
            error(span, "unknown class " + d.declared.class_name);
            return;
        }
        Type init = check_expr(*d.init);
        if (init != d.declared && init.kind != Type::Kind::invalid)
            error(span, "cannot initialize " + d.declared.str() + " variable " + d.name +
                            " from " + init.str());
        if (!locals_.emplace(d.name, d.declared).second)
            error(span, "duplicate local " + d.name);
    }

    void check_node(const Span& span, AssignStmt& a) {
        auto it = locals_.find(a.name);
        if (it == locals_.end()) {
            error(span, "assignment to undeclared variable " + a.name);
            check_expr(*a.value);
            return;
        }
        Type v = check_expr(*a.value);
        if (v != it->second && v.kind != Type::Kind::invalid)
            error(span, "cannot assign " + v.str() + " to " + it->second.str() + " variable " +
                            a.name);
    }

    void check_node(const Span& span, FieldAssignStmt& a) {
        const FieldDef* f = current_class_ ? current_class_->find_field(a.field) : nullptr;
        if (!f) {
            error(span, "unknown field this." + a.field);
            check_expr(*a.value);
            return;
        }
        Type v = check_expr(*a.value);
        if (v != f->declared && v.kind != Type::Kind::invalid)
            error(span, "cannot assign " + v.str() + " to field this." + a.field);
    }

    void check_node(const Span& span, IfStmt& s) {
        require_bool(span, check_expr(*s.cond), "if condition");
        check_body(s.then_body);
        check_body(s.else_body);
    }

    void check_node(const Span& span, WhileStmt& s) {
        require_bool(span, check_expr(*s.cond), "while condition");
        check_body(s.body);
    }

    void check_node(const Span& span, ReturnStmt& s) {
        Type expected = current_method_->return_type;
        if (!s.value) {
            if (expected.kind != Type::Kind::void_t)
                error(span, "bare return in non-void method " + qualified(*current_method_));
            return;
        }
        Type v = check_expr(*s.value);
        if (expected.kind == Type::Kind::void_t) {
            error(span, "void method " + qualified(*current_method_) + " returns a value");
        } else if (v != expected && v.kind != Type::Kind::invalid) {
            error(span, "returning " + v.str() + " from " + expected.str() + " method " +
                            qualified(*current_method_));
        }
    }

    void check_node(const Span&, ExprStmt& s) { check_expr(*s.expr); }

    void require_bool(const Span& span, Type t, const char* what) {
        if (t.kind != Type::Kind::bool_t && t.kind != Type::Kind::invalid)
            error(span, std::string(what) + " must be bool, got " + t.str());
    }

    Type check_expr(Expr& expr) {
        Type t = std::visit([&](auto& node) { return infer(expr.span, node); }, expr.node);
        expr.type = t;
        return t;
    }

    Type infer(const Span&, IntLitExpr&) { return Type::int_t(); }
    Type infer(const Span&, BoolLitExpr&) { return Type::bool_t(); }

    Type infer(const Span& span, VarRefExpr& v) {
        auto it = locals_.find(v.name);
        if (it == locals_.end()) {
            error(span, "undeclared variable " + v.name);
            return Type::invalid();
        }
        return it->second;
    }

    Type infer(const Span& span, FieldRefExpr& f) {
        const FieldDef* fd = current_class_ ? current_class_->find_field(f.field) : nullptr;
        if (!fd) {
            error(span, "unknown field this." + f.field);
            return Type::invalid();
        }
        return fd->declared;
    }

    Type infer(const Span& span, UnaryExpr& u) {
        Type t = check_expr(*u.operand);
        if (t.kind == Type::Kind::invalid) return t;
        if (u.op == UnaryOp::neg) {
            if (t.kind != Type::Kind::int_t) error(span, "unary '-' needs int, got " + t.str());
            return Type::int_t();
        }
        if (t.kind != Type::Kind::bool_t) error(span, "'!' needs bool, got " + t.str());
        return Type::bool_t();
    }

    Type infer(const Span& span, BinaryExpr& b) {
        Type l = check_expr(*b.lhs);
        Type r = check_expr(*b.rhs);
        if (l.kind == Type::Kind::invalid || r.kind == Type::Kind::invalid)
            return Type::invalid();
        switch (b.op) {
            case BinaryOp::add:
            case BinaryOp::sub:
            case BinaryOp::mul:
            case BinaryOp::div:
            case BinaryOp::mod:
                if (l.kind != Type::Kind::int_t || r.kind != Type::Kind::int_t)
                    error(span, "arithmetic '" + binary_op_text(b.op) + "' needs int operands");
                return Type::int_t();
            case BinaryOp::lt:
            case BinaryOp::le:
            case BinaryOp::gt:
            case BinaryOp::ge:
                if (l.kind != Type::Kind::int_t || r.kind != Type::Kind::int_t)
                    error(span, "comparison '" + binary_op_text(b.op) + "' needs int operands");
                return Type::bool_t();
            case BinaryOp::eq:
            case BinaryOp::ne:
                if (l != r || !l.is_value_type())
                    error(span, "'" + binary_op_text(b.op) +
                                    "' needs two ints or two bools, got " + l.str() + " and " +
                                    r.str());
                return Type::bool_t();
            case BinaryOp::and_and:
            case BinaryOp::or_or:
                if (l.kind != Type::Kind::bool_t || r.kind != Type::Kind::bool_t)
                    error(span, "'" + binary_op_text(b.op) + "' needs bool operands");
                return Type::bool_t();
        }
        return Type::invalid();
    }

    Type infer(const Span& span, CallExpr& c) {
        std::vector<Type> arg_types;
        for (auto& a : c.args) arg_types.push_back(check_expr(*a));
        int arity = static_cast<int>(c.args.size());

        const ClassDef* receiver_class = nullptr;
        if (c.target == CallExpr::Target::self) {
            if (!current_class_) {
                error(span, "'this' used outside a class");
                return Type::invalid();
            }
            receiver_class = current_class_;
        } else if (c.target == CallExpr::Target::local) {
            auto it = locals_.find(c.receiver);
            if (it == locals_.end()) {
                error(span, "undeclared variable " + c.receiver);
                return Type::invalid();
            }
            if (it->second.kind != Type::Kind::class_t) {
                error(span, "cannot call a method on " + it->second.str() + " value " +
                                c.receiver);
                return Type::invalid();
            }
            receiver_class = prog_.find_class(it->second.class_name);
            if (!receiver_class) {
                error(span, "unknown class " + it->second.class_name);
                return Type::invalid();
            }
        }

        const MethodDef* callee = nullptr;
        if (receiver_class) {
            callee = receiver_class->find_method(c.method, arity);
            if (!callee) {
                error(span, "no method " + receiver_class->name + "." + c.method + " with " +
                                std::to_string(arity) + " argument(s)");
                return Type::invalid();
            }
            c.resolved_class = receiver_class->name;
        } else {
            callee = prog_.find_function(c.method, arity);
            if (!callee) {
                error(span, "no function " + c.method + " with " + std::to_string(arity) +
                                " argument(s)");
                return Type::invalid();
            }
        }
        for (std::size_t i = 0; i < arg_types.size(); ++i) {
            if (arg_types[i].kind == Type::Kind::invalid) continue;
            if (arg_types[i] != callee->params[i].type)
                error(span, "argument " + std::to_string(i + 1) + " of " + c.method + " expects " +
                                callee->params[i].type.str() + ", got " + arg_types[i].str());
        }
        return callee->return_type;
    }

    Type infer(const Span& span, NewExpr& n) {
        const ClassDef* cls = prog_.find_class(n.class_name);
        if (!cls) {
            error(span, "unknown class " + n.class_name);
            for (auto& a : n.args) check_expr(*a);
            return Type::invalid();
        }
        n.calls_ctor = cls->constructor.has_value();
        int expected = cls->constructor ? cls->constructor->arity() : 0;
        if (static_cast<int>(n.args.size()) != expected) {
            error(span, "new " + n.class_name + " expects " + std::to_string(expected) +
                            " argument(s), got " + std::to_string(n.args.size()));
        }
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            Type t = check_expr(*n.args[i]);
            if (cls->constructor && i < cls->constructor->params.size() &&
                t.kind != Type::Kind::invalid && t != cls->constructor->params[i].type)
                error(span, "constructor argument " + std::to_string(i + 1) + " expects " +
                                cls->constructor->params[i].type.str() + ", got " + t.str());
        }
        return Type::class_t(n.class_name);
    }

    static bool always_returns(const std::vector<StmtPtr>& body) {
        for (const auto& s : body) {
            if (std::holds_alternative<ReturnStmt>(s->node)) return true;
            if (const auto* i = std::get_if<IfStmt>(&s->node)) {
                if (!i->else_body.empty() && always_returns(i->then_body) &&
                    always_returns(i->else_body))
                    return true;
            }
        }
        return false;
    }
};

} // namespace

void check_program(Program& prog, std::vector<Diagnostic>& diags) {
    Checker(prog, diags).run();
}

} // namespace tom
