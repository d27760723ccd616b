#include "tom/interp.hpp"

#include <map>

namespace tom {

const Value* ExecutionValuation::value_at(const ObservationPoint& p) const {
    for (const auto& [pt, v] : slots) {
        if (pt.action_index == p.action_index && pt.kind == p.kind) return &v;
    }
    return nullptr;
}

namespace {

// Raised inside the evaluator for MiniLang-level exceptions; converted to a
// Termination at the action boundary.
struct MiniExc {
    ExcKind kind;
};
struct BudgetExhausted {};

struct Object {
    std::string class_name;
    std::map<std::string, Value> fields;
};

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

class Interpreter {
public:
    Interpreter(const Program& prog, long long budget) : prog_(prog), budget_(budget) {}

    ExecutionResult run(const TestCase& test) {
        ExecutionResult result;
        auto points = test.observation_points();
        result.valuation.slots.reserve(points.size());
        for (const auto& p : points) result.valuation.slots.emplace_back(p, Value{Unobserved{}});

        std::map<std::string, Value> env; // test labels
        bool aborted = false;

        for (std::size_t i = 0; i < test.actions.size() && !aborted; ++i) {
            int idx = static_cast<int>(i);
            Value primary{Unobserved{}};
            bool has_primary = false;
            ExcKind marker = ExcKind::none;

            try {
                std::visit(
                    [&](const auto& action) {
                        run_action(action, env, primary, has_primary, marker);
                    },
                    test.actions[i]);
            } catch (const MiniExc& e) {
                // runtime exception: record and abort the remaining actions
                marker = e.kind;
                primary = exc_value(e.kind);
                has_primary = true;
                result.terminated = {TerminationKind::exception, e.kind, idx};
                aborted = true;
            } catch (const BudgetExhausted&) {
                result.terminated = {TerminationKind::budget_exhausted, ExcKind::none, idx};
                export_trace(result);
                return result;
            }

            set_slot(result.valuation, idx, ObservationPoint::Kind::return_value, primary,
                     has_primary);
            set_slot(result.valuation, idx, ObservationPoint::Kind::field_state, primary,
                     has_primary);
            set_slot(result.valuation, idx, ObservationPoint::Kind::exception_marker,
                     exc_value(marker), true);
        }
        export_trace(result);
        return result;
    }

private:
    const Program& prog_;
    long long budget_;
    long long steps_ = 0;
    int call_depth_ = 0;
    std::vector<Object> heap_;
    std::set<std::pair<std::string, int>> covered_;
    std::set<BranchOutcome> branches_;
    std::set<EntityId> entered_;

    struct Frame {
        const ClassDef* cls = nullptr; // receiver class, null for top-level
        std::map<std::string, Value> locals;
    };

    struct ReturnSignal {
        Value value;
    };

    void charge(const Span& span) {
        if (steps_ >= budget_) throw BudgetExhausted{};
        ++steps_;
        covered_.insert({span.file, span.first_line});
    }

    static void set_slot(ExecutionValuation& valuation, int action, ObservationPoint::Kind kind,
                         const Value& v, bool has) {
        if (!has) return;
        for (auto& [pt, slot] : valuation.slots) {
            if (pt.action_index == action && pt.kind == kind) {
                slot = v;
                return;
            }
        }
    }

    // --- test actions ---

    void run_action(const ConstructAction& a, std::map<std::string, Value>& env, Value& primary,
                    bool& has_primary, ExcKind& marker) {
        (void)primary;
        (void)has_primary;
        const ClassDef* cls = prog_.find_class(a.class_name);
        int expected = cls && cls->constructor ? cls->constructor->arity() : 0;
        if (!cls || static_cast<int>(a.args.size()) != expected ||
            !args_bindable(cls && cls->constructor ? &*cls->constructor : nullptr, a.args)) {
            marker = ExcKind::link_error;
            env[a.label] = exc_value(ExcKind::link_error);
            return;
        }
        Value obj = instantiate(*cls, a.args);
        env[a.label] = obj;
    }

    void run_action(const InvokeAction& a, std::map<std::string, Value>& env, Value& primary,
                    bool& has_primary, ExcKind& marker) {
        has_primary = a.observe;
        const MethodDef* callee = nullptr;
        const ClassDef* cls = nullptr;
        std::int64_t self_id = -1;

        if (a.label) {
            auto it = env.find(*a.label);
            const ObjectRef* ref =
                it == env.end() ? nullptr : std::get_if<ObjectRef>(&it->second);
            if (ref) {
                self_id = ref->id;
                cls = prog_.find_class(heap_[static_cast<std::size_t>(self_id)].class_name);
                if (cls) callee = cls->find_method(a.method, static_cast<int>(a.args.size()));
            }
        } else {
            callee = prog_.find_function(a.method, static_cast<int>(a.args.size()));
        }

        if (!callee || !args_bindable(callee, a.args)) {
            marker = ExcKind::link_error;
            if (a.observe) primary = exc_value(ExcKind::link_error);
            return;
        }
        if (cls)
            entered_.insert(EntityId::method(cls->name, a.method, callee->arity()));
        else
            entered_.insert(EntityId::function(a.method, callee->arity()));
        Value ret = call_with_heap_index(*callee, cls, self_id, a.args);
        if (a.observe) {
            if (callee->return_type.kind == Type::Kind::void_t) {
                // observing a void call is a binding mismatch, not a crash
                primary = exc_value(ExcKind::link_error);
            } else {
                primary = ret;
            }
        }
    }

    void run_action(const ObserveFieldAction& a, std::map<std::string, Value>& env, Value& primary,
                    bool& has_primary, ExcKind& marker) {
        has_primary = true;
        auto it = env.find(a.label);
        const ObjectRef* ref = it == env.end() ? nullptr : std::get_if<ObjectRef>(&it->second);
        if (!ref) {
            marker = ExcKind::link_error;
            primary = exc_value(ExcKind::link_error);
            return;
        }
        const Object& obj = heap_[static_cast<std::size_t>(ref->id)];
        auto field = obj.fields.find(a.field);
        if (field == obj.fields.end()) {
            marker = ExcKind::link_error;
            primary = exc_value(ExcKind::link_error);
            return;
        }
        primary = field->second;
    }

    static bool args_bindable(const MethodDef* callee, const std::vector<Value>& args) {
        if (!callee) return args.empty();
        if (callee->arity() != static_cast<int>(args.size())) return false;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const Type& want = callee->params[i].type;
            if (want.kind == Type::Kind::int_t && !std::holds_alternative<std::int64_t>(args[i]))
                return false;
            if (want.kind == Type::Kind::bool_t && !std::holds_alternative<bool>(args[i]))
                return false;
            if (want.kind == Type::Kind::class_t) return false; // tests pass literals only
        }
        return true;
    }

    // --- object construction and calls ---

    Value instantiate(const ClassDef& cls, const std::vector<Value>& args) {
        std::int64_t id = static_cast<std::int64_t>(heap_.size());
        heap_.push_back(Object{cls.name, {}});
        for (const auto& f : cls.fields) {
            charge(f.span);
            heap_[static_cast<std::size_t>(id)].fields[f.name] = eval_literal(*f.init);
        }
        if (cls.constructor) {
            entered_.insert(EntityId::ctor(cls.name, cls.constructor->arity()));
            // re-find the object after possible heap growth inside the ctor
            call_with_heap_index(*cls.constructor, &cls, id, args);
        }
        return object_value(id);
    }

    Value eval_literal(const Expr& e) {
        if (const auto* i = std::get_if<IntLitExpr>(&e.node)) return int_value(i->value);
        if (const auto* b = std::get_if<BoolLitExpr>(&e.node)) return bool_value(b->value);
        if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
            Value inner = eval_literal(*u->operand);
            if (const auto* i = std::get_if<std::int64_t>(&inner))
                return int_value(wrap_sub(0, *i));
        }
        return int_value(0);
    }

    Value call_with_heap_index(const MethodDef& m, const ClassDef* cls, std::int64_t self_id,
                               const std::vector<Value>& args) {
        if (call_depth_ >= kMaxCallDepth) throw MiniExc{ExcKind::stack_overflow};
        ++call_depth_;
        Frame frame;
        frame.cls = cls;
        for (std::size_t i = 0; i < m.params.size(); ++i) frame.locals[m.params[i].name] = args[i];

        Value result{Unobserved{}};
        try {
            exec_body(m.body, frame, self_id);
            result = Value{Unobserved{}}; // void fall-through
        } catch (ReturnSignal& r) {
            result = std::move(r.value);
        } catch (...) {
            --call_depth_;
            throw;
        }
        --call_depth_;
        return result;
    }

    // --- statements ---

    void exec_body(const std::vector<StmtPtr>& body, Frame& frame, std::int64_t self_id) {
        for (const auto& s : body) exec_stmt(*s, frame, self_id);
    }

    Object* self_object(std::int64_t self_id) {
        return self_id >= 0 ? &heap_[static_cast<std::size_t>(self_id)] : nullptr;
    }

    void exec_stmt(const Stmt& stmt, Frame& frame, std::int64_t self_id) {
        charge(stmt.span);
        if (const auto* d = std::get_if<VarDeclStmt>(&stmt.node)) {
            frame.locals[d->name] = eval(*d->init, frame, self_id);
            return;
        }
        if (const auto* a = std::get_if<AssignStmt>(&stmt.node)) {
            frame.locals[a->name] = eval(*a->value, frame, self_id);
            return;
        }
        if (const auto* fa = std::get_if<FieldAssignStmt>(&stmt.node)) {
            Value v = eval(*fa->value, frame, self_id);
            self_object(self_id)->fields[fa->field] = v;
            return;
        }
        if (const auto* i = std::get_if<IfStmt>(&stmt.node)) {
            bool cond = eval_bool(*i->cond, frame, self_id);
            branches_.insert({stmt.span.file, stmt.span.first_line, cond});
            exec_body(cond ? i->then_body : i->else_body, frame, self_id);
            return;
        }
        if (const auto* w = std::get_if<WhileStmt>(&stmt.node)) {
            while (true) {
                bool cond = eval_bool(*w->cond, frame, self_id);
                branches_.insert({stmt.span.file, stmt.span.first_line, cond});
                if (!cond) break;
                exec_body(w->body, frame, self_id);
                charge(stmt.span); // each iteration re-executes the loop head
            }
            return;
        }
        if (const auto* r = std::get_if<ReturnStmt>(&stmt.node)) {
            ReturnSignal sig;
            sig.value = r->value ? eval(*r->value, frame, self_id) : Value{Unobserved{}};
            throw sig;
        }
        const auto& e = std::get<ExprStmt>(stmt.node);
        eval(*e.expr, frame, self_id);
    }

    // --- expressions ---

    bool eval_bool(const Expr& e, Frame& frame, std::int64_t self_id) {
        return std::get<bool>(eval(e, frame, self_id));
    }

    Value eval(const Expr& e, Frame& frame, std::int64_t self_id) {
        if (const auto* i = std::get_if<IntLitExpr>(&e.node)) return int_value(i->value);
        if (const auto* b = std::get_if<BoolLitExpr>(&e.node)) return bool_value(b->value);
        if (const auto* v = std::get_if<VarRefExpr>(&e.node)) return frame.locals.at(v->name);
        if (const auto* f = std::get_if<FieldRefExpr>(&e.node))
            return self_object(self_id)->fields.at(f->field);
        if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
            Value inner = eval(*u->operand, frame, self_id);
            if (u->op == UnaryOp::neg) return int_value(wrap_sub(0, std::get<std::int64_t>(inner)));
            return bool_value(!std::get<bool>(inner));
        }
        if (const auto* b = std::get_if<BinaryExpr>(&e.node)) return eval_binary(*b, frame, self_id);
        if (const auto* c = std::get_if<CallExpr>(&e.node)) return eval_call(*c, frame, self_id);
        const auto& n = std::get<NewExpr>(e.node);
        std::vector<Value> args;
        args.reserve(n.args.size());
        for (const auto& a : n.args) args.push_back(eval(*a, frame, self_id));
        return instantiate(*prog_.find_class(n.class_name), args);
    }

    Value eval_binary(const BinaryExpr& b, Frame& frame, std::int64_t self_id) {
        // short-circuit forms first
        if (b.op == BinaryOp::and_and) {
            if (!eval_bool(*b.lhs, frame, self_id)) return bool_value(false);
            return bool_value(eval_bool(*b.rhs, frame, self_id));
        }
        if (b.op == BinaryOp::or_or) {
            if (eval_bool(*b.lhs, frame, self_id)) return bool_value(true);
            return bool_value(eval_bool(*b.rhs, frame, self_id));
        }
        Value lv = eval(*b.lhs, frame, self_id);
        Value rv = eval(*b.rhs, frame, self_id);
        if (b.op == BinaryOp::eq) return bool_value(lv == rv);
        if (b.op == BinaryOp::ne) return bool_value(!(lv == rv));

        std::int64_t l = std::get<std::int64_t>(lv);
        std::int64_t r = std::get<std::int64_t>(rv);
        switch (b.op) {
            case BinaryOp::add: return int_value(wrap_add(l, r));
            case BinaryOp::sub: return int_value(wrap_sub(l, r));
            case BinaryOp::mul: return int_value(wrap_mul(l, r));
            case BinaryOp::div:
                if (r == 0) throw MiniExc{ExcKind::div_by_zero};
                if (l == INT64_MIN && r == -1) return int_value(INT64_MIN);
                return int_value(l / r);
            case BinaryOp::mod:
                if (r == 0) throw MiniExc{ExcKind::div_by_zero};
                if (l == INT64_MIN && r == -1) return int_value(0);
                return int_value(l % r);
            case BinaryOp::lt: return bool_value(l < r);
            case BinaryOp::le: return bool_value(l <= r);
            case BinaryOp::gt: return bool_value(l > r);
            case BinaryOp::ge: return bool_value(l >= r);
            default: return Value{Unobserved{}};
        }
    }

    Value eval_call(const CallExpr& c, Frame& frame, std::int64_t self_id) {
        std::vector<Value> args;
        args.reserve(c.args.size());
        for (const auto& a : c.args) args.push_back(eval(*a, frame, self_id));

        if (c.target == CallExpr::Target::toplevel) {
            const MethodDef* fn = prog_.find_function(c.method, static_cast<int>(args.size()));
            entered_.insert(EntityId::function(c.method, static_cast<int>(args.size())));
            return call_with_heap_index(*fn, nullptr, -1, args);
        }

        std::int64_t receiver_id;
        const ClassDef* cls;
        if (c.target == CallExpr::Target::self) {
            receiver_id = self_id;
            cls = prog_.find_class(frame.cls->name);
        } else {
            const Value& recv = frame.locals.at(c.receiver);
            receiver_id = std::get<ObjectRef>(recv).id;
            cls = prog_.find_class(heap_[static_cast<std::size_t>(receiver_id)].class_name);
        }
        const MethodDef* m = cls->find_method(c.method, static_cast<int>(args.size()));
        entered_.insert(EntityId::method(cls->name, c.method, static_cast<int>(args.size())));
        return call_with_heap_index(*m, cls, receiver_id, args);
    }

public:
    void export_trace(ExecutionResult& result) const {
        result.steps_used = steps_;
        result.covered_lines = covered_;
        result.covered_branches = branches_;
        result.entered_entities = entered_;
    }
};

} // namespace

ExecutionResult run_test(const Program& program, const TestCase& test, long long budget) {
    Interpreter interp(program, budget);
    ExecutionResult result = interp.run(test);
    return result;
}

std::vector<AssertionOutcome> evaluate_assertions(const TestCase& test,
                                                  const ExecutionResult& result) {
    std::vector<AssertionOutcome> outcomes;
    for (const auto& a : test.assertions) {
        AssertionOutcome o;
        o.assertion = a;
        const Value* actual = result.valuation.value_at(a.point);
        o.actual = actual ? *actual : Value{Unobserved{}};
        o.passed = actual && *actual == a.expected;
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

bool all_assertions_pass(const TestCase& test, const ExecutionResult& result) {
    for (const auto& o : evaluate_assertions(test, result))
        if (!o.passed) return false;
    return true;
}

} // namespace tom
