#include "tom/testgen.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <thread>

namespace tom {

std::vector<std::int64_t> GenConfig::default_int_pool() {
    return {-2, -1, 0, 1, 2, 10, 100, INT64_MIN, INT64_MAX};
}

std::string criteria_name(GenConfig::Criteria c) {
    return c == GenConfig::Criteria::diff_line ? "diffline" : "multi";
}

std::optional<GenConfig::Criteria> criteria_from_name(const std::string& name) {
    if (name == "diffline") return GenConfig::Criteria::diff_line;
    if (name == "multi") return GenConfig::Criteria::multi;
    return std::nullopt;
}

int ConflictReport::total_conflicts() const {
    int n = 0;
    for (const auto& t : targets) n += static_cast<int>(t.conflicts.size());
    return n;
}

std::vector<AttributedAssertion> synthesize_assertions(
    const ExecutionResult& target_result,
    const std::vector<std::pair<std::string, ExecutionResult>>& variant_results,
    const TestCase& test) {
    std::vector<AttributedAssertion> out;
    const auto& slots = target_result.valuation.slots;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const auto& [point, expected] = slots[i];
        if (is_unobserved(expected)) continue; // nothing assertable here
        std::set<std::string> supporters;
        for (const auto& [role, result] : variant_results) {
            if (i >= result.valuation.slots.size()) continue;
            if (result.valuation.slots[i].second != expected) supporters.insert(role);
        }
        if (supporters.empty()) continue;
        AttributedAssertion a;
        a.assertion = {point, expected};
        a.supporting_roles = std::move(supporters);
        if (point.action_index >= 0 &&
            point.action_index < static_cast<int>(test.actions.size()))
            a.action_repr = action_str(test.actions[static_cast<std::size_t>(point.action_index)]);
        out.push_back(std::move(a));
    }
    return out;
}

bool check_stability(const TestCase& test, const std::vector<ProgramPtr>& versions, int runs,
                     long long budget, const TestRunner& runner) {
    TestRunner run = runner ? runner
                           : [](const Program& p, const TestCase& t, long long b) {
                                 return run_test(p, t, b);
                             };
    for (const auto& version : versions) {
        ExecutionResult reference = run(*version, test, budget);
        for (int k = 1; k < runs; ++k) {
            if (!(run(*version, test, budget) == reference)) return false;
        }
    }
    return true;
}

namespace {

// Deterministic helpers over mt19937_64; distributions from <random> are not
// pinned across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::uint64_t next() { return gen_(); }
    std::size_t below(std::size_t n) { return n == 0 ? 0 : gen_() % n; }
    bool chance(double p) {
        return static_cast<double>(gen_() % 1000000) < p * 1000000.0;
    }

private:
    std::mt19937_64 gen_;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct MethodSlot {
    std::string class_name; // empty for top-level
    const MethodDef* def = nullptr;
};

// Action-sequence builder and mutator over the UUT classes of one target
// version. All randomness flows through the coordinator's Rng.
class TestBuilder {
public:
    TestBuilder(const Program& target, const std::vector<EntityId>& uuts,
                const std::vector<std::int64_t>& pool)
        : target_(target), uuts_(uuts), pool_(pool) {
        for (const auto& id : uuts_) {
            if (id.class_name.empty()) {
                if (const MethodDef* fn = target_.find_function(id.name, id.arity))
                    toplevel_.push_back({"", fn});
            } else if (!classes_.count(id.class_name)) {
                if (const ClassDef* cls = target_.find_class(id.class_name)) {
                    classes_[id.class_name] = cls;
                    for (const auto& m : cls->methods) methods_.push_back({cls->name, &m});
                }
            }
        }
    }

    bool viable() const { return !classes_.empty() || !toplevel_.empty(); }

    TestCase random_test(Rng& rng) {
        TestCase test;
        std::map<std::string, std::string> label_of_class;
        for (const auto& [name, cls] : classes_)
            construct(test, name, *cls, label_of_class, rng);

        std::size_t extra = 1 + rng.below(6);
        for (std::size_t k = 0; k < extra; ++k) append_random_invoke(test, label_of_class, rng);
        ensure_uut_invokes(test, label_of_class, rng);
        close(test);
        return test;
    }

    TestCase mutate_test(const TestCase& original, Rng& rng) {
        TestCase test = strip_observations(original);
        switch (rng.below(4)) {
            case 0: perturb_argument(test, rng); break;
            case 1: {
                auto labels = labels_of(test);
                append_random_invoke_at(test, labels, rng, 1 + rng.below(test.actions.size() + 1));
                break;
            }
            case 2: remove_random_invoke(test, rng); break;
            default: swap_random_invokes(test, rng); break;
        }
        auto labels = labels_of(test);
        ensure_uut_invokes(test, labels, rng);
        close(test);
        return test;
    }

    TestCase crossover(const TestCase& a, const TestCase& b, Rng& rng) {
        TestCase left = strip_observations(a);
        TestCase right = strip_observations(b);
        TestCase child;
        std::map<std::string, std::string> labels;
        // constructs come from the left parent
        for (const auto& action : left.actions) {
            if (const auto* c = std::get_if<ConstructAction>(&action)) {
                child.actions.push_back(action);
                if (!labels.count(c->class_name)) labels[c->class_name] = c->label;
            }
        }
        auto body_of = [](const TestCase& t) {
            std::vector<InvokeAction> body;
            for (const auto& action : t.actions)
                if (const auto* inv = std::get_if<InvokeAction>(&action)) body.push_back(*inv);
            return body;
        };
        std::vector<InvokeAction> la = body_of(left), rb = body_of(right);
        std::size_t cut_a = rng.below(la.size() + 1);
        std::size_t cut_b = rng.below(rb.size() + 1);
        auto append_retargeted = [&](const InvokeAction& inv) {
            InvokeAction copy = inv;
            if (copy.label) {
                // bind to the child's instance of the same class
                std::string cls = class_of_label(left, *copy.label);
                if (cls.empty()) cls = class_of_label(right, *copy.label);
                auto it = labels.find(cls);
                if (it == labels.end()) return;
                copy.label = it->second;
            }
            child.actions.emplace_back(std::move(copy));
        };
        for (std::size_t i = 0; i < cut_a; ++i) append_retargeted(la[i]);
        for (std::size_t j = cut_b; j < rb.size(); ++j) append_retargeted(rb[j]);
        ensure_uut_invokes(child, labels, rng);
        close(child);
        return child;
    }

private:
    const Program& target_;
    std::vector<EntityId> uuts_;
    const std::vector<std::int64_t>& pool_;
    std::map<std::string, const ClassDef*> classes_;
    std::vector<MethodSlot> methods_;  // all methods of UUT classes
    std::vector<MethodSlot> toplevel_; // top-level UUT functions

    static std::string class_of_label(const TestCase& t, const std::string& label) {
        for (const auto& action : t.actions)
            if (const auto* c = std::get_if<ConstructAction>(&action))
                if (c->label == label) return c->class_name;
        return "";
    }

    static std::map<std::string, std::string> labels_of(const TestCase& t) {
        std::map<std::string, std::string> labels;
        for (const auto& action : t.actions)
            if (const auto* c = std::get_if<ConstructAction>(&action))
                if (!labels.count(c->class_name)) labels[c->class_name] = c->label;
        return labels;
    }

    Value random_arg(const Type& type, Rng& rng) {
        if (type.kind == Type::Kind::bool_t) return bool_value(rng.below(2) == 0);
        return int_value(pool_[rng.below(pool_.size())]);
    }

    std::vector<Value> random_args(const MethodDef& m, Rng& rng) {
        std::vector<Value> args;
        for (const auto& p : m.params) args.push_back(random_arg(p.type, rng));
        return args;
    }

    void construct(TestCase& test, const std::string& class_name, const ClassDef& cls,
                   std::map<std::string, std::string>& labels, Rng& rng) {
        ConstructAction c;
        c.class_name = class_name;
        c.label = "o" + std::to_string(next_label_++);
        if (cls.constructor) c.args = random_args(*cls.constructor, rng);
        if (!labels.count(class_name)) labels[class_name] = c.label;
        test.actions.emplace_back(std::move(c));
    }

    InvokeAction make_invoke(const MethodSlot& slot,
                             const std::map<std::string, std::string>& labels, Rng& rng) {
        InvokeAction inv;
        if (!slot.class_name.empty()) inv.label = labels.at(slot.class_name);
        inv.method = slot.def->name;
        inv.args = random_args(*slot.def, rng);
        inv.observe = slot.def->return_type.kind != Type::Kind::void_t;
        return inv;
    }

    void append_random_invoke(TestCase& test, const std::map<std::string, std::string>& labels,
                              Rng& rng) {
        append_random_invoke_at(test, labels, rng, test.actions.size());
    }

    void append_random_invoke_at(TestCase& test, const std::map<std::string, std::string>& labels,
                                 Rng& rng, std::size_t pos) {
        std::vector<MethodSlot> pool = methods_;
        pool.insert(pool.end(), toplevel_.begin(), toplevel_.end());
        if (pool.empty()) return;
        const MethodSlot& slot = pool[rng.below(pool.size())];
        if (!slot.class_name.empty() && !labels.count(slot.class_name)) return;
        InvokeAction inv = make_invoke(slot, labels, rng);
        pos = std::min(pos, test.actions.size());
        // an invoke may not precede its label's construct action
        std::size_t min_pos = 0;
        if (inv.label) {
            for (std::size_t i = 0; i < test.actions.size(); ++i) {
                if (const auto* c = std::get_if<ConstructAction>(&test.actions[i])) {
                    if (c->label == *inv.label) {
                        min_pos = i + 1;
                        break;
                    }
                }
            }
        }
        pos = std::max(pos, min_pos);
        test.actions.emplace(test.actions.begin() + static_cast<std::ptrdiff_t>(pos),
                             std::move(inv));
    }

    void perturb_argument(TestCase& test, Rng& rng) {
        std::vector<std::pair<std::size_t, std::size_t>> slots; // (action, arg index)
        for (std::size_t i = 0; i < test.actions.size(); ++i) {
            const std::vector<Value>* args = nullptr;
            if (const auto* c = std::get_if<ConstructAction>(&test.actions[i])) args = &c->args;
            if (const auto* v = std::get_if<InvokeAction>(&test.actions[i])) args = &v->args;
            if (!args) continue;
            for (std::size_t j = 0; j < args->size(); ++j) slots.emplace_back(i, j);
        }
        if (slots.empty()) return;
        auto [ai, ji] = slots[rng.below(slots.size())];
        auto perturb = [&](std::vector<Value>& args) {
            if (std::holds_alternative<bool>(args[ji]))
                args[ji] = bool_value(!std::get<bool>(args[ji]));
            else
                args[ji] = int_value(pool_[rng.below(pool_.size())]);
        };
        if (auto* c = std::get_if<ConstructAction>(&test.actions[ai])) perturb(c->args);
        if (auto* v = std::get_if<InvokeAction>(&test.actions[ai])) perturb(v->args);
    }

    void remove_random_invoke(TestCase& test, Rng& rng) {
        std::vector<std::size_t> invokes;
        for (std::size_t i = 0; i < test.actions.size(); ++i)
            if (std::holds_alternative<InvokeAction>(test.actions[i])) invokes.push_back(i);
        if (invokes.size() <= 1) return;
        std::size_t victim = invokes[rng.below(invokes.size())];
        test.actions.erase(test.actions.begin() + static_cast<std::ptrdiff_t>(victim));
    }

    void swap_random_invokes(TestCase& test, Rng& rng) {
        std::vector<std::size_t> invokes;
        for (std::size_t i = 0; i < test.actions.size(); ++i)
            if (std::holds_alternative<InvokeAction>(test.actions[i])) invokes.push_back(i);
        if (invokes.size() < 2) return;
        std::size_t x = invokes[rng.below(invokes.size())];
        std::size_t y = invokes[rng.below(invokes.size())];
        std::swap(test.actions[x], test.actions[y]);
    }

    // Each UUT must be exercised: methods and functions by an invoke,
    // constructors by a construct of their class.
    void ensure_uut_invokes(TestCase& test, const std::map<std::string, std::string>& labels_in,
                            Rng& rng) {
        std::map<std::string, std::string> labels = labels_in;
        for (const auto& [name, cls] : classes_) {
            if (!labels.count(name)) construct(test, name, *cls, labels, rng);
        }
        for (const auto& id : uuts_) {
            if (id.kind == EntityKind::constructor) continue; // construct above covers it
            bool present = false;
            for (const auto& action : test.actions) {
                const auto* inv = std::get_if<InvokeAction>(&action);
                if (!inv || inv->method != id.name ||
                    static_cast<int>(inv->args.size()) != id.arity)
                    continue;
                std::string cls =
                    inv->label ? class_of_label(test, *inv->label) : std::string{};
                if (cls == id.class_name) {
                    present = true;
                    break;
                }
            }
            if (present) continue;
            const MethodDef* def =
                id.class_name.empty()
                    ? target_.find_function(id.name, id.arity)
                    : (target_.find_class(id.class_name)
                           ? target_.find_class(id.class_name)->find_method(id.name, id.arity)
                           : nullptr);
            if (!def) continue;
            MethodSlot slot{id.class_name, def};
            if (!id.class_name.empty() && !labels.count(id.class_name)) continue;
            test.actions.emplace_back(make_invoke(slot, labels, rng));
        }
    }

    static TestCase strip_observations(const TestCase& original) {
        TestCase test;
        test.gen_seed = original.gen_seed;
        for (const auto& action : original.actions)
            if (!std::holds_alternative<ObserveFieldAction>(action)) test.actions.push_back(action);
        return test;
    }

    // Append one ObserveField per field of every constructed object, from the
    // generation target's class definitions, and renumber nothing: points are
    // derived from final action indices.
    void close(TestCase& test) {
        std::vector<std::pair<std::string, std::string>> observed; // (label, class)
        for (const auto& action : test.actions)
            if (const auto* c = std::get_if<ConstructAction>(&action))
                observed.emplace_back(c->label, c->class_name);
        for (const auto& [label, class_name] : observed) {
            const ClassDef* cls = target_.find_class(class_name);
            if (!cls) continue;
            for (const auto& f : cls->fields)
                test.actions.emplace_back(ObserveFieldAction{label, f.name});
        }
    }

    int next_label_ = 0;
};

struct Goals {
    // per role: target-version diff lines as (file, line)
    std::map<std::string, std::set<std::pair<std::string, int>>> per_variant;
    std::set<std::pair<std::string, int>> all;

    bool empty() const { return all.empty(); }
};

// Files containing the UUTs or anything in their impact closure (taken to a
// fixpoint) bound the diff-line goals.
std::set<std::string> relevant_files(const Program& target, const std::vector<EntityId>& uuts) {
    DependencyGraph graph = extract_dependencies(target);
    std::set<EntityId> closure(uuts.begin(), uuts.end());
    bool grew = true;
    while (grew) {
        grew = false;
        std::set<EntityId> next = closure;
        for (const auto& id : closure) {
            for (const auto& n : get_impacted(graph, id)) next.insert(n);
            if (id.kind == EntityKind::method)
                for (const auto& f : graph.written_fields(id)) next.insert(f);
        }
        if (next.size() != closure.size()) {
            closure = std::move(next);
            grew = true;
        }
    }
    std::set<std::string> files;
    for (const auto& id : closure)
        if (const Span* span = entity_span(target, id)) files.insert(span->file);
    return files;
}

Goals compute_goals(const MergeScenario& scenario, const std::string& target_role,
                    const Program& target, const std::vector<EntityId>& uuts) {
    Goals goals;
    std::set<std::string> files = relevant_files(target, uuts);
    for (const auto& [role, program] : scenario.all_versions()) {
        if (role == target_role) continue;
        std::set<std::pair<std::string, int>> lines;
        for (const auto& [file, nums] : diff_lines(*program, target)) {
            if (!files.count(file)) continue;
            for (int n : nums) lines.insert({file, n});
        }
        goals.all.insert(lines.begin(), lines.end());
        goals.per_variant[role] = std::move(lines);
    }
    return goals;
}

struct Evaluation {
    ExecutionResult target_result;
    std::map<std::string, ExecutionResult> version_results; // incl. substituted
    std::set<std::string> executed_roles;                   // really run
    std::map<std::string, double> coverage;                 // goal fraction per role
    double fitness = 0.0;
};

// Static branch sites inside UUT bodies, for the multi-criteria mode.
std::set<std::pair<std::string, int>> uut_branch_sites(const Program& target,
                                                       const std::vector<EntityId>& uuts) {
    std::set<std::pair<std::string, int>> sites;
    auto scan = [&](const std::vector<StmtPtr>& body, auto&& self) -> void {
        for (const auto& s : body) {
            if (const auto* i = std::get_if<IfStmt>(&s->node)) {
                sites.insert({s->span.file, s->span.first_line});
                self(i->then_body, self);
                self(i->else_body, self);
            } else if (const auto* w = std::get_if<WhileStmt>(&s->node)) {
                sites.insert({s->span.file, s->span.first_line});
                self(w->body, self);
            }
        }
    };
    for (const auto& id : uuts) {
        if (id.class_name.empty()) {
            if (const MethodDef* fn = target.find_function(id.name, id.arity))
                scan(fn->body, scan);
        } else if (const ClassDef* cls = target.find_class(id.class_name)) {
            if (id.kind == EntityKind::constructor && cls->constructor)
                scan(cls->constructor->body, scan);
            else if (const MethodDef* m = cls->find_method(id.name, id.arity))
                scan(m->body, scan);
        }
    }
    return sites;
}

class TargetSearch {
public:
    TargetSearch(const MergeScenario& scenario, const std::string& target_role,
                 const UutSelection& selection, const GenConfig& config)
        : scenario_(scenario),
          target_role_(target_role),
          target_(scenario.version_by_role(target_role)),
          selection_(selection),
          config_(config),
          builder_(*target_, selection.entities(), config.int_pool),
          rng_(config.seed ^ fnv1a(target_role)) {
        goals_ = compute_goals(scenario_, target_role_, *target_, selection_.entities());
        branch_sites_ = uut_branch_sites(*target_, selection_.entities());
        uut_method_total_ = 0;
        std::set<std::string> uut_classes;
        for (const auto& id : selection_.entities())
            if (!id.class_name.empty()) uut_classes.insert(id.class_name);
        for (const auto& cls_name : uut_classes)
            if (const ClassDef* cls = target_->find_class(cls_name))
                uut_method_total_ += static_cast<int>(cls->methods.size());
        for (const auto& id : selection_.entities())
            if (id.class_name.empty()) ++uut_method_total_;
    }

    TargetResult run() {
        TargetResult result;
        result.role = target_role_;
        result.uuts = selection_.uuts;
        result.fallback_used = selection_.fallback_used;
        for (const auto& [role, lines] : goals_.per_variant) {
            result.stats.goal_counts[role] = static_cast<int>(lines.size());
            result.stats.max_diff_coverage[role] = 0.0;
            result.stats.variant_executions[role] = 0;
        }
        if (selection_.empty() || !builder_.viable()) {
            result.skipped_reason = "no_uuts";
            return result;
        }
        if (goals_.empty()) return result; // no diff lines: nothing can conflict

        std::vector<TestCase> population;
        for (int i = 0; i < config_.population_size; ++i)
            population.push_back(builder_.random_test(rng_));

        std::vector<double> fitness(population.size(), 0.0);
        bool stop = false;
        while (!stop && result.stats.candidates_evaluated < config_.search_budget) {
            std::vector<Evaluation> evals = evaluate_batch(population);
            for (std::size_t i = 0; i < population.size() && !stop; ++i) {
                if (result.stats.candidates_evaluated >= config_.search_budget) break;
                ++result.stats.candidates_evaluated;
                integrate(population[i], evals[i], result);
                fitness[i] = evals[i].fitness;
                if (config_.stop_on_first_conflict && !result.conflicts.empty()) stop = true;
            }
            if (stop || result.stats.candidates_evaluated >= config_.search_budget) break;
            population = next_generation(population, fitness);
        }
        return result;
    }

private:
    const MergeScenario& scenario_;
    std::string target_role_;
    ProgramPtr target_;
    const UutSelection& selection_;
    const GenConfig& config_;
    TestBuilder builder_;
    Rng rng_;
    Goals goals_;
    std::set<std::pair<std::string, int>> branch_sites_;
    int uut_method_total_ = 0;
    std::set<std::string> seen_conflicts_;
    std::set<std::string> seen_exceptions_;
    std::uint64_t iteration_ = 0;

    static constexpr int kMaxExceptionTests = 25;

    std::vector<std::string> counterpart_roles() const {
        std::vector<std::string> roles;
        if (target_role_ == "merge") {
            for (std::size_t i = 0; i < scenario_.parents.size(); ++i)
                roles.push_back("parent" + std::to_string(i + 1));
        } else {
            roles.push_back("ancestor");
            roles.push_back("merge");
        }
        return roles;
    }

    Evaluation evaluate(const TestCase& test) const {
        Evaluation ev;
        ev.target_result = run_test(*target_, test, config_.exec_budget);

        std::size_t hit = 0;
        for (const auto& goal : goals_.all)
            if (ev.target_result.covered_lines.count(goal)) ++hit;
        double covered_all = goals_.all.empty()
                                 ? 0.0
                                 : static_cast<double>(hit) /
                                       static_cast<double>(goals_.all.size());

        for (const auto& [role, program] : scenario_.all_versions()) {
            if (role == target_role_) continue;
            const auto& lines = goals_.per_variant.at(role);
            std::size_t covered = 0;
            for (const auto& goal : lines)
                if (ev.target_result.covered_lines.count(goal)) ++covered;
            ev.coverage[role] =
                lines.empty() ? 0.0
                              : static_cast<double>(covered) / static_cast<double>(lines.size());
            if (covered > 0) {
                // the candidate reaches changed lines: execute for real
                ev.version_results[role] = run_test(*program, test, config_.exec_budget);
                ev.executed_roles.insert(role);
            } else {
                // no changed line covered: this version's behavior on the
                // test provably matches the target's, reuse it
                ev.version_results[role] = ev.target_result;
            }
        }

        ev.fitness = covered_all;
        if (config_.criteria == GenConfig::Criteria::multi) {
            double branch = 0.0;
            if (!branch_sites_.empty()) {
                std::size_t outcomes = 0;
                for (const auto& b : ev.target_result.covered_branches)
                    if (branch_sites_.count({b.file, b.line})) ++outcomes;
                branch = static_cast<double>(outcomes) /
                         static_cast<double>(branch_sites_.size() * 2);
            }
            double method = 0.0;
            if (uut_method_total_ > 0) {
                int entered = 0;
                for (const auto& id : ev.target_result.entered_entities)
                    if (id.kind == EntityKind::method) ++entered;
                method = std::min(1.0, static_cast<double>(entered) /
                                           static_cast<double>(uut_method_total_));
            }
            double exceptions = 0.0;
            if (!test.actions.empty()) {
                int raised = 0;
                for (const auto& [pt, v] : ev.target_result.valuation.slots)
                    if (pt.kind == ObservationPoint::Kind::exception_marker && is_exception(v))
                        ++raised;
                exceptions = static_cast<double>(raised) /
                             static_cast<double>(test.actions.size());
            }
            ev.fitness = (covered_all + branch + method + exceptions) / 4.0;
        }
        return ev;
    }

    std::vector<Evaluation> evaluate_batch(const std::vector<TestCase>& batch) const {
        std::vector<Evaluation> evals(batch.size());
        unsigned jobs = config_.jobs > 0 ? static_cast<unsigned>(config_.jobs)
                                         : std::max(1u, std::thread::hardware_concurrency());
        jobs = std::min<unsigned>(jobs, static_cast<unsigned>(batch.size()));
        if (jobs <= 1) {
            for (std::size_t i = 0; i < batch.size(); ++i) evals[i] = evaluate(batch[i]);
            return evals;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= batch.size()) return;
                    evals[i] = evaluate(batch[i]);
                }
            });
        }
        for (auto& t : workers) t.join();
        return evals;
    }

    void integrate(const TestCase& candidate, const Evaluation& ev, TargetResult& result) {
        ++iteration_;
        for (const auto& [role, frac] : ev.coverage)
            result.stats.max_diff_coverage[role] =
                std::max(result.stats.max_diff_coverage[role], frac);
        for (const auto& role : ev.executed_roles) ++result.stats.variant_executions[role];

        bool covered_any = false;
        for (const auto& goal : goals_.all)
            if (ev.target_result.covered_lines.count(goal)) {
                covered_any = true;
                break;
            }
        if (!covered_any) return;

        if (ev.target_result.terminated.kind == TerminationKind::exception) {
            // left to developers: the exception may itself be the regression
            if (static_cast<int>(result.exception_tests.size()) < kMaxExceptionTests) {
                TestCase flagged = candidate;
                flagged.gen_seed = config_.seed;
                flagged.gen_iteration = iteration_;
                if (seen_exceptions_.insert(serialize_mlgtest(flagged)).second) {
                    result.exception_tests.push_back({flagged,
                                                      ev.target_result.terminated.exc,
                                                      ev.target_result.terminated.action_index});
                }
            }
            return;
        }

        auto counterparts = counterpart_roles();
        std::optional<OracleVerdict> verdict;
        if (target_role_ == "merge") {
            std::vector<ExecutionValuation> parents;
            for (const auto& role : counterparts)
                parents.push_back(ev.version_results.at(role).valuation);
            verdict = unexpected_behavior(ev.target_result.valuation, parents);
        } else if (scenario_.has_ancestor()) {
            int parent_index = std::stoi(target_role_.substr(6));
            verdict = lost_behavior(ev.target_result.valuation,
                                    ev.version_results.at("ancestor").valuation,
                                    ev.version_results.at("merge").valuation, parent_index);
        }
        if (!verdict) return;

        std::vector<std::pair<std::string, ExecutionResult>> counterpart_results;
        for (const auto& role : counterparts)
            counterpart_results.emplace_back(role, ev.version_results.at(role));
        auto assertions = synthesize_assertions(ev.target_result, counterpart_results, candidate);

        // conflict-qualifying: supported by every counterpart version
        std::vector<AttributedAssertion> qualifying;
        for (const auto& a : assertions)
            if (a.supporting_roles.size() == counterparts.size()) qualifying.push_back(a);
        if (qualifying.empty()) return;

        TestCase conflict_test = candidate;
        conflict_test.gen_seed = config_.seed;
        conflict_test.gen_iteration = iteration_;
        conflict_test.assertions.clear();
        for (const auto& a : qualifying) conflict_test.assertions.push_back(a.assertion);

        std::string key = serialize_mlgtest(conflict_test);
        if (seen_conflicts_.count(key)) return;

        std::vector<ProgramPtr> versions;
        for (const auto& [role, program] : scenario_.all_versions()) versions.push_back(program);
        if (!check_stability(conflict_test, versions, config_.stability_runs,
                             config_.exec_budget))
            return;

        seen_conflicts_.insert(key);
        ConflictTest ct;
        ct.test = std::move(conflict_test);
        ct.verdict = *verdict;
        ct.assertions = std::move(qualifying);
        if (scenario_.kind == MergeKind::three_way) {
            ct.witnesses = classify_violations(ev.version_results.at("ancestor").valuation,
                                               ev.version_results.at("parent1").valuation,
                                               ev.version_results.at("parent2").valuation,
                                               target_role_ == "merge"
                                                   ? ev.target_result.valuation
                                                   : ev.version_results.at("merge").valuation);
        }
        result.conflicts.push_back(std::move(ct));
    }

    std::vector<TestCase> next_generation(const std::vector<TestCase>& population,
                                          const std::vector<double>& fitness) {
        std::vector<TestCase> next;
        next.reserve(population.size());
        // elitism: keep the single best candidate (first on ties)
        std::size_t best = 0;
        for (std::size_t i = 1; i < population.size(); ++i)
            if (fitness[i] > fitness[best]) best = i;
        next.push_back(population[best]);

        auto tournament = [&]() -> const TestCase& {
            std::size_t a = rng_.below(population.size());
            std::size_t b = rng_.below(population.size());
            return fitness[a] >= fitness[b] ? population[a] : population[b];
        };
        while (next.size() < population.size()) {
            if (rng_.chance(0.3)) {
                next.push_back(builder_.crossover(tournament(), tournament(), rng_));
            } else if (rng_.chance(config_.mutation_rate)) {
                next.push_back(builder_.mutate_test(tournament(), rng_));
            } else {
                next.push_back(builder_.random_test(rng_));
            }
        }
        return next;
    }
};

} // namespace

TargetResult generate_for_target(const MergeScenario& scenario, const std::string& target_role,
                                 const UutSelection& selection, const GenConfig& config) {
    TargetSearch search(scenario, target_role, selection, config);
    return search.run();
}

ConflictReport detect(const MergeScenario& scenario, const GenConfig& config,
                      const SelectionConfig& selection_config) {
    ConflictReport report;
    report.scenario_id = scenario.id;
    report.scenario_kind = scenario.kind;

    bool found_conflict = false;
    for (const auto& role : scenario.target_roles()) {
        TargetResult result;
        result.role = role;
        if (role != "merge" && !scenario.has_ancestor()) {
            // Def. 3.1(2) needs the common original
            result.skipped_reason = "no_ancestor";
            report.targets.push_back(std::move(result));
            continue;
        }
        if (found_conflict && config.stop_on_first_conflict) {
            result.skipped_reason = "stopped_early";
            report.targets.push_back(std::move(result));
            continue;
        }
        ProgramPtr target = scenario.version_by_role(role);
        std::vector<ProgramPtr> variants;
        for (const auto& [vrole, program] : scenario.all_versions())
            if (vrole != role) variants.push_back(program);
        UutSelection selection = select_uuts(*target, variants, selection_config);
        result = generate_for_target(scenario, role, selection, config);
        found_conflict = found_conflict || !result.conflicts.empty();
        report.targets.push_back(std::move(result));
    }
    return report;
}

} // namespace tom
