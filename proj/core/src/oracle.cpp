#include "tom/oracle.hpp"

namespace tom {

bool same_point_list(const ExecutionValuation& a, const ExecutionValuation& b) {
    if (a.slots.size() != b.slots.size()) return false;
    for (std::size_t i = 0; i < a.slots.size(); ++i)
        if (!(a.slots[i].first == b.slots[i].first)) return false;
    return true;
}

namespace {

void require_same_points(const ExecutionValuation& a, const ExecutionValuation& b) {
    if (!same_point_list(a, b)) throw ValuationMismatch{};
}

const Value& at(const ExecutionValuation& v, std::size_t i) { return v.slots[i].second; }

} // namespace

bool check_conflict_free_original(const ExecutionValuation& o, const ExecutionValuation& a,
                                  const ExecutionValuation& b, const ExecutionValuation& m) {
    require_same_points(o, a);
    require_same_points(o, b);
    require_same_points(o, m);
    bool chi1 = true, chi2 = true, chi3 = true;
    for (std::size_t i = 0; i < o.slots.size(); ++i) {
        const Value &ov = at(o, i), &av = at(a, i), &bv = at(b, i), &mv = at(m, i);
        if (ov != av && av != mv) chi1 = false;
        if (ov != bv && bv != mv) chi2 = false;
        if (!(ov == av && av == bv && bv == mv)) chi3 = false;
    }
    return (chi1 && chi2) || chi3;
}

bool check_conflict_free_revised(const ExecutionValuation& o, const ExecutionValuation& a,
                                 const ExecutionValuation& b, const ExecutionValuation& m) {
    require_same_points(o, a);
    require_same_points(o, b);
    require_same_points(o, m);
    for (std::size_t i = 0; i < o.slots.size(); ++i) {
        const Value &ov = at(o, i), &av = at(a, i), &bv = at(b, i), &mv = at(m, i);
        if (ov != av && av != mv) return false;            // not chi1
        if (ov != bv && bv != mv) return false;            // not chi2
        if (ov == av && av == bv && ov != mv) return false; // not revised chi3
    }
    return true;
}

std::string violation_kind_name(ViolationWitness::Kind k) {
    switch (k) {
        case ViolationWitness::Kind::neg_chi1: return "neg_chi1";
        case ViolationWitness::Kind::neg_chi2: return "neg_chi2";
        case ViolationWitness::Kind::neg_chi3_prime: return "neg_chi3_prime";
    }
    return "neg_chi1";
}

std::vector<ViolationWitness> classify_violations(const ExecutionValuation& o,
                                                  const ExecutionValuation& a,
                                                  const ExecutionValuation& b,
                                                  const ExecutionValuation& m) {
    require_same_points(o, a);
    require_same_points(o, b);
    require_same_points(o, m);
    std::vector<ViolationWitness> witnesses;
    for (std::size_t i = 0; i < o.slots.size(); ++i) {
        const Value &ov = at(o, i), &av = at(a, i), &bv = at(b, i), &mv = at(m, i);
        auto emit = [&](ViolationWitness::Kind kind, int variant) {
            ViolationWitness w;
            w.kind = kind;
            w.variant_index = variant;
            w.slot = static_cast<int>(i);
            w.o = ov;
            w.a = av;
            w.b = bv;
            w.m = mv;
            witnesses.push_back(std::move(w));
        };
        if (ov != av && av != mv) emit(ViolationWitness::Kind::neg_chi1, 1);
        if (ov != bv && bv != mv) emit(ViolationWitness::Kind::neg_chi2, 2);
        if (av != mv && mv != bv) emit(ViolationWitness::Kind::neg_chi3_prime, 0);
    }
    return witnesses;
}

namespace {

std::optional<OracleVerdict> make_verdict(OracleVerdict::Kind kind, int parent_index,
                                          const ExecutionValuation& target,
                                          std::set<int>&& slots) {
    if (slots.empty()) return std::nullopt;
    OracleVerdict verdict;
    verdict.kind = kind;
    verdict.parent_index = parent_index;
    verdict.witness_slots = std::move(slots);
    for (int slot : verdict.witness_slots) {
        const auto& [point, value] = target.slots[static_cast<std::size_t>(slot)];
        if (is_unobserved(value)) continue;
        verdict.assertion = {point, value};
        return verdict;
    }
    // every witness slot is unobserved on the target: nothing assertable
    return std::nullopt;
}

} // namespace

std::optional<OracleVerdict> unexpected_behavior(const ExecutionValuation& target,
                                                 const std::vector<ExecutionValuation>& parents) {
    for (const auto& p : parents) require_same_points(target, p);
    std::set<int> slots;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        bool differs_from_all = !parents.empty();
        for (const auto& p : parents) {
            if (at(target, i) == at(p, i)) {
                differs_from_all = false;
                break;
            }
        }
        if (differs_from_all) slots.insert(static_cast<int>(i));
    }
    return make_verdict(OracleVerdict::Kind::unexpected_behavior, 0, target, std::move(slots));
}

std::optional<OracleVerdict> lost_behavior(const ExecutionValuation& variant,
                                           const ExecutionValuation& ancestor,
                                           const ExecutionValuation& merge, int parent_index) {
    require_same_points(variant, ancestor);
    require_same_points(variant, merge);
    std::set<int> slots;
    for (std::size_t i = 0; i < variant.slots.size(); ++i) {
        if (at(variant, i) != at(ancestor, i) && at(variant, i) != at(merge, i))
            slots.insert(static_cast<int>(i));
    }
    return make_verdict(OracleVerdict::Kind::lost_behavior, parent_index, variant,
                        std::move(slots));
}

} // namespace tom
