#ifndef TOM_ORACLE_HPP
#define TOM_ORACLE_HPP

#include <optional>
#include <set>
#include <vector>

#include "tom/interp.hpp"
#include "tom/testcase.hpp"

namespace tom {

// Thrown when valuations being compared do not share one point list.
struct ValuationMismatch {
    const char* what = "valuations do not share an observation-point list";
};

bool same_point_list(const ExecutionValuation& a, const ExecutionValuation& b);

// chi-1 pointwise: o != a implies a == m; chi-2 analogous with b.
// Original chi-3: o == a == b == m at every slot.
// Revised chi-3: o == a == b implies o == m, per slot.

// True iff (chi1 and chi2) or original chi3 holds over all slots. This is the
// earlier verification condition; the (o==a==b, m different) shape passes it.
bool check_conflict_free_original(const ExecutionValuation& o, const ExecutionValuation& a,
                                  const ExecutionValuation& b, const ExecutionValuation& m);

// True iff chi1 and chi2 and revised chi3 hold over all slots; strictly
// stronger than the original check.
bool check_conflict_free_revised(const ExecutionValuation& o, const ExecutionValuation& a,
                                 const ExecutionValuation& b, const ExecutionValuation& m);

struct ViolationWitness {
    enum class Kind { neg_chi1, neg_chi2, neg_chi3_prime };
    Kind kind = Kind::neg_chi1;
    int variant_index = 0; // 1 for neg_chi1 (variant a), 2 for neg_chi2 (variant b)
    int slot = 0;
    Value o, a, b, m;

    bool operator==(const ViolationWitness&) const = default;
};

std::string violation_kind_name(ViolationWitness::Kind k);

// Per slot i: neg_chi1 when o!=a and a!=m; neg_chi2 when o!=b and b!=m;
// neg_chi3' when a!=m and m!=b. Empty exactly when the revised check passes.
std::vector<ViolationWitness> classify_violations(const ExecutionValuation& o,
                                                  const ExecutionValuation& a,
                                                  const ExecutionValuation& b,
                                                  const ExecutionValuation& m);

struct OracleVerdict {
    enum class Kind { unexpected_behavior, lost_behavior };
    Kind kind = Kind::unexpected_behavior;
    int parent_index = 0; // lost_behavior: which parent's change went missing
    std::set<int> witness_slots;
    Assertion assertion; // pinned to the generation target's observed value

    bool operator==(const OracleVerdict&) const = default;
};

// Witness slots: every i where the target's value differs from every parent's
// value. The attached assertion takes the first witness slot whose target
// value is a real observation; when no witness slot has one, there is nothing
// assertable and no verdict is produced.
std::optional<OracleVerdict> unexpected_behavior(const ExecutionValuation& target,
                                                 const std::vector<ExecutionValuation>& parents);

// Witness slots: every i where variant differs from the ancestor and from the
// merge — the variant's new behavior vanished from the merge.
std::optional<OracleVerdict> lost_behavior(const ExecutionValuation& variant,
                                           const ExecutionValuation& ancestor,
                                           const ExecutionValuation& merge, int parent_index = 0);

} // namespace tom

#endif
