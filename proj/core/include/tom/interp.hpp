#ifndef TOM_INTERP_HPP
#define TOM_INTERP_HPP

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tom/ast.hpp"
#include "tom/entity.hpp"
#include "tom/testcase.hpp"
#include "tom/value.hpp"

namespace tom {

inline constexpr long long kDefaultStepBudget = 100000;
inline constexpr int kMaxCallDepth = 512;

struct ExecutionValuation {
    // Slot order is the test's observation-point order.
    std::vector<std::pair<ObservationPoint, Value>> slots;

    bool operator==(const ExecutionValuation&) const = default;
    const Value* value_at(const ObservationPoint& p) const;
};

enum class TerminationKind { normal, exception, budget_exhausted };

struct Termination {
    TerminationKind kind = TerminationKind::normal;
    ExcKind exc = ExcKind::none; // set when kind == exception
    int action_index = -1;       // action that raised / exhausted

    bool operator==(const Termination&) const = default;
};

struct BranchOutcome {
    std::string file;
    int line = 0;
    bool taken = false;

    auto operator<=>(const BranchOutcome&) const = default;
};

struct ExecutionResult {
    ExecutionValuation valuation;
    std::set<std::pair<std::string, int>> covered_lines; // (file, 1-based line)
    long long steps_used = 0;
    Termination terminated;
    // Extra trace feeds for the multi-criteria fitness mode.
    std::set<BranchOutcome> covered_branches;
    std::set<EntityId> entered_entities;

    bool operator==(const ExecutionResult&) const = default;
};

// Deterministic execution of one test against one program version. Failures
// are encoded in the result, never thrown: unresolvable test references
// produce Exc(LinkError) observations and execution continues; MiniLang
// runtime exceptions abort the test (later slots stay Unobserved); exceeding
// the step budget terminates with budget_exhausted and steps_used == budget.
ExecutionResult run_test(const Program& program, const TestCase& test,
                         long long budget = kDefaultStepBudget);

// Assertion evaluation on a finished run. An assertion holds iff the slot
// exists and its value equals the expected value exactly.
struct AssertionOutcome {
    Assertion assertion;
    Value actual;
    bool passed = false;
};

std::vector<AssertionOutcome> evaluate_assertions(const TestCase& test,
                                                  const ExecutionResult& result);
bool all_assertions_pass(const TestCase& test, const ExecutionResult& result);

} // namespace tom

#endif
