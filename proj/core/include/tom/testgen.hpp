#ifndef TOM_TESTGEN_HPP
#define TOM_TESTGEN_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tom/interp.hpp"
#include "tom/oracle.hpp"
#include "tom/scenario.hpp"
#include "tom/uut_select.hpp"

namespace tom {

struct GenConfig {
    enum class Criteria { diff_line, multi };

    std::uint64_t seed = 1;
    long long exec_budget = kDefaultStepBudget; // interpreter steps per run
    int search_budget = 2000;                   // candidate evaluations per target
    int population_size = 24;
    double mutation_rate = 0.7;
    Criteria criteria = Criteria::diff_line;
    int stability_runs = 5;
    std::vector<std::int64_t> int_pool = default_int_pool();
    bool stop_on_first_conflict = true;
    int jobs = 0; // 0 = available hardware parallelism

    static std::vector<std::int64_t> default_int_pool();

    bool operator==(const GenConfig&) const = default;
};

std::string criteria_name(GenConfig::Criteria c);
std::optional<GenConfig::Criteria> criteria_from_name(const std::string& name);

struct AttributedAssertion {
    Assertion assertion;
    std::set<std::string> supporting_roles; // versions whose value differs
    std::string action_repr;                // readable form of the asserted action

    bool operator==(const AttributedAssertion&) const = default;
};

// Assertions on every observation point where the target's value differs
// from a variant's value, pinned to the target's value and attributed to the
// disagreeing variants. Results from variants that raised exceptions differ
// on the throwing action's points, so those are covered by the same rule.
std::vector<AttributedAssertion> synthesize_assertions(
    const ExecutionResult& target_result,
    const std::vector<std::pair<std::string, ExecutionResult>>& variant_results,
    const TestCase& test);

struct ConflictTest {
    TestCase test; // qualifying assertions included, replayable standalone
    OracleVerdict verdict;
    std::vector<AttributedAssertion> assertions; // the qualifying subset
    std::vector<ViolationWitness> witnesses;     // three-way scenarios only

    bool operator==(const ConflictTest&) const = default;
};

struct ExceptionTest {
    TestCase test;
    ExcKind kind = ExcKind::none;
    int action_index = -1;

    bool operator==(const ExceptionTest&) const = default;
};

struct SearchStats {
    int candidates_evaluated = 0;
    std::map<std::string, int> variant_executions;     // real runs per role
    std::map<std::string, double> max_diff_coverage;   // best goal fraction per role
    std::map<std::string, int> goal_counts;            // diff-line goals per role

    bool operator==(const SearchStats&) const = default;
};

struct TargetResult {
    std::string role;
    std::vector<UutEntry> uuts;
    bool fallback_used = false;
    std::string skipped_reason; // "", "no_ancestor", "no_uuts", "stopped_early"
    std::vector<ConflictTest> conflicts;
    std::vector<ExceptionTest> exception_tests;
    SearchStats stats;

    bool operator==(const TargetResult&) const = default;
};

struct ConflictReport {
    std::string scenario_id;
    MergeKind scenario_kind = MergeKind::three_way;
    std::vector<TargetResult> targets;

    int total_conflicts() const;
    bool operator==(const ConflictReport&) const = default;
};

using TestRunner =
    std::function<ExecutionResult(const Program&, const TestCase&, long long budget)>;

// True iff `runs` executions per version all reproduce identical results.
// The runner seam exists so tests can inject nondeterminism.
bool check_stability(const TestCase& test, const std::vector<ProgramPtr>& versions, int runs,
                     long long budget, const TestRunner& runner = nullptr);

// Coverage-guided evolutionary search for tests over the selected UUTs of one
// generation target. Diff-line goals are the target lines differing from each
// other version, restricted to files containing UUTs or their impact closure;
// a candidate that covers no diff line against a version is not re-executed
// on that version (its results provably match the target's).
TargetResult generate_for_target(const MergeScenario& scenario, const std::string& target_role,
                                 const UutSelection& selection, const GenConfig& config);

// Full workflow over one scenario: targets in order {merge, parent1, ...,
// parentN}; merge verdicts come from unexpected_behavior against all parents,
// parent verdicts from lost_behavior against ancestor and merge (parents are
// skipped with reason no_ancestor in 2-way scenarios). UUTs are recomputed
// per target with all other versions as variants.
ConflictReport detect(const MergeScenario& scenario, const GenConfig& config,
                      const SelectionConfig& selection);

} // namespace tom

#endif
