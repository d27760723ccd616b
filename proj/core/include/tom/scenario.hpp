#ifndef TOM_SCENARIO_HPP
#define TOM_SCENARIO_HPP

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tom/ast.hpp"
#include "tom/diffing.hpp"
#include "tom/entity.hpp"
#include "tom/testcase.hpp"

namespace tom {

enum class MergeKind { two_way, three_way, octopus };

std::string merge_kind_name(MergeKind k);

struct MergeScenario {
    MergeKind kind = MergeKind::three_way;
    std::string id;
    ProgramPtr ancestor; // null for two_way
    std::vector<ProgramPtr> parents;
    ProgramPtr merge;
    // present for benchmark scenarios so they can re-validate on load
    std::optional<TestCase> fix_test;

    bool has_ancestor() const { return ancestor != nullptr; }
    // ("merge", merge), ("parent1", ...), ..., ("ancestor", ...) last
    std::vector<std::pair<std::string, ProgramPtr>> all_versions() const;
    ProgramPtr version_by_role(const std::string& role) const;
    // Generation-target roles, in the order tests are generated:
    // merge first, then each parent.
    std::vector<std::string> target_roles() const;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Manifest JSON: { "id": text, "kind": "2way"|"3way"|"octopus",
//   "ancestor": dir (absent for 2way), "parents": [dirs], "merge": dir,
//   "fix_test": file (optional) }
// Directories hold `.mlg` files, loaded in filename order. Throws
// ScenarioError naming the version role and path on any failure; benchmark
// scenarios with a fix_test are re-validated (merge fails it, first parent
// passes it).
MergeScenario load_scenario(const std::string& manifest_path);

// Writes version directories plus a scenario.json manifest under `dir`.
void save_scenario(const MergeScenario& scenario, const std::string& dir);

// --- mutation ---

enum class MutationOperatorKind { aor, ror, constant_replacement, statement_deletion };

std::string mutation_operator_name(MutationOperatorKind k);

std::vector<MutationOperatorKind> all_mutation_operators();

struct Mutant {
    ProgramPtr program;
    std::string description; // "file:line: <op> 'x' -> 'y'"
    std::string file;
    int line = 0;
};

// Single-token mutations restricted to the target lines. Every result parses
// and checks; results are distinct by normalized token stream and ordered
// deterministically under the seed.
std::vector<Mutant> mutate(const Program& program,
                           const std::set<std::pair<std::string, int>>& target_lines,
                           const std::vector<MutationOperatorKind>& operators,
                           std::uint64_t seed, int limit);

// --- benchmark construction from a bug-fix pair ---

struct FixScenarioInput {
    std::string id;
    ProgramPtr buggy; // P_b
    ProgramPtr fixed; // P_f
    TestCase fix_test; // fails on buggy, passes on fixed (checked at load)
};

// Manifest JSON: { "id": text, "buggy": dir, "fixed": dir, "fix_test": file }
FixScenarioInput load_fix_scenario(const std::string& manifest_path);

// Merge three program versions file by file with diff3. A textual conflict
// or a clean merge that fails to parse rejects the candidate.
struct MergedProgram {
    ProgramPtr program;                       // set on success
    bool conflicted = false;                  // textual conflict
    std::vector<Diagnostic> reject_diagnostics; // clean text that fails to parse
    bool ok() const { return program != nullptr; }
};
MergedProgram merge_program_texts(const Program& base, const Program& left, const Program& right);
MergedProgram octopus_merge_programs(const Program& base,
                                     const std::vector<const Program*>& branches);

// Runs the fix test on the buggy program to collect covered lines, mutates
// those lines, merges fixed x mutant over the buggy base, and keeps clean,
// parseable merges on which the fix test fails.
std::vector<MergeScenario> build_conflict_3way(const FixScenarioInput& input,
                                               const std::vector<MutationOperatorKind>& operators,
                                               std::uint64_t seed, int limit);

// Extends one constructed 3-way merge with a second mutant of the same class
// as its mutant parent; returns a 3-parent octopus scenario whose merge fails
// the fix test, or nullopt when no candidate survives.
std::optional<MergeScenario> build_conflict_octopus(
    const MergeScenario& base, const FixScenarioInput& input, std::uint64_t seed,
    const std::vector<MutationOperatorKind>& operators = all_mutation_operators(),
    int pool_limit = 100);

} // namespace tom

#endif
