#ifndef TOM_DIFFING_HPP
#define TOM_DIFFING_HPP

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tom/ast.hpp"
#include "tom/entity.hpp"

namespace tom {

// --- entity-level differencing ---

struct EntityDelta {
    std::set<EntityId> added;   // present in target, absent from variant
    std::set<EntityId> changed; // same signature, different normalized tokens
    std::string variant_id;
    std::string target_id;

    std::set<EntityId> seeds() const; // added ∪ changed
    bool empty() const { return added.empty() && changed.empty(); }
};

// Compares entities by (class, kind, name, arity). Bodies compare as token
// sequences with whitespace/comments stripped, so reformatting is never a
// change. Deleted entities are ignored.
EntityDelta entity_diff(const Program& variant, const Program& target,
                        const std::string& variant_id = "variant",
                        const std::string& target_id = "target");

// --- line-level differencing ---

// Target line numbers (1-based) not matched to an identical variant line
// under an LCS alignment.
std::set<int> line_diff(const std::string& variant_text, const std::string& target_text);

// Per-file diff lines of a target program against a variant program. Files
// are matched by name; a target file with no counterpart is entirely diff.
using DiffLines = std::map<std::string, std::set<int>>;
DiffLines diff_lines(const Program& variant, const Program& target);

// LCS match: pairs of (variant line index, target line index), 0-based,
// strictly increasing in both components, equal content.
std::vector<std::pair<int, int>> lcs_match(const std::vector<std::string>& a,
                                           const std::vector<std::string>& b);

// --- textual three-way merging ---

struct ConflictRegion {
    // 1-based inclusive line ranges; empty range encoded as [start, start-1]
    int base_first = 0, base_last = 0;
    int left_first = 0, left_last = 0;
    int right_first = 0, right_last = 0;

    bool operator==(const ConflictRegion&) const = default;
};

struct MergeClean {
    std::string text;
    bool operator==(const MergeClean&) const = default;
};
struct MergeConflicted {
    std::vector<ConflictRegion> regions;
    bool operator==(const MergeConflicted&) const = default;
};
using MergeOutcome = std::variant<MergeClean, MergeConflicted>;

inline bool is_clean(const MergeOutcome& o) { return std::holds_alternative<MergeClean>(o); }
inline const std::string& merged_text(const MergeOutcome& o) {
    return std::get<MergeClean>(o).text;
}

// Line-based diff3: unchanged regions are kept; a region changed on exactly
// one side takes that side; identical changes collapse; divergent changes on
// both sides yield a conflict. Conflict is a value, not an error.
MergeOutcome diff3_merge(const std::string& base, const std::string& left,
                         const std::string& right);

// Sequential fold over the branches: result_0 = base,
// result_k = diff3_merge(base, result_{k-1}, branch_k); the first conflicted
// step aborts with that conflict.
MergeOutcome octopus_merge(const std::string& base, const std::vector<std::string>& branches);

} // namespace tom

#endif
