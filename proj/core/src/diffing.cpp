#include "tom/diffing.hpp"

#include <algorithm>

#include "tom/source.hpp"

namespace tom {

// --- entity diff ---

namespace {

struct EntityTokens {
    EntityId id;
    const std::vector<std::string>* tokens;
};

std::map<EntityId, const std::vector<std::string>*> entity_token_map(const Program& p) {
    std::map<EntityId, const std::vector<std::string>*> out;
    for (const auto& cls : p.classes) {
        for (const auto& f : cls.fields)
            out[EntityId::field(cls.name, f.name)] = &f.norm_tokens;
        if (cls.constructor)
            out[EntityId::ctor(cls.name, cls.constructor->arity())] =
                &cls.constructor->norm_tokens;
        for (const auto& m : cls.methods)
            out[EntityId::method(cls.name, m.name, m.arity())] = &m.norm_tokens;
    }
    for (const auto& fn : p.functions)
        out[EntityId::function(fn.name, fn.arity())] = &fn.norm_tokens;
    return out;
}

} // namespace

std::set<EntityId> EntityDelta::seeds() const {
    std::set<EntityId> s = added;
    s.insert(changed.begin(), changed.end());
    return s;
}

EntityDelta entity_diff(const Program& variant, const Program& target,
                        const std::string& variant_id, const std::string& target_id) {
    EntityDelta delta;
    delta.variant_id = variant_id;
    delta.target_id = target_id;
    auto variant_entities = entity_token_map(variant);
    auto target_entities = entity_token_map(target);
    for (const auto& [id, tokens] : target_entities) {
        auto it = variant_entities.find(id);
        if (it == variant_entities.end()) {
            delta.added.insert(id);
        } else if (*it->second != *tokens) {
            delta.changed.insert(id);
        }
    }
    return delta;
}

// --- LCS line matching ---

std::vector<std::pair<int, int>> lcs_match(const std::vector<std::string>& a,
                                           const std::vector<std::string>& b) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    std::vector<std::vector<int>> len(static_cast<std::size_t>(n + 1),
                                      std::vector<int>(static_cast<std::size_t>(m + 1), 0));
    for (int i = n - 1; i >= 0; --i) {
        for (int j = m - 1; j >= 0; --j) {
            auto& cell = len[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)])
                cell = len[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)] + 1;
            else
                cell = std::max(len[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)],
                                len[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)]);
        }
    }
    std::vector<std::pair<int, int>> match;
    int i = 0, j = 0;
    while (i < n && j < m) {
        if (a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)]) {
            match.emplace_back(i, j);
            ++i;
            ++j;
        } else if (len[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)] >=
                   len[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)]) {
            ++i;
        } else {
            ++j;
        }
    }
    return match;
}

std::set<int> line_diff(const std::string& variant_text, const std::string& target_text) {
    auto a = split_lines(normalize_newlines(variant_text));
    auto b = split_lines(normalize_newlines(target_text));
    std::set<int> diff;
    std::vector<bool> matched(b.size(), false);
    for (const auto& [ai, bi] : lcs_match(a, b)) matched[static_cast<std::size_t>(bi)] = true;
    for (std::size_t j = 0; j < b.size(); ++j)
        if (!matched[j]) diff.insert(static_cast<int>(j + 1));
    return diff;
}

DiffLines diff_lines(const Program& variant, const Program& target) {
    DiffLines out;
    for (const auto& tf : target.files) {
        const SourceFile* vf = variant.find_file(tf.name);
        std::set<int> d;
        if (!vf) {
            for (int ln = 1; ln <= tf.line_count(); ++ln) d.insert(ln);
        } else {
            d = line_diff(vf->text, tf.text);
        }
        if (!d.empty()) out[tf.name] = std::move(d);
    }
    return out;
}

// --- diff3 ---

namespace {

struct Chunk {
    // half-open 0-based line ranges into base/left/right
    int b0, b1, l0, l1, r0, r1;
};

// Splits the three sequences into alternating stable/unstable chunks using
// the base-left and base-right LCS matchings. A base line is stable when it
// is matched on both sides.
std::vector<Chunk> chunk3(const std::vector<std::string>& base, const std::vector<std::string>& left,
                          const std::vector<std::string>& right) {
    const int nb = static_cast<int>(base.size());
    std::vector<int> to_left(static_cast<std::size_t>(nb), -1);
    std::vector<int> to_right(static_cast<std::size_t>(nb), -1);
    for (const auto& [bi, li] : lcs_match(base, left)) to_left[static_cast<std::size_t>(bi)] = li;
    for (const auto& [bi, ri] : lcs_match(base, right)) to_right[static_cast<std::size_t>(bi)] = ri;

    std::vector<Chunk> chunks;
    int ib = 0, il = 0, ir = 0;
    const int nl = static_cast<int>(left.size());
    const int nr = static_cast<int>(right.size());
    while (ib < nb || il < nl || ir < nr) {
        // find next doubly-matched base line at or after ib whose matches are
        // at or after il/ir
        int jb = ib;
        while (jb < nb && !(to_left[static_cast<std::size_t>(jb)] >= il &&
                            to_right[static_cast<std::size_t>(jb)] >= ir)) {
            ++jb;
        }
        int jl = jb < nb ? to_left[static_cast<std::size_t>(jb)] : nl;
        int jr = jb < nb ? to_right[static_cast<std::size_t>(jb)] : nr;
        if (jb > ib || jl > il || jr > ir) {
            chunks.push_back({ib, jb, il, jl, ir, jr}); // unstable region
        }
        if (jb < nb) {
            // stable run: extend while consecutive lines stay doubly matched
            int kb = jb, kl = jl, kr = jr;
            while (kb < nb && to_left[static_cast<std::size_t>(kb)] == kl &&
                   to_right[static_cast<std::size_t>(kb)] == kr) {
                ++kb;
                ++kl;
                ++kr;
            }
            chunks.push_back({jb, kb, jl, kl, jr, kr});
            ib = kb;
            il = kl;
            ir = kr;
        } else {
            ib = nb;
            il = nl;
            ir = nr;
        }
    }
    return chunks;
}

bool slices_equal(const std::vector<std::string>& a, int a0, int a1,
                  const std::vector<std::string>& b, int b0, int b1) {
    if (a1 - a0 != b1 - b0) return false;
    for (int k = 0; k < a1 - a0; ++k)
        if (a[static_cast<std::size_t>(a0 + k)] != b[static_cast<std::size_t>(b0 + k)])
            return false;
    return true;
}

} // namespace

MergeOutcome diff3_merge(const std::string& base_text, const std::string& left_text,
                         const std::string& right_text) {
    auto base = split_lines(normalize_newlines(base_text));
    auto left = split_lines(normalize_newlines(left_text));
    auto right = split_lines(normalize_newlines(right_text));

    std::vector<std::string> merged;
    std::vector<ConflictRegion> conflicts;

    for (const auto& c : chunk3(base, left, right)) {
        bool left_changed = !slices_equal(base, c.b0, c.b1, left, c.l0, c.l1);
        bool right_changed = !slices_equal(base, c.b0, c.b1, right, c.r0, c.r1);
        const std::vector<std::string>* take = nullptr;
        int t0 = 0, t1 = 0;
        if (!left_changed) {
            take = &right;
            t0 = c.r0;
            t1 = c.r1;
        } else if (!right_changed) {
            take = &left;
            t0 = c.l0;
            t1 = c.l1;
        } else if (slices_equal(left, c.l0, c.l1, right, c.r0, c.r1)) {
            take = &left;
            t0 = c.l0;
            t1 = c.l1;
        } else {
            conflicts.push_back({c.b0 + 1, c.b1, c.l0 + 1, c.l1, c.r0 + 1, c.r1});
            continue;
        }
        for (int k = t0; k < t1; ++k) merged.push_back((*take)[static_cast<std::size_t>(k)]);
    }

    if (!conflicts.empty()) return MergeConflicted{std::move(conflicts)};
    return MergeClean{join_lines(merged)};
}

MergeOutcome octopus_merge(const std::string& base, const std::vector<std::string>& branches) {
    std::string acc = base;
    for (const auto& branch : branches) {
        MergeOutcome step = diff3_merge(base, acc, branch);
        if (!is_clean(step)) return step;
        acc = merged_text(step);
    }
    return MergeClean{std::move(acc)};
}

} // namespace tom
