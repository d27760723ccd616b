#include "tom/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "tom/interp.hpp"
#include "tom/lexer.hpp"
#include "tom/parser.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tom {

std::string merge_kind_name(MergeKind k) {
    switch (k) {
        case MergeKind::two_way: return "2way";
        case MergeKind::three_way: return "3way";
        case MergeKind::octopus: return "octopus";
    }
    return "3way";
}

std::vector<std::pair<std::string, ProgramPtr>> MergeScenario::all_versions() const {
    std::vector<std::pair<std::string, ProgramPtr>> out;
    out.emplace_back("merge", merge);
    for (std::size_t i = 0; i < parents.size(); ++i)
        out.emplace_back("parent" + std::to_string(i + 1), parents[i]);
    if (ancestor) out.emplace_back("ancestor", ancestor);
    return out;
}

ProgramPtr MergeScenario::version_by_role(const std::string& role) const {
    for (const auto& [r, p] : all_versions())
        if (r == role) return p;
    return nullptr;
}

std::vector<std::string> MergeScenario::target_roles() const {
    std::vector<std::string> roles{"merge"};
    for (std::size_t i = 0; i < parents.size(); ++i)
        roles.push_back("parent" + std::to_string(i + 1));
    return roles;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write file: " + path);
    out << text;
}

std::vector<NamedSource> load_version_sources(const std::string& dir, const std::string& role) {
    if (!fs::is_directory(dir))
        throw ScenarioError("version directory for " + role + " does not exist: " + dir);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".mlg")
            names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    if (names.empty())
        throw ScenarioError("no .mlg files in " + role + " directory: " + dir);
    std::vector<NamedSource> sources;
    for (const auto& n : names) sources.push_back({n, read_file(dir + "/" + n)});
    return sources;
}

ProgramPtr load_version(const std::string& dir, const std::string& role) {
    ParseResult parsed = parse_program(load_version_sources(dir, role));
    if (!parsed.ok())
        throw ScenarioError("version " + role + " at " + dir + " does not parse:\n" +
                            parsed.diagnostics_str());
    return parsed.program;
}

TestCase load_test_file(const std::string& path) {
    TestParseResult parsed = parse_mlgtest(fs::path(path).filename().string(), read_file(path));
    if (!parsed.ok()) {
        std::ostringstream os;
        os << "test file " << path << " is malformed:\n";
        for (const auto& d : parsed.diagnostics) os << d.str() << "\n";
        throw ScenarioError(os.str());
    }
    return *parsed.test;
}

std::string resolve(const fs::path& base_dir, const std::string& rel) {
    fs::path p(rel);
    return p.is_absolute() ? p.string() : (base_dir / p).string();
}

} // namespace

MergeScenario load_scenario(const std::string& manifest_path) {
    if (!fs::exists(manifest_path))
        throw ScenarioError("scenario manifest does not exist: " + manifest_path);
    json doc;
    try {
        doc = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw ScenarioError("scenario manifest is not valid JSON: " + manifest_path + ": " +
                            e.what());
    }
    fs::path base_dir = fs::path(manifest_path).parent_path();

    auto require_string = [&](const char* field) -> std::string {
        if (!doc.contains(field) || !doc[field].is_string())
            throw ScenarioError(std::string("scenario manifest missing field \"") + field + "\"");
        return doc[field].get<std::string>();
    };

    MergeScenario scenario;
    scenario.id = doc.value("id", fs::path(manifest_path).stem().string());
    std::string kind = require_string("kind");
    if (kind == "2way") scenario.kind = MergeKind::two_way;
    else if (kind == "3way") scenario.kind = MergeKind::three_way;
    else if (kind == "octopus") scenario.kind = MergeKind::octopus;
    else throw ScenarioError("scenario kind must be 2way, 3way or octopus, got: " + kind);

    if (!doc.contains("parents") || !doc["parents"].is_array())
        throw ScenarioError("scenario manifest missing field \"parents\"");
    std::vector<std::string> parent_dirs = doc["parents"].get<std::vector<std::string>>();

    std::size_t expected_parents = scenario.kind == MergeKind::octopus ? 3 : 2;
    if (scenario.kind == MergeKind::octopus) {
        if (parent_dirs.size() < 3)
            throw ScenarioError("octopus scenario needs at least 3 parents, got " +
                                std::to_string(parent_dirs.size()));
    } else if (parent_dirs.size() != expected_parents) {
        throw ScenarioError(kind + " scenario needs exactly 2 parents, got " +
                            std::to_string(parent_dirs.size()));
    }

    if (scenario.kind == MergeKind::two_way) {
        if (doc.contains("ancestor"))
            throw ScenarioError("2way scenario must not declare an ancestor");
    } else {
        scenario.ancestor = load_version(resolve(base_dir, require_string("ancestor")), "ancestor");
    }
    for (std::size_t i = 0; i < parent_dirs.size(); ++i)
        scenario.parents.push_back(load_version(resolve(base_dir, parent_dirs[i]),
                                                "parent" + std::to_string(i + 1)));
    scenario.merge = load_version(resolve(base_dir, require_string("merge")), "merge");

    if (doc.contains("fix_test")) {
        scenario.fix_test = load_test_file(resolve(base_dir, doc["fix_test"].get<std::string>()));
        // benchmark scenarios promise: merge fails the fix test, the fix
        // branch (first parent) passes it
        if (all_assertions_pass(*scenario.fix_test, run_test(*scenario.merge, *scenario.fix_test)))
            throw ScenarioError("scenario " + scenario.id +
                                ": merge unexpectedly passes the fix test");
        if (!all_assertions_pass(*scenario.fix_test,
                                 run_test(*scenario.parents[0], *scenario.fix_test)))
            throw ScenarioError("scenario " + scenario.id +
                                ": fix parent unexpectedly fails the fix test");
    }
    return scenario;
}

void save_scenario(const MergeScenario& scenario, const std::string& dir) {
    fs::create_directories(dir);
    json doc;
    doc["id"] = scenario.id;
    doc["kind"] = merge_kind_name(scenario.kind);

    auto dump_version = [&](const std::string& role, const Program& prog) {
        fs::create_directories(fs::path(dir) / role);
        for (const auto& f : prog.files)
            write_file((fs::path(dir) / role / f.name).string(), f.text);
        return role;
    };

    if (scenario.ancestor) doc["ancestor"] = dump_version("ancestor", *scenario.ancestor);
    std::vector<std::string> parent_dirs;
    for (std::size_t i = 0; i < scenario.parents.size(); ++i)
        parent_dirs.push_back(
            dump_version("parent" + std::to_string(i + 1), *scenario.parents[i]));
    doc["parents"] = parent_dirs;
    doc["merge"] = dump_version("merge", *scenario.merge);
    if (scenario.fix_test) {
        write_file((fs::path(dir) / "fix_test.mlgtest").string(),
                   serialize_mlgtest(*scenario.fix_test));
        doc["fix_test"] = "fix_test.mlgtest";
    }
    write_file((fs::path(dir) / "scenario.json").string(), doc.dump(2) + "\n");
}

// --- mutation ---

std::string mutation_operator_name(MutationOperatorKind k) {
    switch (k) {
        case MutationOperatorKind::aor: return "AOR";
        case MutationOperatorKind::ror: return "ROR";
        case MutationOperatorKind::constant_replacement: return "CR";
        case MutationOperatorKind::statement_deletion: return "SD";
    }
    return "AOR";
}

std::vector<MutationOperatorKind> all_mutation_operators() {
    return {MutationOperatorKind::aor, MutationOperatorKind::ror,
            MutationOperatorKind::constant_replacement, MutationOperatorKind::statement_deletion};
}

namespace {

struct MutationSite {
    std::string file;
    int line = 0;
    std::size_t offset = 0;
    std::size_t length = 0;
    std::string replacement;
    MutationOperatorKind op;
    std::string original;
};

const char* const kArithOps[] = {"+", "-", "*", "/", "%"};
const char* const kRelOps[] = {"<", "<=", ">", ">=", "==", "!="};

void collect_token_sites(const SourceFile& file, const std::set<int>& lines,
                         const std::vector<MutationOperatorKind>& operators,
                         std::vector<MutationSite>& out) {
    bool want_aor = std::count(operators.begin(), operators.end(), MutationOperatorKind::aor) > 0;
    bool want_ror = std::count(operators.begin(), operators.end(), MutationOperatorKind::ror) > 0;
    bool want_cr = std::count(operators.begin(), operators.end(),
                              MutationOperatorKind::constant_replacement) > 0;

    LexResult lexed = lex(file.name, file.text);
    for (const auto& t : lexed.tokens) {
        if (!lines.count(t.line)) continue;
        auto add = [&](std::string replacement, MutationOperatorKind op) {
            out.push_back({file.name, t.line, t.offset, t.length, std::move(replacement), op,
                           t.text});
        };
        if (want_aor && is_arith_op(t.kind)) {
            for (const char* op : kArithOps)
                if (t.text != op) add(op, MutationOperatorKind::aor);
        } else if (want_ror && is_rel_op(t.kind)) {
            for (const char* op : kRelOps)
                if (t.text != op) add(op, MutationOperatorKind::ror);
        } else if (want_cr && t.kind == TokKind::int_literal) {
            std::vector<std::int64_t> replacements;
            if (t.int_value < INT64_MAX) replacements.push_back(t.int_value + 1);
            if (t.int_value > INT64_MIN) replacements.push_back(t.int_value - 1);
            replacements.push_back(0);
            for (std::int64_t v : replacements)
                if (v != t.int_value) add(std::to_string(v), MutationOperatorKind::constant_replacement);
        }
    }
}

void collect_deletion_sites(const Program& program, const SourceFile& file,
                            const std::set<int>& lines, std::vector<MutationSite>& out) {
    // Single-line non-return simple statements only, so each deletion removes
    // exactly one token span on one line.
    std::vector<const Stmt*> stack;
    auto visit_body = [&](const std::vector<StmtPtr>& body, auto&& self) -> void {
        for (const auto& s : body) {
            bool simple = std::holds_alternative<AssignStmt>(s->node) ||
                          std::holds_alternative<FieldAssignStmt>(s->node) ||
                          std::holds_alternative<ExprStmt>(s->node) ||
                          std::holds_alternative<VarDeclStmt>(s->node);
            if (simple && s->span.file == file.name && s->span.first_line == s->span.last_line &&
                lines.count(s->span.first_line)) {
                std::string original =
                    file.text.substr(s->span.begin, s->span.end - s->span.begin);
                out.push_back({file.name, s->span.first_line, s->span.begin,
                               s->span.end - s->span.begin, "", MutationOperatorKind::statement_deletion,
                               std::move(original)});
            }
            if (const auto* i = std::get_if<IfStmt>(&s->node)) {
                self(i->then_body, self);
                self(i->else_body, self);
            } else if (const auto* w = std::get_if<WhileStmt>(&s->node)) {
                self(w->body, self);
            }
        }
    };
    for (const auto& cls : program.classes) {
        if (cls.constructor) visit_body(cls.constructor->body, visit_body);
        for (const auto& m : cls.methods) visit_body(m.body, visit_body);
    }
    for (const auto& fn : program.functions) visit_body(fn.body, visit_body);
}

std::string program_fingerprint(const Program& program) {
    std::map<std::string, std::string> per_file;
    for (const auto& f : program.files) {
        std::string tokens;
        for (const auto& t : lex(f.name, f.text).tokens) {
            tokens += t.text;
            tokens += '\x1f';
        }
        per_file[f.name] = std::move(tokens);
    }
    std::string out;
    for (const auto& [name, tokens] : per_file) {
        out += name;
        out += '\x1e';
        out += tokens;
    }
    return out;
}

} // namespace

std::vector<Mutant> mutate(const Program& program,
                           const std::set<std::pair<std::string, int>>& target_lines,
                           const std::vector<MutationOperatorKind>& operators, std::uint64_t seed,
                           int limit) {
    std::vector<Mutant> mutants;
    if (limit <= 0) return mutants;

    std::map<std::string, std::set<int>> lines_by_file;
    for (const auto& [file, line] : target_lines) lines_by_file[file].insert(line);

    std::vector<MutationSite> sites;
    bool want_deletion = std::count(operators.begin(), operators.end(),
                                    MutationOperatorKind::statement_deletion) > 0;
    for (const auto& f : program.files) {
        auto it = lines_by_file.find(f.name);
        if (it == lines_by_file.end()) continue;
        collect_token_sites(f, it->second, operators, sites);
        if (want_deletion) collect_deletion_sites(program, f, it->second, sites);
    }

    std::mt19937_64 rng(seed);
    for (std::size_t i = sites.size(); i > 1; --i)
        std::swap(sites[i - 1], sites[rng() % i]);

    std::set<std::string> fingerprints{program_fingerprint(program)};
    for (const auto& site : sites) {
        if (static_cast<int>(mutants.size()) >= limit) break;
        std::vector<NamedSource> sources;
        for (const auto& f : program.files) {
            std::string text = f.text;
            if (f.name == site.file)
                text = text.substr(0, site.offset) + site.replacement +
                       text.substr(site.offset + site.length);
            sources.push_back({f.name, std::move(text)});
        }
        ParseResult parsed = parse_program(sources);
        if (!parsed.ok()) continue;
        if (!fingerprints.insert(program_fingerprint(*parsed.program)).second) continue;
        Mutant m;
        m.program = parsed.program;
        m.file = site.file;
        m.line = site.line;
        std::ostringstream desc;
        desc << site.file << ":" << site.line << ": " << mutation_operator_name(site.op) << " '"
             << site.original << "' -> '" << site.replacement << "'";
        m.description = desc.str();
        mutants.push_back(std::move(m));
    }
    return mutants;
}

// --- merging program texts ---

MergedProgram merge_program_texts(const Program& base, const Program& left, const Program& right) {
    return octopus_merge_programs(base, {&left, &right});
}

MergedProgram octopus_merge_programs(const Program& base,
                                     const std::vector<const Program*>& branches) {
    MergedProgram out;
    std::vector<NamedSource> merged_sources;
    for (const auto& bf : base.files) {
        std::vector<std::string> branch_texts;
        for (const Program* p : branches) {
            const SourceFile* f = p->find_file(bf.name);
            if (!f) {
                out.conflicted = true; // file sets must agree for benchmark merging
                return out;
            }
            branch_texts.push_back(f->text);
        }
        MergeOutcome merged = octopus_merge(bf.text, branch_texts);
        if (!is_clean(merged)) {
            out.conflicted = true;
            return out;
        }
        merged_sources.push_back({bf.name, merged_text(merged)});
    }
    ParseResult parsed = parse_program(merged_sources);
    if (!parsed.ok()) {
        out.reject_diagnostics = parsed.diagnostics; // MergeRejected
        return out;
    }
    out.program = parsed.program;
    return out;
}

// --- fix scenarios and benchmark construction ---

FixScenarioInput load_fix_scenario(const std::string& manifest_path) {
    if (!fs::exists(manifest_path))
        throw ScenarioError("fix manifest does not exist: " + manifest_path);
    json doc;
    try {
        doc = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw ScenarioError("fix manifest is not valid JSON: " + manifest_path + ": " + e.what());
    }
    fs::path base_dir = fs::path(manifest_path).parent_path();
    for (const char* field : {"buggy", "fixed", "fix_test"})
        if (!doc.contains(field) || !doc[field].is_string())
            throw ScenarioError(std::string("fix manifest missing field \"") + field + "\"");

    FixScenarioInput input;
    input.id = doc.value("id", fs::path(manifest_path).stem().string());
    input.buggy = load_version(resolve(base_dir, doc["buggy"].get<std::string>()), "buggy");
    input.fixed = load_version(resolve(base_dir, doc["fixed"].get<std::string>()), "fixed");
    input.fix_test = load_test_file(resolve(base_dir, doc["fix_test"].get<std::string>()));

    if (all_assertions_pass(input.fix_test, run_test(*input.buggy, input.fix_test)))
        throw ScenarioError("fix scenario " + input.id +
                            ": fix test unexpectedly passes on the buggy version");
    if (!all_assertions_pass(input.fix_test, run_test(*input.fixed, input.fix_test)))
        throw ScenarioError("fix scenario " + input.id +
                            ": fix test fails on the fixed version");
    return input;
}

std::vector<MergeScenario> build_conflict_3way(const FixScenarioInput& input,
                                               const std::vector<MutationOperatorKind>& operators,
                                               std::uint64_t seed, int limit) {
    // preconditions re-checked: the pipeline only makes sense for a real fix
    if (all_assertions_pass(input.fix_test, run_test(*input.buggy, input.fix_test)))
        throw ScenarioError("build_conflict_3way: fix test passes on the buggy version");
    ExecutionResult buggy_run = run_test(*input.buggy, input.fix_test);
    if (!all_assertions_pass(input.fix_test, run_test(*input.fixed, input.fix_test)))
        throw ScenarioError("build_conflict_3way: fix test fails on the fixed version");

    std::vector<MergeScenario> scenarios;
    std::vector<Mutant> mutants = mutate(*input.buggy, buggy_run.covered_lines, operators, seed,
                                         limit);
    int emitted = 0;
    for (const auto& mutant : mutants) {
        MergedProgram merged = merge_program_texts(*input.buggy, *input.fixed, *mutant.program);
        if (!merged.ok()) continue; // textual conflict or rejected merge
        if (all_assertions_pass(input.fix_test, run_test(*merged.program, input.fix_test)))
            continue; // the mutation is invisible to the fix test
        MergeScenario s;
        s.kind = MergeKind::three_way;
        s.id = input.id + "-3way-" + std::to_string(++emitted);
        s.ancestor = input.buggy;
        s.parents = {input.fixed, mutant.program};
        s.merge = merged.program;
        s.fix_test = input.fix_test;
        scenarios.push_back(std::move(s));
    }
    return scenarios;
}

namespace {

// Class touched by the mutant parent of a constructed 3-way merge.
std::string mutated_class(const Program& buggy, const Program& mutant) {
    EntityDelta delta = entity_diff(buggy, mutant);
    for (const auto& id : delta.seeds()) return id.class_name;
    return "";
}

} // namespace

std::optional<MergeScenario> build_conflict_octopus(const MergeScenario& base,
                                                    const FixScenarioInput& input,
                                                    std::uint64_t seed,
                                                    const std::vector<MutationOperatorKind>& operators,
                                                    int pool_limit) {
    if (base.kind != MergeKind::three_way || base.parents.size() != 2) return std::nullopt;
    const Program& buggy = *input.buggy;
    const Program& first_mutant = *base.parents[1];
    std::string target_class = mutated_class(buggy, first_mutant);

    ExecutionResult buggy_run = run_test(buggy, input.fix_test);
    std::vector<Mutant> pool = mutate(buggy, buggy_run.covered_lines, operators, seed, pool_limit);

    std::string first_fp;
    {
        std::ostringstream os;
        for (const auto& f : first_mutant.files) os << f.name << "\x1e" << f.text;
        first_fp = os.str();
    }

    std::vector<const Mutant*> candidates;
    for (const auto& m : pool) {
        if (mutated_class(buggy, *m.program) != target_class) continue;
        std::ostringstream os;
        for (const auto& f : m.program->files) os << f.name << "\x1e" << f.text;
        if (os.str() == first_fp) continue; // must be a distinct mutant
        candidates.push_back(&m);
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = candidates.size(); i > 1; --i)
        std::swap(candidates[i - 1], candidates[rng() % i]);

    for (const Mutant* second : candidates) {
        MergedProgram merged =
            octopus_merge_programs(buggy, {&*input.fixed, &first_mutant, &*second->program});
        if (!merged.ok()) continue;
        if (all_assertions_pass(input.fix_test, run_test(*merged.program, input.fix_test)))
            continue;
        MergeScenario s;
        s.kind = MergeKind::octopus;
        s.id = base.id + "-oct";
        s.ancestor = input.buggy;
        s.parents = {input.fixed, base.parents[1], second->program};
        s.merge = merged.program;
        s.fix_test = input.fix_test;
        return s;
    }
    return std::nullopt;
}

} // namespace tom
