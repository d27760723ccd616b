#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tom/depgraph.hpp"
#include "tom/parser.hpp"
#include "tom/report.hpp"
#include "tom/scenario.hpp"
#include "tom/testgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tom::cli {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

ProgramPtr load_version_dir(const std::string& dir) {
    std::vector<std::string> names;
    if (!fs::is_directory(dir)) throw ScenarioError("not a directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".mlg")
            names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    if (names.empty()) throw ScenarioError("no .mlg files in " + dir);
    std::vector<NamedSource> sources;
    for (const auto& n : names) {
        std::ifstream in(fs::path(dir) / n, std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        sources.push_back({n, text.str()});
    }
    ParseResult parsed = parse_program(sources);
    if (!parsed.ok()) throw ScenarioError(dir + " does not parse:\n" + parsed.diagnostics_str());
    return parsed.program;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write " + path);
    out << text;
}

int cmd_detect(const std::string& scenario_path, GenConfig gen, SelectionConfig sel,
               const std::string& out_path, const std::string& tests_dir, std::ostream& out,
               std::ostream& err) {
    auto t0 = std::chrono::steady_clock::now();
    MergeScenario scenario = load_scenario(scenario_path);
    double load_ms = ms_since(t0);

    auto t1 = std::chrono::steady_clock::now();
    ConflictReport payload = detect(scenario, gen, sel);
    double detect_ms = ms_since(t1);

    ReportDocument doc;
    doc.scenario_path = scenario_path;
    doc.config = gen;
    doc.selection = sel;
    doc.payload = payload;
    doc.timing_ms = {{"load", load_ms}, {"detect", detect_ms}};

    std::string rendered = report_to_json(doc);
    if (out_path.empty()) {
        out << rendered;
    } else {
        write_text(out_path, rendered);
    }

    if (!tests_dir.empty()) {
        fs::create_directories(tests_dir);
        for (const auto& target : payload.targets) {
            int k = 0;
            for (const auto& conflict : target.conflicts) {
                std::string name = payload.scenario_id + "_" + target.role + "_" +
                                   std::to_string(++k) + ".mlgtest";
                write_text((fs::path(tests_dir) / name).string(),
                           serialize_mlgtest(conflict.test));
            }
        }
    }

    int total = payload.total_conflicts();
    err << "scenario " << payload.scenario_id << ": " << total << " conflict test(s)\n";
    return total > 0 ? 1 : 0;
}

int cmd_select_uuts(const std::string& scenario_path, const std::string& target_role,
                    SelectionConfig sel, std::ostream& out) {
    MergeScenario scenario = load_scenario(scenario_path);
    ProgramPtr target = scenario.version_by_role(target_role);
    if (!target) throw ScenarioError("scenario has no version with role: " + target_role);
    std::vector<ProgramPtr> variants;
    for (const auto& [role, program] : scenario.all_versions())
        if (role != target_role) variants.push_back(program);
    UutSelection selection = select_uuts(*target, variants, sel);

    json doc;
    json uuts = json::array();
    for (const auto& u : selection.uuts) {
        uuts.push_back({{"entity", u.entity.display()},
                        {"key", u.entity.key()},
                        {"kind", entity_kind_name(u.entity.kind)},
                        {"min_depth", u.min_depth}});
    }
    doc["uuts"] = std::move(uuts);
    doc["fallback_used"] = selection.fallback_used;
    doc["target"] = target_role;
    out << doc.dump(2) << "\n";
    return 0;
}

int cmd_gen_bench(const std::string& fix_manifest, std::uint64_t seed, int limit, bool octopus,
                  const std::string& out_dir, std::ostream& out, std::ostream& err) {
    FixScenarioInput input = load_fix_scenario(fix_manifest);
    auto operators = all_mutation_operators();
    std::vector<MergeScenario> scenarios = build_conflict_3way(input, operators, seed, limit);

    fs::create_directories(out_dir);
    int written = 0;
    json index = json::array();
    for (const auto& s : scenarios) {
        std::string dir = (fs::path(out_dir) / s.id).string();
        save_scenario(s, dir);
        index.push_back({{"id", s.id}, {"kind", merge_kind_name(s.kind)},
                         {"manifest", s.id + "/scenario.json"}});
        ++written;
        if (octopus) {
            if (auto oct = build_conflict_octopus(s, input, seed, operators, limit)) {
                std::string oct_dir = (fs::path(out_dir) / oct->id).string();
                save_scenario(*oct, oct_dir);
                index.push_back({{"id", oct->id}, {"kind", merge_kind_name(oct->kind)},
                                 {"manifest", oct->id + "/scenario.json"}});
                ++written;
            }
        }
    }
    write_text((fs::path(out_dir) / "index.json").string(), index.dump(2) + "\n");
    err << "emitted " << written << " scenario(s) under " << out_dir << "\n";
    out << index.dump(2) << "\n";
    return 0;
}

int cmd_run_test(const std::string& test_path, const std::string& version_dir, long long budget,
                 std::ostream& out, std::ostream& err) {
    std::ifstream in(test_path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read test file: " + test_path);
    std::ostringstream text;
    text << in.rdbuf();
    TestParseResult parsed = parse_mlgtest(fs::path(test_path).filename().string(), text.str());
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) err << d.str() << "\n";
        return 2;
    }
    ProgramPtr program = load_version_dir(version_dir);
    ExecutionResult result = run_test(*program, *parsed.test, budget);

    for (const auto& [point, value] : result.valuation.slots)
        out << point.str() << " = " << value_str(value) << "\n";

    bool failed = false;
    for (const auto& o : evaluate_assertions(*parsed.test, result)) {
        out << "assert " << o.assertion.point.str() << " == " << value_str(o.assertion.expected)
            << " : " << (o.passed ? "PASS" : "FAIL (actual " + value_str(o.actual) + ")") << "\n";
        failed = failed || !o.passed;
    }
    return failed ? 1 : 0;
}

int cmd_dump_graph(const std::string& version_dir, const std::string& format,
                   const std::string& out_path, std::ostream& out) {
    ProgramPtr program = load_version_dir(version_dir);
    DependencyGraph graph = extract_dependencies(*program);
    std::string rendered = format == "dot" ? graph_to_dot(graph) : graph_to_json(graph);
    if (out_path.empty())
        out << rendered;
    else
        write_text(out_path, rendered);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"tom - regression test generation for program merges"};
    app.require_subcommand(1);

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "generate conflict-revealing tests");
    std::string scenario_path, out_path, tests_dir, criteria = "diffline";
    GenConfig gen;
    SelectionConfig sel;
    bool exhaust = false, stop_first = false;
    detect_cmd->add_option("--scenario", scenario_path, "scenario manifest JSON")->required();
    detect_cmd->add_option("--seed", gen.seed, "search seed");
    detect_cmd->add_option("--budget", gen.search_budget, "max candidate evaluations per target");
    detect_cmd->add_option("--exec-budget", gen.exec_budget, "interpreter steps per execution");
    detect_cmd->add_option("--depth", sel.max_depth, "impact exploration depth");
    detect_cmd->add_option("--max-uuts", sel.max_uuts, "max units under testing");
    detect_cmd->add_option("--criteria", criteria, "diffline|multi");
    detect_cmd->add_option("--population", gen.population_size, "search population size");
    detect_cmd->add_option("--mutation-rate", gen.mutation_rate, "offspring mutation probability");
    detect_cmd->add_option("--stability-runs", gen.stability_runs, "stability rerun count");
    detect_cmd->add_option("--jobs", gen.jobs, "worker threads for fitness evaluation");
    detect_cmd->add_flag("--stop-first", stop_first, "stop after the first conflict (default)");
    detect_cmd->add_flag("--exhaust", exhaust, "spend the full budget on every target");
    detect_cmd->add_option("--out", out_path, "report JSON path (stdout when omitted)");
    detect_cmd->add_option("--tests-dir", tests_dir, "write conflict tests as .mlgtest files");

    // select-uuts
    auto* select_cmd = app.add_subcommand("select-uuts", "print the selected UUTs for one target");
    std::string target_role = "merge";
    select_cmd->add_option("--scenario", scenario_path, "scenario manifest JSON")->required();
    select_cmd->add_option("--target", target_role, "generation target role (merge, parent1, ...)");
    select_cmd->add_option("--depth", sel.max_depth, "impact exploration depth");
    select_cmd->add_option("--max-uuts", sel.max_uuts, "max units under testing");

    // gen-bench
    auto* bench_cmd = app.add_subcommand("gen-bench", "construct conflict merge scenarios");
    std::string fix_manifest, out_dir = "bench-out";
    std::uint64_t bench_seed = 1;
    int limit = 50;
    bool octopus = false;
    bench_cmd->add_option("--fix-manifest", fix_manifest, "fix scenario manifest JSON")->required();
    bench_cmd->add_option("--seed", bench_seed, "mutation seed");
    bench_cmd->add_option("--limit", limit, "max mutants considered");
    bench_cmd->add_flag("--octopus", octopus, "also derive octopus scenarios");
    bench_cmd->add_option("--out-dir", out_dir, "output directory");

    // run-test
    auto* run_cmd = app.add_subcommand("run-test", "replay a .mlgtest against one version");
    std::string test_path, version_dir;
    long long budget = kDefaultStepBudget;
    run_cmd->add_option("--test", test_path, ".mlgtest file")->required();
    run_cmd->add_option("--version", version_dir, "version directory of .mlg files")->required();
    run_cmd->add_option("--exec-budget", budget, "interpreter steps");

    // dump-graph
    auto* graph_cmd = app.add_subcommand("dump-graph", "dump a version's dependency graph");
    std::string format = "json", graph_out;
    graph_cmd->add_option("--version", version_dir, "version directory")->required();
    graph_cmd->add_option("--format", format, "json|dot")->check(CLI::IsMember({"json", "dot"}));
    graph_cmd->add_option("--out", graph_out, "output path (stdout when omitted)");

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (detect_cmd->parsed()) {
            if (exhaust && stop_first) {
                err << "--stop-first and --exhaust are mutually exclusive\n";
                return 2;
            }
            gen.stop_on_first_conflict = !exhaust;
            auto parsed_criteria = criteria_from_name(criteria);
            if (!parsed_criteria) {
                err << "unknown criteria: " << criteria << " (expected diffline or multi)\n";
                return 2;
            }
            gen.criteria = *parsed_criteria;
            if (!sel.valid() || gen.search_budget < 0 || gen.stability_runs < 1 ||
                gen.population_size < 2) {
                err << "invalid configuration: depth and max-uuts must be >= 1, "
                       "stability-runs >= 1, population >= 2\n";
                return 2;
            }
            return cmd_detect(scenario_path, gen, sel, out_path, tests_dir, out, err);
        }
        if (select_cmd->parsed()) {
            if (!sel.valid()) {
                err << "invalid configuration: depth and max-uuts must be >= 1\n";
                return 2;
            }
            return cmd_select_uuts(scenario_path, target_role, sel, out);
        }
        if (bench_cmd->parsed()) {
            if (limit < 0) {
                err << "invalid --limit\n";
                return 2;
            }
            return cmd_gen_bench(fix_manifest, bench_seed, limit, octopus, out_dir, out, err);
        }
        if (run_cmd->parsed()) return cmd_run_test(test_path, version_dir, budget, out, err);
        if (graph_cmd->parsed()) return cmd_dump_graph(version_dir, format, graph_out, out);
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ReportParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace tom::cli
