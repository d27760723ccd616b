#include "tom/report.hpp"

#include "json.hpp"

using nlohmann::json;

namespace tom {

namespace {

json value_to_json(const Value& v) { return value_str(v); }

Value value_from_json(const json& j) {
    auto v = value_from_str(j.get<std::string>());
    if (!v) throw ReportParseError("bad value: " + j.dump());
    return *v;
}

json point_to_json(const ObservationPoint& p) {
    json j;
    j["id"] = p.str();
    if (p.kind == ObservationPoint::Kind::field_state) {
        j["class"] = p.class_name;
        j["label"] = p.object_label;
        j["field"] = p.field_name;
    }
    return j;
}

ObservationPoint point_from_json(const json& j) {
    auto p = ObservationPoint::parse(j.at("id").get<std::string>());
    if (!p) throw ReportParseError("bad observation point: " + j.dump());
    if (p->kind == ObservationPoint::Kind::field_state) {
        p->class_name = j.value("class", "");
        p->object_label = j.value("label", "");
        p->field_name = j.value("field", "");
    }
    return *p;
}

json assertion_to_json(const Assertion& a) {
    json j;
    j["point"] = point_to_json(a.point);
    j["expected"] = value_to_json(a.expected);
    return j;
}

Assertion assertion_from_json(const json& j) {
    return {point_from_json(j.at("point")), value_from_json(j.at("expected"))};
}

json uut_to_json(const UutEntry& u) {
    json j;
    j["entity"] = u.entity.display();
    j["key"] = u.entity.key();
    j["min_depth"] = u.min_depth;
    return j;
}

UutEntry uut_from_json(const json& j) {
    auto id = EntityId::from_key(j.at("key").get<std::string>());
    if (!id) throw ReportParseError("bad entity key: " + j.dump());
    return {*id, j.at("min_depth").get<int>()};
}

json verdict_to_json(const OracleVerdict& v) {
    json j;
    j["kind"] = v.kind == OracleVerdict::Kind::unexpected_behavior ? "unexpected_behavior"
                                                                   : "lost_behavior";
    j["parent_index"] = v.parent_index;
    j["witness_slots"] = v.witness_slots;
    j["assertion"] = assertion_to_json(v.assertion);
    return j;
}

OracleVerdict verdict_from_json(const json& j) {
    OracleVerdict v;
    std::string kind = j.at("kind").get<std::string>();
    v.kind = kind == "unexpected_behavior" ? OracleVerdict::Kind::unexpected_behavior
                                           : OracleVerdict::Kind::lost_behavior;
    v.parent_index = j.at("parent_index").get<int>();
    for (const auto& s : j.at("witness_slots")) v.witness_slots.insert(s.get<int>());
    v.assertion = assertion_from_json(j.at("assertion"));
    return v;
}

json witness_to_json(const ViolationWitness& w) {
    json j;
    j["kind"] = violation_kind_name(w.kind);
    j["variant_index"] = w.variant_index;
    j["slot"] = w.slot;
    j["values"] = {{"o", value_to_json(w.o)},
                   {"a", value_to_json(w.a)},
                   {"b", value_to_json(w.b)},
                   {"m", value_to_json(w.m)}};
    return j;
}

ViolationWitness witness_from_json(const json& j) {
    ViolationWitness w;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "neg_chi1") w.kind = ViolationWitness::Kind::neg_chi1;
    else if (kind == "neg_chi2") w.kind = ViolationWitness::Kind::neg_chi2;
    else if (kind == "neg_chi3_prime") w.kind = ViolationWitness::Kind::neg_chi3_prime;
    else throw ReportParseError("bad witness kind: " + kind);
    w.variant_index = j.at("variant_index").get<int>();
    w.slot = j.at("slot").get<int>();
    const auto& values = j.at("values");
    w.o = value_from_json(values.at("o"));
    w.a = value_from_json(values.at("a"));
    w.b = value_from_json(values.at("b"));
    w.m = value_from_json(values.at("m"));
    return w;
}

json conflict_to_json(const ConflictTest& c) {
    json j;
    j["script"] = serialize_mlgtest(c.test);
    j["verdict"] = verdict_to_json(c.verdict);
    json assertions = json::array();
    for (const auto& a : c.assertions) {
        json ja = assertion_to_json(a.assertion);
        ja["supported_by"] = a.supporting_roles;
        ja["action"] = a.action_repr;
        assertions.push_back(std::move(ja));
    }
    j["assertions"] = std::move(assertions);
    json witnesses = json::array();
    for (const auto& w : c.witnesses) witnesses.push_back(witness_to_json(w));
    j["witnesses"] = std::move(witnesses);
    return j;
}

ConflictTest conflict_from_json(const json& j) {
    ConflictTest c;
    auto parsed = parse_mlgtest("report", j.at("script").get<std::string>());
    if (!parsed.ok()) throw ReportParseError("conflict test script does not parse");
    c.test = *parsed.test;
    c.verdict = verdict_from_json(j.at("verdict"));
    for (const auto& ja : j.at("assertions")) {
        AttributedAssertion a;
        a.assertion = assertion_from_json(ja);
        for (const auto& r : ja.at("supported_by")) a.supporting_roles.insert(r.get<std::string>());
        a.action_repr = ja.value("action", "");
        c.assertions.push_back(std::move(a));
    }
    for (const auto& jw : j.at("witnesses")) c.witnesses.push_back(witness_from_json(jw));
    return c;
}

json target_to_json(const TargetResult& t) {
    json j;
    j["role"] = t.role;
    json uuts = json::array();
    for (const auto& u : t.uuts) uuts.push_back(uut_to_json(u));
    j["uuts"] = std::move(uuts);
    j["fallback_used"] = t.fallback_used;
    j["skipped"] = t.skipped_reason;
    json conflicts = json::array();
    for (const auto& c : t.conflicts) conflicts.push_back(conflict_to_json(c));
    j["conflicts"] = std::move(conflicts);
    json exceptions = json::array();
    for (const auto& e : t.exception_tests) {
        json je;
        je["script"] = serialize_mlgtest(e.test);
        je["exception"] = exc_kind_name(e.kind);
        je["action_index"] = e.action_index;
        exceptions.push_back(std::move(je));
    }
    j["exception_tests"] = std::move(exceptions);
    j["stats"] = {{"candidates_evaluated", t.stats.candidates_evaluated},
                  {"variant_executions", t.stats.variant_executions},
                  {"max_diff_coverage", t.stats.max_diff_coverage},
                  {"goal_counts", t.stats.goal_counts}};
    return j;
}

TargetResult target_from_json(const json& j) {
    TargetResult t;
    t.role = j.at("role").get<std::string>();
    for (const auto& ju : j.at("uuts")) t.uuts.push_back(uut_from_json(ju));
    t.fallback_used = j.at("fallback_used").get<bool>();
    t.skipped_reason = j.at("skipped").get<std::string>();
    for (const auto& jc : j.at("conflicts")) t.conflicts.push_back(conflict_from_json(jc));
    for (const auto& je : j.at("exception_tests")) {
        ExceptionTest e;
        auto parsed = parse_mlgtest("report", je.at("script").get<std::string>());
        if (!parsed.ok()) throw ReportParseError("exception test script does not parse");
        e.test = *parsed.test;
        auto kind = exc_kind_from_name(je.at("exception").get<std::string>());
        if (!kind) throw ReportParseError("bad exception kind");
        e.kind = *kind;
        e.action_index = je.at("action_index").get<int>();
        t.exception_tests.push_back(std::move(e));
    }
    const auto& stats = j.at("stats");
    t.stats.candidates_evaluated = stats.at("candidates_evaluated").get<int>();
    t.stats.variant_executions =
        stats.at("variant_executions").get<std::map<std::string, int>>();
    t.stats.max_diff_coverage =
        stats.at("max_diff_coverage").get<std::map<std::string, double>>();
    t.stats.goal_counts = stats.at("goal_counts").get<std::map<std::string, int>>();
    return t;
}

json config_to_json(const GenConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["exec_budget"] = c.exec_budget;
    j["search_budget"] = c.search_budget;
    j["population_size"] = c.population_size;
    j["mutation_rate"] = c.mutation_rate;
    j["criteria"] = criteria_name(c.criteria);
    j["stability_runs"] = c.stability_runs;
    j["int_pool"] = c.int_pool;
    j["stop_on_first_conflict"] = c.stop_on_first_conflict;
    j["jobs"] = c.jobs;
    return j;
}

GenConfig config_from_json(const json& j) {
    GenConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.exec_budget = j.at("exec_budget").get<long long>();
    c.search_budget = j.at("search_budget").get<int>();
    c.population_size = j.at("population_size").get<int>();
    c.mutation_rate = j.at("mutation_rate").get<double>();
    auto criteria = criteria_from_name(j.at("criteria").get<std::string>());
    if (!criteria) throw ReportParseError("bad criteria");
    c.criteria = *criteria;
    c.stability_runs = j.at("stability_runs").get<int>();
    c.int_pool = j.at("int_pool").get<std::vector<std::int64_t>>();
    c.stop_on_first_conflict = j.at("stop_on_first_conflict").get<bool>();
    c.jobs = j.at("jobs").get<int>();
    return c;
}

} // namespace

std::string report_to_json(const ReportDocument& doc) {
    json j;
    j["schema"] = doc.schema;
    j["tool_version"] = doc.tool_version;
    j["scenario"] = {{"id", doc.payload.scenario_id},
                     {"kind", merge_kind_name(doc.payload.scenario_kind)},
                     {"path", doc.scenario_path}};
    j["config"] = config_to_json(doc.config);
    j["config"]["depth"] = doc.selection.max_depth;
    j["config"]["max_uuts"] = doc.selection.max_uuts;
    json targets = json::array();
    for (const auto& t : doc.payload.targets) targets.push_back(target_to_json(t));
    j["targets"] = std::move(targets);
    j["conflicts_total"] = doc.payload.total_conflicts();
    j["timing_ms"] = doc.timing_ms;
    return j.dump(2) + "\n";
}

ReportDocument report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ReportParseError(std::string("report is not valid JSON: ") + e.what());
    }
    try {
        ReportDocument doc;
        doc.schema = j.at("schema").get<std::string>();
        if (doc.schema != kReportSchema)
            throw ReportParseError("unsupported report schema: " + doc.schema);
        doc.tool_version = j.at("tool_version").get<std::string>();
        const auto& scenario = j.at("scenario");
        doc.payload.scenario_id = scenario.at("id").get<std::string>();
        std::string kind = scenario.at("kind").get<std::string>();
        doc.payload.scenario_kind = kind == "2way"      ? MergeKind::two_way
                                    : kind == "octopus" ? MergeKind::octopus
                                                        : MergeKind::three_way;
        doc.scenario_path = scenario.at("path").get<std::string>();
        doc.config = config_from_json(j.at("config"));
        doc.selection.max_depth = j.at("config").at("depth").get<int>();
        doc.selection.max_uuts = j.at("config").at("max_uuts").get<int>();
        for (const auto& jt : j.at("targets")) doc.payload.targets.push_back(target_from_json(jt));
        doc.timing_ms = j.at("timing_ms").get<std::map<std::string, double>>();
        return doc;
    } catch (const json::exception& e) {
        throw ReportParseError(std::string("malformed report: ") + e.what());
    }
}

} // namespace tom
