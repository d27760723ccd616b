#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tom/interp.hpp"
#include "tom/parser.hpp"

#include "test_util.hpp"

using namespace tom;
using tom::test::fixture_version;
using tom::test::parse_or_die;
using tom::test::test_or_die;

TEST_CASE("minimal well-formed unit parses") {
    auto prog = parse_or_die("class C { var x: int = 0; fn getX(): int { return this.x; } }");
    REQUIRE(prog->classes.size() == 1);
    CHECK(prog->classes[0].fields.size() == 1);
    CHECK(prog->classes[0].methods.size() == 1);
    CHECK(prog->functions.empty());
}

TEST_CASE("missing return on some path is a static error") {
    ParseResult r = parse_program("input.mlg", "class C { fn m(): int { } }");
    REQUIRE_FALSE(r.ok());
    bool found = false;
    for (const auto& d : r.diagnostics)
        found = found || d.message.find("missing return") != std::string::npos;
    CHECK(found);
}

TEST_CASE("fig2 versions each parse to 1 class, 2 fields, 3 methods") {
    for (const char* role : {"base", "alpha", "beta", "merge"}) {
        auto prog = fixture_version(std::string("fig2/") + role);
        REQUIRE(prog->classes.size() == 1);
        CHECK(prog->classes[0].fields.size() == 2);
        CHECK(prog->classes[0].methods.size() == 3);
        CHECK(prog->classes[0].name == "C");
    }
}

TEST_CASE("parse diagnostics carry positions") {
    ParseResult r = parse_program("input.mlg", "class C {\n  var x: int = ;\n}");
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].line == 2);

    SUBCASE("duplicate entities") {
        ParseResult dup = parse_program(
            "input.mlg", "class C { var x: int = 0; var x: int = 1; }");
        REQUIRE_FALSE(dup.ok());
        CHECK(dup.diagnostics[0].message.find("duplicate field") != std::string::npos);
    }
    SUBCASE("type errors") {
        ParseResult bad = parse_program(
            "input.mlg", "class C { fn m(): int { return true; } }");
        REQUIRE_FALSE(bad.ok());
    }
}

static const char* kFig2Test = R"(c = new C()
c.setX(1)
c.setY(2)
observe c.getSum()
)";

TEST_CASE("fig2 base run: setX(1) setY(2) getSum -> 3") {
    auto prog = fixture_version("fig2/base");
    TestCase t = test_or_die(kFig2Test);
    ExecutionResult r = run_test(*prog, t);
    CHECK(r.terminated.kind == TerminationKind::normal);
    const Value* sum = r.valuation.value_at({3, ObservationPoint::Kind::return_value, "", "", ""});
    REQUIRE(sum != nullptr);
    CHECK(*sum == int_value(3));
}

TEST_CASE("fig2 merge run: setX and setY both add one -> 5") {
    auto prog = fixture_version("fig2/merge");
    TestCase t = test_or_die(kFig2Test);
    ExecutionResult r = run_test(*prog, t);
    const Value* sum = r.valuation.value_at({3, ObservationPoint::Kind::return_value, "", "", ""});
    REQUIRE(sum != nullptr);
    CHECK(*sum == int_value(5));
}

TEST_CASE("while(true) exhausts exactly the budget") {
    auto prog = parse_or_die("fn spin(): void { while (true) { } }");
    TestCase t = test_or_die("spin()\n");
    ExecutionResult r = run_test(*prog, t, 1000);
    CHECK(r.terminated.kind == TerminationKind::budget_exhausted);
    CHECK(r.steps_used == 1000);
}

TEST_CASE("division and modulo by zero raise DivByZero") {
    auto prog = parse_or_die("fn f(a: int, b: int): int { return a / b; }\n"
                             "fn g(a: int, b: int): int { return a % b; }");
    TestCase t = test_or_die("observe f(1, 0)\nobserve g(5, 5)\n");
    ExecutionResult r = run_test(*prog, t);
    CHECK(r.terminated.kind == TerminationKind::exception);
    CHECK(r.terminated.exc == ExcKind::div_by_zero);
    CHECK(r.terminated.action_index == 0);
    // the throwing action's slots carry the exception, later slots stay unobserved
    CHECK(*r.valuation.value_at({0, ObservationPoint::Kind::return_value, "", "", ""}) ==
          exc_value(ExcKind::div_by_zero));
    CHECK(*r.valuation.value_at({1, ObservationPoint::Kind::return_value, "", "", ""}) ==
          Value{Unobserved{}});
    CHECK(*r.valuation.value_at({1, ObservationPoint::Kind::exception_marker, "", "", ""}) ==
          Value{Unobserved{}});
}

TEST_CASE("overflow wraps in two's complement") {
    auto prog = parse_or_die("fn f(a: int, b: int): int { return a + b; }\n"
                             "fn m(a: int, b: int): int { return a * b; }");
    TestCase t = test_or_die("observe f(9223372036854775807, 1)\n"
                             "observe m(-9223372036854775808, -1)\n");
    ExecutionResult r = run_test(*prog, t);
    CHECK(*r.valuation.value_at({0, ObservationPoint::Kind::return_value, "", "", ""}) ==
          int_value(INT64_MIN));
    CHECK(*r.valuation.value_at({1, ObservationPoint::Kind::return_value, "", "", ""}) ==
          int_value(INT64_MIN));
}

TEST_CASE("unresolvable references yield LinkError observations, not crashes") {
    auto prog = fixture_version("fig2/base");
    TestCase t = test_or_die("c = new D()\n"
                             "observe c.getSum()\n"
                             "d = new C()\n"
                             "observe d.nothere(1)\n"
                             "observe d.getSum()\n"
                             "observe field d.zz\n");
    ExecutionResult r = run_test(*prog, t);
    CHECK(r.terminated.kind == TerminationKind::normal); // link errors do not abort
    auto at = [&](int idx, ObservationPoint::Kind k) {
        const Value* v = r.valuation.value_at({idx, k, "", "", ""});
        REQUIRE(v != nullptr);
        return *v;
    };
    CHECK(at(1, ObservationPoint::Kind::return_value) == exc_value(ExcKind::link_error));
    CHECK(at(3, ObservationPoint::Kind::return_value) == exc_value(ExcKind::link_error));
    CHECK(at(4, ObservationPoint::Kind::return_value) == int_value(0)); // d itself is fine
    CHECK(at(5, ObservationPoint::Kind::field_state) == exc_value(ExcKind::link_error));
}

TEST_CASE("deep recursion terminates with StackOverflow") {
    auto prog = parse_or_die("fn f(): int { return f(); }");
    TestCase t = test_or_die("observe f()\n");
    ExecutionResult r = run_test(*prog, t);
    CHECK(r.terminated.kind == TerminationKind::exception);
    CHECK(r.terminated.exc == ExcKind::stack_overflow);
}

TEST_CASE("determinism: identical runs produce identical results") {
    auto prog = fixture_version("fig2/merge");
    TestCase t = test_or_die(kFig2Test);
    ExecutionResult a = run_test(*prog, t);
    ExecutionResult b = run_test(*prog, t);
    CHECK(a == b);
}

TEST_CASE("isolation: a prior run does not affect the next") {
    auto prog = fixture_version("fig2/merge");
    TestCase t1 = test_or_die("c = new C()\nc.setX(7)\n");
    TestCase t2 = test_or_die(kFig2Test);
    ExecutionResult fresh = run_test(*prog, t2);
    run_test(*prog, t1);
    ExecutionResult after = run_test(*prog, t2);
    CHECK(fresh == after);
}

TEST_CASE("monotone coverage: prefix covers a subset") {
    auto prog = fixture_version("fig2/merge");
    TestCase full = test_or_die(kFig2Test);
    for (std::size_t prefix_len = 1; prefix_len < full.actions.size(); ++prefix_len) {
        TestCase prefix;
        prefix.actions.assign(full.actions.begin(),
                              full.actions.begin() + static_cast<std::ptrdiff_t>(prefix_len));
        ExecutionResult rp = run_test(*prog, prefix);
        ExecutionResult rf = run_test(*prog, full);
        REQUIRE(rp.terminated.kind != TerminationKind::budget_exhausted);
        REQUIRE(rf.terminated.kind != TerminationKind::budget_exhausted);
        for (const auto& line : rp.covered_lines) CHECK(rf.covered_lines.count(line) == 1);
    }
}

TEST_CASE("budget safety on random tests") {
    auto prog = fixture_version("fig2/merge");
    std::mt19937_64 rng(7);
    const char* methods[] = {"setX", "setY", "getSum"};
    for (int k = 0; k < 50; ++k) {
        TestCase t;
        t.actions.emplace_back(ConstructAction{"c", "C", {}});
        int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            InvokeAction inv;
            inv.label = "c";
            inv.method = methods[rng() % 3];
            if (inv.method != "getSum") inv.args.push_back(int_value(static_cast<int>(rng() % 9)));
            inv.observe = inv.method == "getSum";
            t.actions.emplace_back(std::move(inv));
        }
        ExecutionResult r = run_test(*prog, t, 200);
        CHECK(r.steps_used <= 200);
    }
}

TEST_CASE("mlgtest round-trip") {
    TestCase t = test_or_die("# generated seed=42 iter=7\n"
                             "c = new C(3, true)\n"
                             "c.setX(-5)\n"
                             "observe c.getSum()\n"
                             "observe field c.x\n"
                             "observe total(1)\n"
                             "assert ret@2 == int:5\n"
                             "assert exc@1 == exc:none\n");
    CHECK(t.gen_seed == 42);
    CHECK(t.gen_iteration == 7);
    REQUIRE(t.actions.size() == 5);
    REQUIRE(t.assertions.size() == 2);
    TestCase again = test_or_die(serialize_mlgtest(t));
    CHECK(again == t);
}

TEST_CASE("mlgtest rejects malformed input") {
    CHECK_FALSE(parse_mlgtest("t", "c = new C(\n").ok());
    CHECK_FALSE(parse_mlgtest("t", "c.m(1)\n").ok());             // label not defined
    CHECK_FALSE(parse_mlgtest("t", "c = new C()\nc = new C()\n").ok()); // duplicate label
    CHECK_FALSE(parse_mlgtest("t", "assert ret@0 == int:1\nf()\n").ok()); // action after assert
    CHECK_FALSE(parse_mlgtest("t", "f()\nassert ret@0 == int:1\n").ok()); // unobserved point
    CHECK_FALSE(parse_mlgtest("t", "observe field c.x\n").ok());
}

TEST_CASE("observation point order follows the test") {
    TestCase t = test_or_die("c = new C()\nobserve c.getSum()\nobserve field c.x\n");
    auto points = t.observation_points();
    REQUIRE(points.size() == 5);
    CHECK(points[0].kind == ObservationPoint::Kind::exception_marker);
    CHECK(points[1].kind == ObservationPoint::Kind::return_value);
    CHECK(points[2].kind == ObservationPoint::Kind::exception_marker);
    CHECK(points[3].kind == ObservationPoint::Kind::field_state);
    CHECK(points[3].class_name == "C");
    CHECK(points[4].kind == ObservationPoint::Kind::exception_marker);
}
