#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tom/interp.hpp"
#include "tom/oracle.hpp"

#include "test_util.hpp"

using namespace tom;
using tom::test::fixture_version;
using tom::test::test_or_die;

namespace {

ExecutionValuation valuation(const std::vector<std::int64_t>& values) {
    ExecutionValuation v;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ObservationPoint p;
        p.action_index = static_cast<int>(i);
        p.kind = ObservationPoint::Kind::return_value;
        v.slots.emplace_back(p, int_value(values[i]));
    }
    return v;
}

// Literal transcription of the negated conditions, evaluated independently of
// the production predicates.
bool neg_chi1(const std::vector<int>& o, const std::vector<int>& a, const std::vector<int>& m) {
    for (std::size_t i = 0; i < o.size(); ++i)
        if (o[i] != a[i] && a[i] != m[i]) return true;
    return false;
}
bool neg_chi3(const std::vector<int>& o, const std::vector<int>& a, const std::vector<int>& b,
              const std::vector<int>& m) {
    for (std::size_t i = 0; i < o.size(); ++i)
        if (o[i] == a[i] && a[i] == b[i] && o[i] != m[i]) return true;
    return false;
}
bool neg_chi3_prime(const std::vector<int>& a, const std::vector<int>& b,
                    const std::vector<int>& m) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != m[i] && m[i] != b[i]) return true;
    return false;
}

void check_theorem1_tuple(const std::vector<int>& o, const std::vector<int>& a,
                          const std::vector<int>& b, const std::vector<int>& m) {
    bool nc1 = neg_chi1(o, a, m);
    bool nc2 = neg_chi1(o, b, m); // chi2 is chi1 with b in place of a
    bool lhs = nc1 || nc2 || neg_chi3(o, a, b, m);
    bool rhs = nc1 || nc2 || neg_chi3_prime(a, b, m);
    REQUIRE(lhs == rhs);

    // cross-check the production predicates on the same tuple
    auto widen = [](const std::vector<int>& v) {
        std::vector<std::int64_t> w(v.begin(), v.end());
        return valuation(w);
    };
    ExecutionValuation vo = widen(o), va = widen(a), vb = widen(b), vm = widen(m);
    bool revised = check_conflict_free_revised(vo, va, vb, vm);
    REQUIRE(revised == !lhs);
    auto witnesses = classify_violations(vo, va, vb, vm);
    REQUIRE(witnesses.empty() == revised);
    if (revised) REQUIRE(check_conflict_free_original(vo, va, vb, vm));
}

} // namespace

TEST_CASE("theorem 1 equivalence, exhaustive single slot over {0,1,2}") {
    for (int o = 0; o < 3; ++o)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int m = 0; m < 3; ++m) check_theorem1_tuple({o}, {a}, {b}, {m});
}

TEST_CASE("theorem 1 equivalence, exhaustive two slots over {0,1}") {
    for (int code = 0; code < 256; ++code) {
        auto bit = [&](int k) { return (code >> k) & 1; };
        check_theorem1_tuple({bit(0), bit(1)}, {bit(2), bit(3)}, {bit(4), bit(5)},
                             {bit(6), bit(7)});
    }
}

TEST_CASE("fig5 shape: original check misses what the revised check reports") {
    ExecutionValuation o = valuation({0}), a = valuation({0}), b = valuation({0});
    ExecutionValuation m = valuation({1});
    CHECK(check_conflict_free_original(o, a, b, m));       // the documented false negative
    CHECK_FALSE(check_conflict_free_revised(o, a, b, m));  // caught after the revision
}

TEST_CASE("conflict-freedom checks on plain tuples") {
    SUBCASE("identity passes both") {
        ExecutionValuation v = valuation({7});
        CHECK(check_conflict_free_original(v, v, v, v));
        CHECK(check_conflict_free_revised(v, v, v, v));
    }
    SUBCASE("o=1 a=2 b=1 m=1 fails both") {
        CHECK_FALSE(check_conflict_free_original(valuation({1}), valuation({2}), valuation({1}),
                                                 valuation({1})));
        CHECK_FALSE(check_conflict_free_revised(valuation({1}), valuation({2}), valuation({1}),
                                                valuation({1})));
    }
    SUBCASE("o=1 a=2 b=1 m=2 passes the revised check") {
        CHECK(check_conflict_free_revised(valuation({1}), valuation({2}), valuation({1}),
                                          valuation({2})));
    }
    SUBCASE("revised implies original on random tuples") {
        for (int code = 0; code < 81; ++code) {
            int c = code;
            int o = c % 3; c /= 3;
            int a = c % 3; c /= 3;
            int b = c % 3; c /= 3;
            int m = c % 3;
            ExecutionValuation vo = valuation({o}), va = valuation({a}), vb = valuation({b}),
                               vm = valuation({m});
            if (check_conflict_free_revised(vo, va, vb, vm))
                CHECK(check_conflict_free_original(vo, va, vb, vm));
        }
    }
}

TEST_CASE("mismatched point lists are a usage error") {
    ExecutionValuation two = valuation({1, 2});
    ExecutionValuation one = valuation({1});
    CHECK_THROWS_AS(check_conflict_free_revised(two, one, two, two), ValuationMismatch);
    CHECK_THROWS_AS(classify_violations(two, two, two, one), ValuationMismatch);
    CHECK_THROWS_AS((void)unexpected_behavior(two, {one}), ValuationMismatch);
    CHECK_THROWS_AS((void)lost_behavior(two, one, two), ValuationMismatch);
}

TEST_CASE("classify_violations on the fig2 sum slot") {
    // o=3, a=4, b=4, m=5 at the single observed slot
    auto witnesses =
        classify_violations(valuation({3}), valuation({4}), valuation({4}), valuation({5}));
    REQUIRE(witnesses.size() == 3);
    CHECK(witnesses[0].kind == ViolationWitness::Kind::neg_chi1);
    CHECK(witnesses[0].variant_index == 1);
    CHECK(witnesses[1].kind == ViolationWitness::Kind::neg_chi2);
    CHECK(witnesses[1].variant_index == 2);
    CHECK(witnesses[2].kind == ViolationWitness::Kind::neg_chi3_prime);
    for (const auto& w : witnesses) {
        CHECK(w.slot == 0);
        CHECK(w.o == int_value(3));
        CHECK(w.m == int_value(5));
    }
}

TEST_CASE("income example: intended merge still violates chi1 and chi2") {
    // salary=10, stock=5, rent=3: o=10, a=15, b=13, m=18
    auto prog_for = [&](const char* role) { return fixture_version(std::string("income/") + role); };
    TestCase t = test_or_die("i = new Income()\n"
                             "i.setSalary(10)\n"
                             "i.setStock(5)\n"
                             "i.setRent(3)\n"
                             "observe i.total()\n");
    ExecutionValuation o = run_test(*prog_for("base"), t).valuation;
    ExecutionValuation a = run_test(*prog_for("stock"), t).valuation;
    ExecutionValuation b = run_test(*prog_for("rent"), t).valuation;
    ExecutionValuation m = run_test(*prog_for("merge"), t).valuation;

    ObservationPoint total{4, ObservationPoint::Kind::return_value, "", "", ""};
    CHECK(*o.value_at(total) == int_value(10));
    CHECK(*a.value_at(total) == int_value(15));
    CHECK(*b.value_at(total) == int_value(13));
    CHECK(*m.value_at(total) == int_value(18));

    auto witnesses = classify_violations(o, a, b, m);
    bool has_chi1 = false, has_chi2 = false;
    for (const auto& w : witnesses) {
        has_chi1 = has_chi1 || w.kind == ViolationWitness::Kind::neg_chi1;
        has_chi2 = has_chi2 || w.kind == ViolationWitness::Kind::neg_chi2;
    }
    CHECK(has_chi1);
    CHECK(has_chi2);
}

TEST_CASE("classify empty on identical valuations") {
    ExecutionValuation v = valuation({1, 2, 3});
    CHECK(classify_violations(v, v, v, v).empty());
}

TEST_CASE("unexpected_behavior") {
    SUBCASE("unanimous difference yields a verdict") {
        auto verdict = unexpected_behavior(valuation({5}),
                                           {valuation({3}), valuation({3}), valuation({3})});
        REQUIRE(verdict.has_value());
        CHECK(verdict->kind == OracleVerdict::Kind::unexpected_behavior);
        CHECK(verdict->witness_slots == std::set<int>{0});
        CHECK(verdict->assertion.expected == int_value(5));
    }
    SUBCASE("one agreeing parent blocks the verdict") {
        CHECK_FALSE(unexpected_behavior(valuation({5}), {valuation({3}), valuation({5})}));
    }
    SUBCASE("fig2 roles: merge differs from o, a and b at the sum slot") {
        auto verdict = unexpected_behavior(
            valuation({5}), {valuation({3}), valuation({4}), valuation({4})});
        REQUIRE(verdict.has_value());
        CHECK(verdict->witness_slots == std::set<int>{0});
    }
    SUBCASE("verdict slots equal the brute-force set") {
        for (int code = 0; code < 81; ++code) {
            int c = code;
            std::vector<std::int64_t> o{c % 3}; c /= 3;
            std::vector<std::int64_t> a{c % 3}; c /= 3;
            std::vector<std::int64_t> b{c % 3}; c /= 3;
            std::vector<std::int64_t> m{c % 3};
            auto verdict = unexpected_behavior(valuation(m),
                                               {valuation(o), valuation(a), valuation(b)});
            bool expected = m[0] != o[0] && m[0] != a[0] && m[0] != b[0];
            CHECK(verdict.has_value() == expected);
        }
    }
    SUBCASE("unobserved target slots are not assertable") {
        ExecutionValuation target;
        ObservationPoint p{0, ObservationPoint::Kind::return_value, "", "", ""};
        target.slots.emplace_back(p, Value{Unobserved{}});
        ExecutionValuation parent;
        parent.slots.emplace_back(p, int_value(1));
        CHECK_FALSE(unexpected_behavior(target, {parent}).has_value());
    }
}

TEST_CASE("lost_behavior") {
    SUBCASE("a variant's new behavior vanished") {
        auto verdict = lost_behavior(valuation({7}), valuation({3}), valuation({3}), 1);
        REQUIRE(verdict.has_value());
        CHECK(verdict->kind == OracleVerdict::Kind::lost_behavior);
        CHECK(verdict->parent_index == 1);
        CHECK(verdict->witness_slots == std::set<int>{0});
        CHECK(verdict->assertion.expected == int_value(7));
    }
    SUBCASE("preserved behavior yields none") {
        CHECK_FALSE(lost_behavior(valuation({7}), valuation({3}), valuation({7})));
    }
    SUBCASE("fig2 roles with variant a as target: a=4, o=3, m=5") {
        auto verdict = lost_behavior(valuation({4}), valuation({3}), valuation({5}), 1);
        REQUIRE(verdict.has_value());
        CHECK(verdict->witness_slots == std::set<int>{0});
    }
}

TEST_CASE("exception values participate in slot equality by kind") {
    ExecutionValuation norm = valuation({1});
    ExecutionValuation exc;
    exc.slots.emplace_back(norm.slots[0].first, exc_value(ExcKind::div_by_zero));
    ExecutionValuation exc2;
    exc2.slots.emplace_back(norm.slots[0].first, exc_value(ExcKind::div_by_zero));
    ExecutionValuation link;
    link.slots.emplace_back(norm.slots[0].first, exc_value(ExcKind::link_error));

    // same kind: equal; different kind or value-vs-exception: different
    CHECK_FALSE(unexpected_behavior(exc, {exc2}).has_value());
    auto v1 = unexpected_behavior(exc, {norm});
    REQUIRE(v1.has_value());
    CHECK(v1->assertion.expected == exc_value(ExcKind::div_by_zero));
    CHECK(unexpected_behavior(exc, {link}).has_value());
}
