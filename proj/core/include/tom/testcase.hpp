#ifndef TOM_TESTCASE_HPP
#define TOM_TESTCASE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tom/source.hpp"
#include "tom/value.hpp"

namespace tom {

// Construct an object and bind it to a label: `c1 = new C(1, 2)`.
struct ConstructAction {
    std::string label;
    std::string class_name;
    std::vector<Value> args; // int/bool literals

    bool operator==(const ConstructAction&) const = default;
};

// Invoke a method on a labeled object, or a top-level function:
// `observe c1.getSum()` / `c1.setX(5)` / `observe total(3)`.
struct InvokeAction {
    std::optional<std::string> label; // nullopt => top-level function
    std::string method;
    std::vector<Value> args;
    bool observe = false; // record the return value

    bool operator==(const InvokeAction&) const = default;
};

// `observe field c1.x`
struct ObserveFieldAction {
    std::string label;
    std::string field;

    bool operator==(const ObserveFieldAction&) const = default;
};

using TestAction = std::variant<ConstructAction, InvokeAction, ObserveFieldAction>;

struct ObservationPoint {
    enum class Kind { return_value, field_state, exception_marker };
    int action_index = 0;
    Kind kind = Kind::exception_marker;
    // field_state details, derived from the test text (never from a program),
    // so point lists are identical across versions by construction.
    std::string class_name;
    std::string object_label;
    std::string field_name;

    auto operator<=>(const ObservationPoint&) const = default;

    // "ret@2", "field@5", "exc@1"
    std::string str() const;
    static std::optional<ObservationPoint> parse(const std::string& text);
};

struct Assertion {
    ObservationPoint point;
    Value expected; // never Unobserved

    bool operator==(const Assertion&) const = default;
};

struct TestCase {
    std::vector<TestAction> actions;
    std::vector<Assertion> assertions;
    std::uint64_t gen_seed = 0;
    std::uint64_t gen_iteration = 0;

    bool operator==(const TestCase&) const = default;

    // In test order: for each action, the primary point (return value of an
    // observed invoke / observed field state) when present, then the action's
    // exception marker.
    std::vector<ObservationPoint> observation_points() const;
};

struct TestParseResult {
    std::optional<TestCase> test;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return test.has_value(); }
};

// One action per line; trailing `assert <point> == <value>` lines. Blank
// lines and `#` comments are skipped. Validates define-before-use and
// uniqueness of labels and that assertion points exist in the test.
TestParseResult parse_mlgtest(const std::string& file_name, const std::string& text);

std::string serialize_mlgtest(const TestCase& test);
std::string action_str(const TestAction& action);

} // namespace tom

#endif
