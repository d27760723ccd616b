#ifndef TOM_VALUE_HPP
#define TOM_VALUE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace tom {

enum class ExcKind { none, div_by_zero, link_error, stack_overflow };

std::string exc_kind_name(ExcKind k);
std::optional<ExcKind> exc_kind_from_name(const std::string& name);

struct Unobserved {
    bool operator==(const Unobserved&) const = default;
};
struct ObjectRef {
    std::int64_t id = 0;
    bool operator==(const ObjectRef&) const = default;
};
struct Exc {
    ExcKind kind = ExcKind::none;
    bool operator==(const Exc&) const = default;
};

// Observation values. Exc values compare equal iff their kinds are equal;
// Unobserved equals only Unobserved. Default-constructed value is Unobserved.
using Value = std::variant<Unobserved, std::int64_t, bool, ObjectRef, Exc>;

inline Value int_value(std::int64_t v) { return Value{std::in_place_type<std::int64_t>, v}; }
inline Value bool_value(bool v) { return Value{std::in_place_type<bool>, v}; }
inline Value exc_value(ExcKind k) { return Value{Exc{k}}; }
inline Value object_value(std::int64_t id) { return Value{ObjectRef{id}}; }

inline bool is_unobserved(const Value& v) { return std::holds_alternative<Unobserved>(v); }
inline bool is_exception(const Value& v) {
    const auto* e = std::get_if<Exc>(&v);
    return e && e->kind != ExcKind::none;
}

// Textual form used in .mlgtest assertions and report JSON:
// int:5, bool:true, exc:none, exc:DivByZero, obj:3, unobserved.
std::string value_str(const Value& v);
std::optional<Value> value_from_str(const std::string& text);

} // namespace tom

#endif
