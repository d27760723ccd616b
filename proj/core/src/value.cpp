#include "tom/value.hpp"

namespace tom {

std::string exc_kind_name(ExcKind k) {
    switch (k) {
        case ExcKind::none: return "none";
        case ExcKind::div_by_zero: return "DivByZero";
        case ExcKind::link_error: return "LinkError";
        case ExcKind::stack_overflow: return "StackOverflow";
    }
    return "none";
}

std::optional<ExcKind> exc_kind_from_name(const std::string& name) {
    if (name == "none") return ExcKind::none;
    if (name == "DivByZero") return ExcKind::div_by_zero;
    if (name == "LinkError") return ExcKind::link_error;
    if (name == "StackOverflow") return ExcKind::stack_overflow;
    return std::nullopt;
}

std::string value_str(const Value& v) {
    struct Printer {
        std::string operator()(const Unobserved&) const { return "unobserved"; }
        std::string operator()(std::int64_t i) const { return "int:" + std::to_string(i); }
        std::string operator()(bool b) const { return b ? "bool:true" : "bool:false"; }
        std::string operator()(const ObjectRef& o) const { return "obj:" + std::to_string(o.id); }
        std::string operator()(const Exc& e) const { return "exc:" + exc_kind_name(e.kind); }
    };
    return std::visit(Printer{}, v);
}

std::optional<Value> value_from_str(const std::string& text) {
    if (text == "unobserved") return Value{Unobserved{}};
    auto split = text.find(':');
    if (split == std::string::npos) return std::nullopt;
    std::string tag = text.substr(0, split);
    std::string rest = text.substr(split + 1);
    if (tag == "int") {
        try {
            std::size_t used = 0;
            std::int64_t v = std::stoll(rest, &used);
            if (used != rest.size()) return std::nullopt;
            return int_value(v);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    if (tag == "bool") {
        if (rest == "true") return bool_value(true);
        if (rest == "false") return bool_value(false);
        return std::nullopt;
    }
    if (tag == "obj") {
        try {
            return object_value(std::stoll(rest));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    if (tag == "exc") {
        auto k = exc_kind_from_name(rest);
        if (!k) return std::nullopt;
        return exc_value(*k);
    }
    return std::nullopt;
}

} // namespace tom
