#include "tom/ast.hpp"

namespace tom {

std::string Type::str() const {
    switch (kind) {
        case Kind::int_t: return "int";
        case Kind::bool_t: return "bool";
        case Kind::void_t: return "void";
        case Kind::class_t: return class_name;
        case Kind::invalid: return "<invalid>";
    }
    return "<invalid>";
}

std::string binary_op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return "+";
        case BinaryOp::sub: return "-";
        case BinaryOp::mul: return "*";
        case BinaryOp::div: return "/";
        case BinaryOp::mod: return "%";
        case BinaryOp::lt: return "<";
        case BinaryOp::le: return "<=";
        case BinaryOp::gt: return ">";
        case BinaryOp::ge: return ">=";
        case BinaryOp::eq: return "==";
        case BinaryOp::ne: return "!=";
        case BinaryOp::and_and: return "&&";
        case BinaryOp::or_or: return "||";
    }
    return "?";
}

const FieldDef* ClassDef::find_field(const std::string& n) const {
    for (const auto& f : fields)
        if (f.name == n) return &f;
    return nullptr;
}

const MethodDef* ClassDef::find_method(const std::string& n, int arity) const {
    for (const auto& m : methods)
        if (m.name == n && m.arity() == arity) return &m;
    return nullptr;
}

const ClassDef* Program::find_class(const std::string& n) const {
    for (const auto& c : classes)
        if (c.name == n) return &c;
    return nullptr;
}

const MethodDef* Program::find_function(const std::string& n, int arity) const {
    for (const auto& f : functions)
        if (f.name == n && f.arity() == arity) return &f;
    return nullptr;
}

const SourceFile* Program::find_file(const std::string& n) const {
    for (const auto& f : files)
        if (f.name == n) return &f;
    return nullptr;
}

} // namespace tom
