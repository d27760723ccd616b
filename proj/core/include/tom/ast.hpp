#ifndef TOM_AST_HPP
#define TOM_AST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tom/source.hpp"

namespace tom {

struct Type {
    enum class Kind { int_t, bool_t, void_t, class_t, invalid };
    Kind kind = Kind::invalid;
    std::string class_name; // set when kind == class_t

    static Type int_t() { return {Kind::int_t, {}}; }
    static Type bool_t() { return {Kind::bool_t, {}}; }
    static Type void_t() { return {Kind::void_t, {}}; }
    static Type class_t(std::string name) { return {Kind::class_t, std::move(name)}; }
    static Type invalid() { return {Kind::invalid, {}}; }

    bool operator==(const Type&) const = default;
    bool is_value_type() const { return kind == Kind::int_t || kind == Kind::bool_t; }
    std::string str() const;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class UnaryOp { neg, logical_not };
enum class BinaryOp { add, sub, mul, div, mod, lt, le, gt, ge, eq, ne, and_and, or_or };

std::string binary_op_text(BinaryOp op);

struct IntLitExpr { std::int64_t value = 0; };
struct BoolLitExpr { bool value = false; };
struct VarRefExpr { std::string name; };
struct FieldRefExpr { std::string field; }; // this.<field>
struct UnaryExpr {
    UnaryOp op;
    ExprPtr operand;
};
struct BinaryExpr {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
// this.m(...), local.m(...) or toplevel f(...)
struct CallExpr {
    enum class Target { self, local, toplevel };
    Target target = Target::toplevel;
    std::string receiver; // local name when target == local
    std::string method;
    std::vector<ExprPtr> args;
    std::string resolved_class; // set by the checker (empty for toplevel)
};
struct NewExpr {
    std::string class_name;
    std::vector<ExprPtr> args;
    bool calls_ctor = false; // set by the checker: class has an explicit init
};

struct Expr {
    Span span;
    Type type; // filled in by the checker
    std::variant<IntLitExpr, BoolLitExpr, VarRefExpr, FieldRefExpr, UnaryExpr, BinaryExpr,
                 CallExpr, NewExpr>
        node;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct VarDeclStmt {
    std::string name;
    Type declared;
    ExprPtr init;
};
struct AssignStmt {
    std::string name;
    ExprPtr value;
};
struct FieldAssignStmt { // this.<field> = value
    std::string field;
    ExprPtr value;
};
struct IfStmt {
    ExprPtr cond;
    std::vector<StmtPtr> then_body;
    std::vector<StmtPtr> else_body;
};
struct WhileStmt {
    ExprPtr cond;
    std::vector<StmtPtr> body;
};
struct ReturnStmt {
    ExprPtr value; // null for bare `return;`
};
struct ExprStmt {
    ExprPtr expr;
};

struct Stmt {
    Span span;
    std::variant<VarDeclStmt, AssignStmt, FieldAssignStmt, IfStmt, WhileStmt, ReturnStmt, ExprStmt>
        node;
};

struct Param {
    std::string name;
    Type type;
    Span span;
};

struct MethodDef {
    std::string name; // "init" for constructors
    bool is_constructor = false;
    std::string owner_class; // empty for top-level functions
    std::vector<Param> params;
    Type return_type;
    std::vector<StmtPtr> body;
    Span span;
    // Signature + body token texts, whitespace/comments stripped; used for
    // change detection so reformatting is never a "change".
    std::vector<std::string> norm_tokens;

    int arity() const { return static_cast<int>(params.size()); }
};

struct FieldDef {
    std::string name;
    Type declared; // int_t or bool_t
    ExprPtr init;  // literal (possibly negated) expression
    Span span;
    std::vector<std::string> norm_tokens; // declared type + initializer tokens
};

struct ClassDef {
    std::string name;
    std::vector<FieldDef> fields;
    std::optional<MethodDef> constructor;
    std::vector<MethodDef> methods;
    Span span;

    const FieldDef* find_field(const std::string& n) const;
    const MethodDef* find_method(const std::string& n, int arity) const;
};

struct Program {
    std::vector<SourceFile> files;
    std::vector<ClassDef> classes;
    std::vector<MethodDef> functions; // top-level

    const ClassDef* find_class(const std::string& n) const;
    const MethodDef* find_function(const std::string& n, int arity) const;
    const SourceFile* find_file(const std::string& n) const;
};

using ProgramPtr = std::shared_ptr<const Program>;

} // namespace tom

#endif
