#include "tom/parser.hpp"

#include <sstream>

#include "tom/checker.hpp"
#include "tom/lexer.hpp"

namespace tom {

namespace {

// Recursive-descent parser over one file's token stream. Appends parsed
// declarations to the program under construction.
class Parser {
public:
    Parser(const std::string& file, std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : file_(file), tokens_(std::move(tokens)), diags_(diags) {}

    void parse_file(Program& prog) {
        while (!at(TokKind::end_of_file)) {
            if (at(TokKind::kw_class)) {
                auto cls = parse_class();
                if (cls) prog.classes.push_back(std::move(*cls));
            } else if (at(TokKind::kw_fn)) {
                auto fn = parse_method(/*owner=*/"", /*is_ctor=*/false);
                if (fn) prog.functions.push_back(std::move(*fn));
            } else {
                error("expected 'class' or 'fn' at top level");
                synchronize_toplevel();
            }
            if (failed_) return; // avoid cascades after unrecoverable errors
        }
    }

private:
    const std::string& file_;
    std::vector<Token> tokens_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    bool failed_ = false;

    const Token& cur() const { return tokens_[pos_]; }
    const Token& prev() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1]; }
    bool at(TokKind k) const { return cur().kind == k; }

    TokKind peek(std::size_t n) const {
        std::size_t idx = pos_ + n;
        return idx < tokens_.size() ? tokens_[idx].kind : TokKind::end_of_file;
    }

    const Token& advance() {
        if (!at(TokKind::end_of_file)) ++pos_;
        return prev();
    }

    bool accept(TokKind k) {
        if (!at(k)) return false;
        advance();
        return true;
    }

    const Token* expect(TokKind k, const char* what) {
        if (at(k)) return &advance();
        error(std::string("expected ") + what + ", found '" +
              (cur().kind == TokKind::end_of_file ? "<eof>" : cur().text) + "'");
        failed_ = true;
        return nullptr;
    }

    void error(const std::string& msg) { diags_.push_back({file_, cur().line, cur().column, msg}); }

    void synchronize_toplevel() {
        while (!at(TokKind::end_of_file) && !at(TokKind::kw_class) && !at(TokKind::kw_fn)) advance();
    }

    Span span_from(std::size_t start_tok) const {
        Span s;
        s.file = file_;
        const Token& a = tokens_[start_tok];
        const Token& b = prev();
        s.first_line = a.line;
        s.last_line = b.line;
        s.begin = a.offset;
        s.end = b.offset + b.length;
        return s;
    }

    std::vector<std::string> token_texts(std::size_t from, std::size_t to) const {
        std::vector<std::string> out;
        out.reserve(to - from);
        for (std::size_t k = from; k < to; ++k) out.push_back(tokens_[k].text);
        return out;
    }

    // --- declarations ---

    std::optional<ClassDef> parse_class() {
        std::size_t start = pos_;
        expect(TokKind::kw_class, "'class'");
        const Token* name = expect(TokKind::identifier, "class name");
        if (!name) return std::nullopt;
        ClassDef cls;
        cls.name = name->text;
        expect(TokKind::lbrace, "'{'");
        while (!at(TokKind::rbrace) && !at(TokKind::end_of_file) && !failed_) {
            if (at(TokKind::kw_var)) {
                auto f = parse_field();
                if (f) cls.fields.push_back(std::move(*f));
            } else if (at(TokKind::kw_init)) {
                auto ctor = parse_method(cls.name, /*is_ctor=*/true);
                if (ctor) {
                    if (cls.constructor) {
                        diags_.push_back({file_, ctor->span.first_line, 1,
                                          "duplicate constructor in class " + cls.name});
                        failed_ = true;
                    } else {
                        cls.constructor = std::move(*ctor);
                    }
                }
            } else if (at(TokKind::kw_fn)) {
                auto m = parse_method(cls.name, /*is_ctor=*/false);
                if (m) cls.methods.push_back(std::move(*m));
            } else {
                error("expected 'var', 'init' or 'fn' in class body");
                failed_ = true;
            }
        }
        expect(TokKind::rbrace, "'}'");
        cls.span = span_from(start);
        return cls;
    }

    std::optional<FieldDef> parse_field() {
        std::size_t start = pos_;
        expect(TokKind::kw_var, "'var'");
        const Token* name = expect(TokKind::identifier, "field name");
        expect(TokKind::colon, "':'");
        Type ty = parse_type(/*allow_void=*/false);
        std::size_t norm_from = pos_ - 1; // include the type token
        expect(TokKind::assign, "'='");
        ExprPtr init = parse_expr();
        std::size_t norm_to = pos_;
        expect(TokKind::semicolon, "';'");
        if (!name || failed_) return std::nullopt;
        FieldDef f;
        f.name = name->text;
        f.declared = ty;
        f.init = std::move(init);
        f.span = span_from(start);
        f.norm_tokens = token_texts(norm_from, norm_to);
        return f;
    }

    std::optional<MethodDef> parse_method(const std::string& owner, bool is_ctor) {
        std::size_t start = pos_;
        if (is_ctor) {
            expect(TokKind::kw_init, "'init'");
        } else {
            expect(TokKind::kw_fn, "'fn'");
        }
        MethodDef m;
        m.is_constructor = is_ctor;
        m.owner_class = owner;
        if (is_ctor) {
            m.name = "init";
            m.return_type = Type::void_t();
        } else {
            const Token* name = expect(TokKind::identifier, "function name");
            if (!name) return std::nullopt;
            m.name = name->text;
        }
        std::size_t norm_from = pos_; // params onward
        expect(TokKind::lparen, "'('");
        if (!at(TokKind::rparen)) {
            do {
                const Token* pname = expect(TokKind::identifier, "parameter name");
                expect(TokKind::colon, "':'");
                std::size_t ptok = pos_;
                Type pty = parse_type(/*allow_void=*/false);
                if (!pname || failed_) return std::nullopt;
                m.params.push_back({pname->text, pty, span_from(ptok)});
            } while (accept(TokKind::comma));
        }
        expect(TokKind::rparen, "')'");
        if (!is_ctor) {
            expect(TokKind::colon, "':' before return type");
            m.return_type = parse_type(/*allow_void=*/true);
        }
        expect(TokKind::lbrace, "'{'");
        while (!at(TokKind::rbrace) && !at(TokKind::end_of_file) && !failed_) {
            auto s = parse_stmt();
            if (s) m.body.push_back(std::move(s));
        }
        std::size_t norm_to = pos_ + 1; // include the closing brace
        expect(TokKind::rbrace, "'}'");
        if (failed_) return std::nullopt;
        m.span = span_from(start);
        m.norm_tokens = token_texts(norm_from, norm_to > tokens_.size() ? tokens_.size() : norm_to);
        return m;
    }

    Type parse_type(bool allow_void) {
        if (accept(TokKind::kw_int)) return Type::int_t();
        if (accept(TokKind::kw_bool)) return Type::bool_t();
        if (allow_void && accept(TokKind::kw_void)) return Type::void_t();
        if (at(TokKind::identifier)) {
            return Type::class_t(advance().text);
        }
        error(allow_void ? "expected type 'int', 'bool', 'void' or class name"
                         : "expected type 'int', 'bool' or class name");
        failed_ = true;
        return Type::invalid();
    }

    // --- statements ---

    StmtPtr parse_stmt() {
        std::size_t start = pos_;
        auto make = [&](auto node) {
            auto s = std::make_unique<Stmt>();
            s->node = std::move(node);
            s->span = span_from(start);
            return s;
        };

        if (accept(TokKind::kw_var)) {
            VarDeclStmt d;
            const Token* name = expect(TokKind::identifier, "variable name");
            expect(TokKind::colon, "':'");
            d.declared = parse_type(/*allow_void=*/false);
            expect(TokKind::assign, "'='");
            d.init = parse_expr();
            expect(TokKind::semicolon, "';'");
            if (failed_ || !name) return nullptr;
            d.name = name->text;
            return make(std::move(d));
        }
        if (accept(TokKind::kw_return)) {
            ReturnStmt r;
            if (!accept(TokKind::semicolon)) {
                r.value = parse_expr();
                expect(TokKind::semicolon, "';'");
            }
            if (failed_) return nullptr;
            return make(std::move(r));
        }
        if (accept(TokKind::kw_if)) {
            IfStmt s;
            expect(TokKind::lparen, "'('");
            s.cond = parse_expr();
            expect(TokKind::rparen, "')'");
            s.then_body = parse_block();
            if (accept(TokKind::kw_else)) s.else_body = parse_block();
            if (failed_) return nullptr;
            return make(std::move(s));
        }
        if (accept(TokKind::kw_while)) {
            WhileStmt s;
            expect(TokKind::lparen, "'('");
            s.cond = parse_expr();
            expect(TokKind::rparen, "')'");
            s.body = parse_block();
            if (failed_) return nullptr;
            return make(std::move(s));
        }
        if (at(TokKind::kw_this) && peek(1) == TokKind::dot && peek(2) == TokKind::identifier &&
            peek(3) == TokKind::assign) {
            advance(); // this
            advance(); // .
            FieldAssignStmt a;
            a.field = advance().text;
            advance(); // =
            a.value = parse_expr();
            expect(TokKind::semicolon, "';'");
            if (failed_) return nullptr;
            return make(std::move(a));
        }
        if (at(TokKind::identifier) && peek(1) == TokKind::assign) {
            AssignStmt a;
            a.name = advance().text;
            advance(); // =
            a.value = parse_expr();
            expect(TokKind::semicolon, "';'");
            if (failed_) return nullptr;
            return make(std::move(a));
        }
        ExprStmt e;
        e.expr = parse_expr();
        expect(TokKind::semicolon, "';'");
        if (failed_) return nullptr;
        return make(std::move(e));
    }

    std::vector<StmtPtr> parse_block() {
        std::vector<StmtPtr> body;
        expect(TokKind::lbrace, "'{'");
        while (!at(TokKind::rbrace) && !at(TokKind::end_of_file) && !failed_) {
            auto s = parse_stmt();
            if (s) body.push_back(std::move(s));
        }
        expect(TokKind::rbrace, "'}'");
        return body;
    }

    // --- expressions ---

    ExprPtr mk(std::size_t start, auto node) {
        auto e = std::make_unique<Expr>();
        e->node = std::move(node);
        e->span = span_from(start);
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        std::size_t start = pos_;
        ExprPtr lhs = parse_and();
        while (accept(TokKind::or_or)) {
            BinaryExpr b{BinaryOp::or_or, std::move(lhs), parse_and()};
            lhs = mk(start, std::move(b));
        }
        return lhs;
    }

    ExprPtr parse_and() {
        std::size_t start = pos_;
        ExprPtr lhs = parse_cmp();
        while (accept(TokKind::and_and)) {
            BinaryExpr b{BinaryOp::and_and, std::move(lhs), parse_cmp()};
            lhs = mk(start, std::move(b));
        }
        return lhs;
    }

    ExprPtr parse_cmp() {
        std::size_t start = pos_;
        ExprPtr lhs = parse_add();
        if (is_rel_op(cur().kind)) {
            BinaryOp op;
            switch (cur().kind) {
                case TokKind::lt: op = BinaryOp::lt; break;
                case TokKind::le: op = BinaryOp::le; break;
                case TokKind::gt: op = BinaryOp::gt; break;
                case TokKind::ge: op = BinaryOp::ge; break;
                case TokKind::eq: op = BinaryOp::eq; break;
                default: op = BinaryOp::ne; break;
            }
            advance();
            BinaryExpr b{op, std::move(lhs), parse_add()};
            lhs = mk(start, std::move(b));
        }
        return lhs;
    }

    ExprPtr parse_add() {
        std::size_t start = pos_;
        ExprPtr lhs = parse_mul();
        while (at(TokKind::plus) || at(TokKind::minus)) {
            BinaryOp op = at(TokKind::plus) ? BinaryOp::add : BinaryOp::sub;
            advance();
            BinaryExpr b{op, std::move(lhs), parse_mul()};
            lhs = mk(start, std::move(b));
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        std::size_t start = pos_;
        ExprPtr lhs = parse_unary();
        while (at(TokKind::star) || at(TokKind::slash) || at(TokKind::percent)) {
            BinaryOp op = at(TokKind::star) ? BinaryOp::mul
                        : at(TokKind::slash) ? BinaryOp::div
                                             : BinaryOp::mod;
            advance();
            BinaryExpr b{op, std::move(lhs), parse_unary()};
            lhs = mk(start, std::move(b));
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        std::size_t start = pos_;
        if (accept(TokKind::minus)) return mk(start, UnaryExpr{UnaryOp::neg, parse_unary()});
        if (accept(TokKind::bang)) return mk(start, UnaryExpr{UnaryOp::logical_not, parse_unary()});
        return parse_primary();
    }

    std::vector<ExprPtr> parse_args() {
        std::vector<ExprPtr> args;
        expect(TokKind::lparen, "'('");
        if (!at(TokKind::rparen)) {
            do {
                args.push_back(parse_expr());
            } while (accept(TokKind::comma));
        }
        expect(TokKind::rparen, "')'");
        return args;
    }

    ExprPtr parse_primary() {
        std::size_t start = pos_;
        if (at(TokKind::int_literal)) {
            const Token& t = advance();
            return mk(start, IntLitExpr{t.int_value});
        }
        if (accept(TokKind::kw_true)) return mk(start, BoolLitExpr{true});
        if (accept(TokKind::kw_false)) return mk(start, BoolLitExpr{false});
        if (accept(TokKind::lparen)) {
            ExprPtr inner = parse_expr();
            expect(TokKind::rparen, "')'");
            return inner;
        }
        if (accept(TokKind::kw_new)) {
            NewExpr n;
            const Token* name = expect(TokKind::identifier, "class name after 'new'");
            if (name) n.class_name = name->text;
            n.args = parse_args();
            return mk(start, std::move(n));
        }
        if (accept(TokKind::kw_this)) {
            expect(TokKind::dot, "'.' after 'this'");
            const Token* member = expect(TokKind::identifier, "member name");
            if (!member) return mk(start, IntLitExpr{0});
            if (at(TokKind::lparen)) {
                CallExpr c;
                c.target = CallExpr::Target::self;
                c.method = member->text;
                c.args = parse_args();
                return mk(start, std::move(c));
            }
            return mk(start, FieldRefExpr{member->text});
        }
        if (at(TokKind::identifier)) {
            const Token& name = advance();
            if (at(TokKind::dot)) {
                advance();
                const Token* member = expect(TokKind::identifier, "method name");
                if (!member) return mk(start, IntLitExpr{0});
                CallExpr c;
                c.target = CallExpr::Target::local;
                c.receiver = name.text;
                c.method = member->text;
                c.args = parse_args();
                return mk(start, std::move(c));
            }
            if (at(TokKind::lparen)) {
                CallExpr c;
                c.target = CallExpr::Target::toplevel;
                c.method = name.text;
                c.args = parse_args();
                return mk(start, std::move(c));
            }
            return mk(start, VarRefExpr{name.text});
        }
        error("expected expression");
        failed_ = true;
        return mk(start, IntLitExpr{0});
    }
};

} // namespace

std::string ParseResult::diagnostics_str() const {
    std::ostringstream os;
    for (const auto& d : diagnostics) os << d.str() << "\n";
    return os.str();
}

ParseResult parse_program(const std::vector<NamedSource>& sources) {
    ParseResult result;
    auto prog = std::make_shared<Program>();
    for (const auto& src : sources) {
        SourceFile file(src.name, src.text);
        LexResult lexed = lex(file.name, file.text);
        if (!lexed.ok()) {
            result.diagnostics.insert(result.diagnostics.end(), lexed.diagnostics.begin(),
                                      lexed.diagnostics.end());
            continue;
        }
        Parser parser(file.name, std::move(lexed.tokens), result.diagnostics);
        parser.parse_file(*prog);
        prog->files.push_back(std::move(file));
    }
    if (!result.diagnostics.empty()) return result;

    check_program(*prog, result.diagnostics);
    if (!result.diagnostics.empty()) return result;

    result.program = std::move(prog);
    return result;
}

ParseResult parse_program(const std::string& file_name, const std::string& text) {
    return parse_program(std::vector<NamedSource>{{file_name, text}});
}

} // namespace tom
