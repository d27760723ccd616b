#include "tom/lexer.hpp"

#include <cctype>
#include <map>

namespace tom {

namespace {

const std::map<std::string, TokKind>& keyword_table() {
    static const std::map<std::string, TokKind> table = {
        {"class", TokKind::kw_class}, {"var", TokKind::kw_var},
        {"fn", TokKind::kw_fn},       {"init", TokKind::kw_init},
        {"if", TokKind::kw_if},       {"else", TokKind::kw_else},
        {"while", TokKind::kw_while}, {"return", TokKind::kw_return},
        {"this", TokKind::kw_this},   {"new", TokKind::kw_new},
        {"true", TokKind::kw_true},   {"false", TokKind::kw_false},
        {"int", TokKind::kw_int},     {"bool", TokKind::kw_bool},
        {"void", TokKind::kw_void},
    };
    return table;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

bool is_arith_op(TokKind k) {
    return k == TokKind::plus || k == TokKind::minus || k == TokKind::star ||
           k == TokKind::slash || k == TokKind::percent;
}

bool is_rel_op(TokKind k) {
    return k == TokKind::lt || k == TokKind::le || k == TokKind::gt ||
           k == TokKind::ge || k == TokKind::eq || k == TokKind::ne;
}

LexResult lex(const std::string& file_name, const std::string& text) {
    LexResult result;
    std::size_t i = 0;
    int line = 1;
    int col = 1;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };

    auto push = [&](TokKind kind, std::size_t start, int tline, int tcol) {
        Token t;
        t.kind = kind;
        t.text = text.substr(start, i - start);
        t.line = tline;
        t.column = tcol;
        t.offset = start;
        t.length = i - start;
        result.tokens.push_back(std::move(t));
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }

        std::size_t start = i;
        int tline = line, tcol = col;

        if (ident_start(c)) {
            while (i < text.size() && ident_cont(text[i])) advance(1);
            std::string word = text.substr(start, i - start);
            auto it = keyword_table().find(word);
            push(it == keyword_table().end() ? TokKind::identifier : it->second, start, tline, tcol);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) advance(1);
            push(TokKind::int_literal, start, tline, tcol);
            Token& t = result.tokens.back();
            try {
                t.int_value = std::stoll(t.text);
            } catch (const std::exception&) {
                result.diagnostics.push_back(
                    {file_name, tline, tcol, "integer literal out of 64-bit range: " + t.text});
            }
            continue;
        }

        auto two = [&](char second) {
            return i + 1 < text.size() && text[i + 1] == second;
        };
        TokKind kind;
        std::size_t len = 1;
        switch (c) {
            case '(': kind = TokKind::lparen; break;
            case ')': kind = TokKind::rparen; break;
            case '{': kind = TokKind::lbrace; break;
            case '}': kind = TokKind::rbrace; break;
            case ':': kind = TokKind::colon; break;
            case ';': kind = TokKind::semicolon; break;
            case ',': kind = TokKind::comma; break;
            case '.': kind = TokKind::dot; break;
            case '+': kind = TokKind::plus; break;
            case '-': kind = TokKind::minus; break;
            case '*': kind = TokKind::star; break;
            case '/': kind = TokKind::slash; break;
            case '%': kind = TokKind::percent; break;
            case '=': kind = two('=') ? (len = 2, TokKind::eq) : TokKind::assign; break;
            case '!': kind = two('=') ? (len = 2, TokKind::ne) : TokKind::bang; break;
            case '<': kind = two('=') ? (len = 2, TokKind::le) : TokKind::lt; break;
            case '>': kind = two('=') ? (len = 2, TokKind::ge) : TokKind::gt; break;
            case '&':
                if (two('&')) { kind = TokKind::and_and; len = 2; break; }
                [[fallthrough]];
            case '|':
                if (c == '|' && two('|')) { kind = TokKind::or_or; len = 2; break; }
                [[fallthrough]];
            default:
                result.diagnostics.push_back(
                    {file_name, tline, tcol, std::string("unexpected character '") + c + "'"});
                advance(1);
                continue;
        }
        advance(len);
        push(kind, start, tline, tcol);
    }

    Token eof;
    eof.kind = TokKind::end_of_file;
    eof.line = line;
    eof.column = col;
    eof.offset = text.size();
    result.tokens.push_back(std::move(eof));
    return result;
}

} // namespace tom
