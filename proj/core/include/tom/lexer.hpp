#ifndef TOM_LEXER_HPP
#define TOM_LEXER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tom/source.hpp"

namespace tom {

enum class TokKind {
    kw_class,
    kw_var,
    kw_fn,
    kw_init,
    kw_if,
    kw_else,
    kw_while,
    kw_return,
    kw_this,
    kw_new,
    kw_true,
    kw_false,
    kw_int,
    kw_bool,
    kw_void,
    identifier,
    int_literal,
    lparen,
    rparen,
    lbrace,
    rbrace,
    colon,
    semicolon,
    comma,
    dot,
    assign,   // =
    plus,
    minus,
    star,
    slash,
    percent,
    lt,
    le,
    gt,
    ge,
    eq,       // ==
    ne,       // !=
    and_and,
    or_or,
    bang,
    end_of_file,
};

struct Token {
    TokKind kind = TokKind::end_of_file;
    std::string text;
    std::int64_t int_value = 0; // valid for int_literal
    int line = 0;               // 1-based
    int column = 0;             // 1-based
    std::size_t offset = 0;     // byte offset into the file text
    std::size_t length = 0;
};

struct LexResult {
    std::vector<Token> tokens; // always ends with end_of_file
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

// Tokenizes LF-normalized MiniLang text. `//` comments and whitespace are
// skipped; every surviving token carries line/column and byte extent so that
// callers can splice replacement text back into the original file.
LexResult lex(const std::string& file_name, const std::string& text);

bool is_arith_op(TokKind k);
bool is_rel_op(TokKind k);

} // namespace tom

#endif
