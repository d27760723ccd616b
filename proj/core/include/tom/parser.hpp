#ifndef TOM_PARSER_HPP
#define TOM_PARSER_HPP

#include <string>
#include <vector>

#include "tom/ast.hpp"
#include "tom/source.hpp"

namespace tom {

struct NamedSource {
    std::string name;
    std::string text;
};

struct ParseResult {
    ProgramPtr program; // null when diagnostics is non-empty
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return program != nullptr; }
    std::string diagnostics_str() const;
};

// Parses and statically checks a set of MiniLang sources as one program.
// On any syntax, type, duplicate-entity or missing-return error the program
// is withheld and the diagnostics list describes every problem found.
ParseResult parse_program(const std::vector<NamedSource>& sources);

// Convenience for single-file fixtures and tests.
ParseResult parse_program(const std::string& file_name, const std::string& text);

} // namespace tom

#endif
