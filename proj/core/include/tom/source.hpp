#ifndef TOM_SOURCE_HPP
#define TOM_SOURCE_HPP

#include <string>
#include <vector>

namespace tom {

// Byte range plus 1-based line range inside one named source file.
struct Span {
    std::string file;
    int first_line = 0;
    int last_line = 0;
    std::size_t begin = 0; // byte offset of first token
    std::size_t end = 0;   // one past last byte of last token

    bool operator==(const Span&) const = default;
};

struct Diagnostic {
    std::string file;
    int line = 0;
    int column = 0;
    std::string message;

    std::string str() const;
};

// One MiniLang source file. Text is LF-normalized on construction.
struct SourceFile {
    std::string name;
    std::string text;
    std::vector<std::string> lines; // 1-based access via line(n)

    SourceFile() = default;
    SourceFile(std::string name, std::string raw_text);

    const std::string& line(int n) const; // n is 1-based
    int line_count() const { return static_cast<int>(lines.size()); }
};

std::string normalize_newlines(std::string text);
std::vector<std::string> split_lines(const std::string& text);
std::string join_lines(const std::vector<std::string>& lines);

} // namespace tom

#endif
