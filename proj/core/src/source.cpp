#include "tom/source.hpp"

#include <sstream>

namespace tom {

std::string Diagnostic::str() const {
    std::ostringstream os;
    os << file << ":" << line << ":" << column << ": " << message;
    return os.str();
}

std::string normalize_newlines(std::string text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') continue;
            out.push_back('\n');
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

SourceFile::SourceFile(std::string name_, std::string raw_text)
    : name(std::move(name_)), text(normalize_newlines(std::move(raw_text))) {
    lines = split_lines(text);
}

const std::string& SourceFile::line(int n) const {
    static const std::string empty;
    if (n < 1 || n > static_cast<int>(lines.size())) return empty;
    return lines[static_cast<std::size_t>(n - 1)];
}

} // namespace tom
