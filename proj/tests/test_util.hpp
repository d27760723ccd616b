#ifndef TOM_TESTS_TEST_UTIL_HPP
#define TOM_TESTS_TEST_UTIL_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tom/parser.hpp"
#include "tom/testcase.hpp"

namespace tom::test {

inline std::string fixture_dir() { return TOM_FIXTURE_DIR; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Loads one version directory of .mlg files (filename order).
inline ProgramPtr load_version(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".mlg") names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    std::vector<NamedSource> sources;
    for (const auto& n : names) sources.push_back({n, read_file(dir + "/" + n)});
    ParseResult parsed = parse_program(sources);
    INFO(parsed.diagnostics_str());
    REQUIRE(parsed.ok());
    return parsed.program;
}

inline ProgramPtr fixture_version(const std::string& rel) {
    return load_version(fixture_dir() + "/" + rel);
}

inline ProgramPtr parse_or_die(const std::string& text) {
    ParseResult parsed = parse_program("input.mlg", text);
    INFO(parsed.diagnostics_str());
    REQUIRE(parsed.ok());
    return parsed.program;
}

inline TestCase test_or_die(const std::string& text) {
    TestParseResult parsed = parse_mlgtest("input.mlgtest", text);
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) { INFO(d.str()); }
    }
    REQUIRE(parsed.ok());
    return *parsed.test;
}

} // namespace tom::test

#endif
