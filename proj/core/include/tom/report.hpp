#ifndef TOM_REPORT_HPP
#define TOM_REPORT_HPP

#include <map>
#include <string>

#include "tom/testgen.hpp"
#include "tom/uut_select.hpp"

namespace tom {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "tom-report/1";

struct ReportDocument {
    std::string schema = kReportSchema;
    std::string tool_version = kToolVersion;
    std::string scenario_path;
    GenConfig config;
    SelectionConfig selection;
    ConflictReport payload;
    std::map<std::string, double> timing_ms; // per phase

    bool operator==(const ReportDocument&) const = default;
};

std::string report_to_json(const ReportDocument& doc);

struct ReportParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inverse of report_to_json; throws ReportParseError on malformed input.
ReportDocument report_from_json(const std::string& text);

} // namespace tom

#endif
