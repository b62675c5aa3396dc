#pragma once

// CSV trace and summary files. Doubles are written in shortest round-trip
// form, so metrics recomputed from a parsed CSV reproduce the summary exactly.

#include "gctl/trace.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gctl {

inline constexpr const char* kCsvHeader =
    "t,ref,y,e,u,u_arc,u_g,s_h,rules,v_hat,det_g,a1,a2,a3,event";

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

void write_csv(std::ostream& out, const std::vector<TraceRow>& rows);
// Throws std::runtime_error with line context on malformed input.
std::vector<TraceRow> parse_csv(std::istream& in);
std::vector<TraceRow> read_csv(const std::filesystem::path& path);

// key = value lines; absent metrics are written as "none".
void write_summary(std::ostream& out, const ScenarioResult& result);

// Time, rule count pairs, one line per rule-count change plus the last row.
void write_rule_series(std::ostream& out, const std::vector<TraceRow>& rows);

struct EmittedFiles {
  std::filesystem::path csv, summary, rules;
};

// Writes <dir>/<name>.csv, <name>.summary.txt and <name>.rules.csv. Creates
// the directory if needed. I/O errors name the offending path.
EmittedFiles emit(const ScenarioResult& result, const std::filesystem::path& dir);

}  // namespace gctl
