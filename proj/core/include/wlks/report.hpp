#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "wlks/experiment.hpp"

namespace wlks {

/// Writes key=value lines in a fixed key order. Timings are left out so that
/// two runs with the same seed produce identical text.
void write_report(const RunReport& report, std::ostream& out);
void write_timings(const PhaseTimings& t, std::ostream& out);

/// Parses write_report output (timings stay zero) and optionally a timings file.
RunReport parse_report(std::istream& in);
PhaseTimings parse_timings(std::istream& in);

/// Writes the report to `path` and the timings to `path` + ".timings".
/// Throws ConfigError when either file cannot be written.
void emit_report(const RunReport& report, const std::filesystem::path& path);

}  // namespace wlks
