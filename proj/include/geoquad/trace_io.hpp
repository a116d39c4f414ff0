#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geoquad/sim.hpp"
#include "geoquad/trace.hpp"

namespace geoquad {

inline constexpr int kTraceSchemaVersion = 1;

/// Column names in file order.
const std::vector<std::string>& trace_columns();

/// "# schema_version=1" line, header row, then one row per record. Values use
/// 17 significant digits so they parse back bit-exactly.
void write_trace_csv(const Trace& trace, std::ostream& out);
/// Throws Error(IoError).
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Inverse of write_trace_csv (segment indices are not stored and read as 0).
/// Throws Error(ParseError) on a schema or format mismatch.
Trace read_trace_csv(std::istream& in);
Trace read_trace_csv(const std::filesystem::path& path);

/// JSON run report: run status, numerics counters and the monitor report.
std::string report_to_json(const std::string& scenario, const SimResult& result);
void write_report(const std::string& scenario, const SimResult& result,
                  const std::filesystem::path& path);

}  // namespace geoquad
