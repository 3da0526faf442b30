#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "extralab/metrics.hpp"

namespace extralab {

inline constexpr const char* kTraceHeader = "iter,comm_rounds,grad_rounds,objective_gap,consensus_violation,rho,wall_time";

/// One line per record; rho is an empty field when absent.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

/// Parses what write_trace_csv produced. The label and fingerprint are not
/// stored in the file and come back empty.
Trace read_trace_csv(std::istream& in);
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace extralab
