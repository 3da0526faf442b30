#include "extralab/trace_io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "extralab/csv.hpp"
#include "extralab/errors.hpp"

namespace extralab {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_real(const std::string& cell, int line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw ValidationError("trace line " + std::to_string(line_no) + ": bad number '" + cell + "'");
  }
  return v;
}

long parse_count(const std::string& cell, int line_no) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(cell.c_str(), &end, 10);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw ValidationError("trace line " + std::to_string(line_no) + ": bad integer '" + cell + "'");
  }
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.iter << ',' << r.comm_rounds << ',' << r.grad_rounds << ',' << format_double(r.objective_gap) << ','
        << format_double(r.consensus_violation) << ',';
    if (r.rho) out << format_double(*r.rho);
    out << ',' << format_double(r.wall_time) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trace_csv(out, trace);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kTraceHeader) throw ValidationError("trace line 1: unexpected header");
      header = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 7) throw ValidationError("trace line " + std::to_string(line_no) + ": expected 7 fields");
    IterationRecord r;
    r.iter = parse_count(cells[0], line_no);
    r.comm_rounds = parse_count(cells[1], line_no);
    r.grad_rounds = parse_count(cells[2], line_no);
    r.objective_gap = parse_real(cells[3], line_no);
    r.consensus_violation = parse_real(cells[4], line_no);
    if (!cells[5].empty()) r.rho = parse_real(cells[5], line_no);
    r.wall_time = parse_real(cells[6], line_no);
    trace.records.push_back(r);
  }
  if (!header) throw ValidationError("trace is empty");
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace_csv(in);
}

}  // namespace extralab
