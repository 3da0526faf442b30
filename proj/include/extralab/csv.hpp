#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace extralab {

/// Shortest-round-trip-safe decimal rendering (17 significant digits).
std::string format_double(double value);

/// Writes one matrix row per line, comma separated, via format_double.
void write_matrix_csv(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Reads a rectangular CSV of decimals. Ragged rows or bad numbers throw
/// ValidationError naming the line.
Eigen::MatrixXd read_matrix_csv(std::istream& in);

}  // namespace extralab
