#pragma once

#include <optional>

#include "extralab/graph.hpp"

namespace extralab {

/// Iterate of the primal-dual EXTRA recursion.
///
/// `x` holds one local copy per row. `v` is the communicable dual surrogate
/// V = U lambda; it starts at zero and only moves inside Span(I - W), so its
/// columns always sum to zero.
struct ExtraState {
  RowMatrix x;
  RowMatrix v;
  long k = 0;

  // Running sum of x^j over j >= window_start (1-based iterate index).
  std::optional<RowMatrix> running_sum;
  long window_start = 0;
  long window_count = 0;

  static ExtraState from_primal(RowMatrix x0) {
    ExtraState s;
    s.v = RowMatrix::Zero(x0.rows(), x0.cols());
    s.x = std::move(x0);
    return s;
  }
  static ExtraState zeros(int agents, int dim) { return from_primal(RowMatrix::Zero(agents, dim)); }

  /// Averaged iterate over the window, if any iterate has been accumulated.
  std::optional<RowMatrix> average() const {
    if (!running_sum || window_count == 0) return std::nullopt;
    return RowMatrix(*running_sum / static_cast<double>(window_count));
  }
};

struct CostCounters {
  long comm_rounds = 0;
  long grad_rounds = 0;
};

}  // namespace extralab
