#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "extralab/metrics.hpp"

namespace extralab {

enum class PlotXAxis { grad_rounds, comm_rounds };
enum class PlotYAxis { objective_gap, consensus_violation, rho };

inline constexpr double kPlotFloor = 1e-16;

/// Self-contained SVG: log10 y-axis, one polyline per trace, legend by label.
/// Values below kPlotFloor are clipped and a footnote says so.
std::string render_svg(const std::vector<Trace>& traces, PlotXAxis x, PlotYAxis y);
void emit_svg(const std::vector<Trace>& traces, PlotXAxis x, PlotYAxis y, const std::filesystem::path& path);

}  // namespace extralab
