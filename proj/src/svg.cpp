#include "extralab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "extralab/errors.hpp"

namespace extralab {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 80, kRight = 200, kTop = 30, kBottom = 70;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
constexpr const char* kDashes[] = {"", "6,3", "2,2", "8,3,2,3"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* axis_name(PlotXAxis x) { return x == PlotXAxis::grad_rounds ? "gradient rounds" : "communication rounds"; }

const char* axis_name(PlotYAxis y) {
  switch (y) {
    case PlotYAxis::objective_gap: return "objective gap";
    case PlotYAxis::consensus_violation: return "consensus violation";
    case PlotYAxis::rho: return "Lyapunov value";
  }
  return "";
}

struct Point {
  double x, y;
};

}  // namespace

std::string render_svg(const std::vector<Trace>& traces, PlotXAxis xaxis, PlotYAxis yaxis) {
  if (traces.empty()) throw ArgumentError("nothing to plot");

  bool clipped = false;
  std::vector<std::vector<Point>> series;
  for (const auto& t : traces) {
    std::vector<Point> pts;
    for (const auto& r : t.records) {
      double v = 0.0;
      switch (yaxis) {
        case PlotYAxis::objective_gap: v = r.objective_gap; break;
        case PlotYAxis::consensus_violation: v = r.consensus_violation; break;
        case PlotYAxis::rho:
          if (!r.rho) continue;
          v = *r.rho;
          break;
      }
      if (!std::isfinite(v)) continue;
      if (v < kPlotFloor) {
        v = kPlotFloor;
        clipped = true;
      }
      const double x = static_cast<double>(xaxis == PlotXAxis::grad_rounds ? r.grad_rounds : r.comm_rounds);
      pts.push_back({x, std::log10(v)});
    }
    series.push_back(std::move(pts));
  }

  double xmax = 1.0, ylo = 0.0, yhi = 0.0;
  bool any = false;
  for (const auto& pts : series) {
    for (const auto& p : pts) {
      xmax = std::max(xmax, p.x);
      ylo = any ? std::min(ylo, p.y) : p.y;
      yhi = any ? std::max(yhi, p.y) : p.y;
      any = true;
    }
  }
  ylo = std::floor(ylo);
  yhi = std::ceil(yhi);
  if (yhi <= ylo) yhi = ylo + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * x / xmax; };
  auto py = [&](double y) { return kTop + ph * (yhi - y) / (yhi - ylo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  const int decades = static_cast<int>(yhi - ylo);
  const int step = std::max(1, decades / 10);
  for (int d = static_cast<int>(ylo); d <= static_cast<int>(yhi); d += step) {
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py(d)) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\""
        << fmt(py(d)) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(d) + 4) << "\" text-anchor=\"end\">1e" << d
        << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double x = xmax * i / 5.0;
    svg << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << static_cast<long>(std::llround(x)) << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 30) << "\" text-anchor=\"middle\">"
      << axis_name(xaxis) << "</text>\n";
  svg << "<text transform=\"translate(20," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << axis_name(yaxis) << " (log10)</text>\n";

  for (std::size_t t = 0; t < series.size(); ++t) {
    const char* color = kColors[t % std::size(kColors)];
    const char* dash = kDashes[t % std::size(kDashes)];
    svg << "<polyline class=\"trace\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (*dash) svg << " stroke-dasharray=\"" << dash << '"';
    svg << " points=\"";
    for (std::size_t i = 0; i < series[t].size(); ++i) {
      if (i) svg << ' ';
      svg << fmt(px(series[t][i].x)) << ',' << fmt(py(series[t][i].y));
    }
    svg << "\"/>\n";

    const double ly = kTop + 10 + 20.0 * t;
    const double lx = kLeft + pw + 15;
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 30) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (*dash) svg << " stroke-dasharray=\"" << dash << '"';
    svg << "/>\n";
    svg << "<text class=\"legend\" x=\"" << fmt(lx + 36) << "\" y=\"" << fmt(ly + 4) << "\">"
        << escape(traces[t].label) << "</text>\n";
  }

  if (clipped) {
    svg << "<text class=\"footnote\" x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kHeight - 8)
        << "\" font-size=\"10\">values below 1e-16 are drawn at 1e-16</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void emit_svg(const std::vector<Trace>& traces, PlotXAxis x, PlotYAxis y, const std::filesystem::path& path) {
  const std::string body = render_svg(traces, x, y);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace extralab
