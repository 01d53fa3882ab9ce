#pragma once
// Deterministic SVG rendering of (Lambda, Q) bifurcation diagrams and
// per-solution profiles. No timestamps, fixed coordinate formatting, fixed
// palette, curves drawn in input order: identical input gives byte-identical
// output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace qgraph {

struct DiagramCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y) = (Lambda, Q)
};

struct DiagramMarker {
  enum class Kind { fold, branch_point };
  Kind kind = Kind::fold;
  double x = 0.0, y = 0.0;
};

struct DiagramStyle {
  int width = 820;
  int height = 560;
  int margin = 56;
  std::string x_label = "lambda";
  std::string y_label = "Q";
  std::string title;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace detail

inline std::string render_diagram(const std::vector<DiagramCurve>& curves,
                                  const std::vector<DiagramMarker>& markers = {},
                                  const DiagramStyle& style = {}) {
  if (curves.empty()) throw std::invalid_argument("render_diagram: no curves");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& c : curves)
    for (const auto& [x, y] : c.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double xpad = 0.04 * (xmax - xmin);
  const double ypad = 0.04 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double W = style.width, H = style.height, M = style.margin;
  const auto X = [&](double x) { return M + (x - xmin) / (xmax - xmin) * (W - 2 * M); };
  const auto Y = [&](double y) { return H - M - (y - ymin) / (ymax - ymin) * (H - 2 * M); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " +
         std::to_string(style.width) + " " + std::to_string(style.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  svg += "<g stroke=\"#333\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + detail::fmt(M) + "\" y1=\"" + detail::fmt(H - M) + "\" x2=\"" +
         detail::fmt(W - M) + "\" y2=\"" + detail::fmt(H - M) + "\"/>\n";
  svg += "<line x1=\"" + detail::fmt(M) + "\" y1=\"" + detail::fmt(M) + "\" x2=\"" +
         detail::fmt(M) + "\" y2=\"" + detail::fmt(H - M) + "\"/>\n";
  svg += "</g>\n";

  // ticks (5 per axis)
  svg += "<g font-family=\"monospace\" font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4;
    const double yv = ymin + (ymax - ymin) * i / 4;
    svg += "<text x=\"" + detail::fmt(X(xv) - 12) + "\" y=\"" + detail::fmt(H - M + 16) + "\">" +
           detail::fmt(xv) + "</text>\n";
    svg += "<text x=\"" + detail::fmt(6.0) + "\" y=\"" + detail::fmt(Y(yv) + 4) + "\">" +
           detail::fmt(yv) + "</text>\n";
  }
  svg += "<text x=\"" + detail::fmt(W / 2 - 24) + "\" y=\"" + detail::fmt(H - 12.0) + "\">" +
         style.x_label + "</text>\n";
  svg += "<text x=\"" + detail::fmt(10.0) + "\" y=\"" + detail::fmt(18.0) + "\">" + style.y_label +
         "</text>\n";
  if (!style.title.empty())
    svg += "<text x=\"" + detail::fmt(W / 2 - 6.0 * style.title.size() / 2) + "\" y=\"" +
           detail::fmt(20.0) + "\">" + style.title + "</text>\n";
  svg += "</g>\n";

  // curves
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = detail::kPalette[i % detail::kPalette.size()];
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : curves[i].points)
      svg += detail::fmt(X(x)) + "," + detail::fmt(Y(y)) + " ";
    if (!curves[i].points.empty()) svg.pop_back();
    svg += "\"/>\n";
  }

  // legend
  svg += "<g font-family=\"monospace\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double ly = M + 14.0 * static_cast<double>(i);
    svg += "<rect x=\"" + detail::fmt(W - M - 150) + "\" y=\"" + detail::fmt(ly) +
           "\" width=\"10\" height=\"10\" fill=\"";
    svg += detail::kPalette[i % detail::kPalette.size()];
    svg += "\"/>\n";
    svg += "<text x=\"" + detail::fmt(W - M - 135) + "\" y=\"" + detail::fmt(ly + 9) + "\">" +
           curves[i].label + "</text>\n";
  }
  svg += "</g>\n";

  // event markers: circles for folds, squares for branch points
  for (const auto& m : markers) {
    if (m.kind == DiagramMarker::Kind::fold) {
      svg += "<circle cx=\"" + detail::fmt(X(m.x)) + "\" cy=\"" + detail::fmt(Y(m.y)) +
             "\" r=\"4\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
    } else {
      svg += "<rect x=\"" + detail::fmt(X(m.x) - 3.5) + "\" y=\"" + detail::fmt(Y(m.y) - 3.5) +
             "\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
    }
  }

  svg += "</svg>\n";
  return svg;
}

/// Per-solution profile plot: one polyline per edge against its coordinate.
inline std::string render_profile(const std::vector<std::pair<std::string,
                                                              std::vector<std::pair<double, double>>>>& edges,
                                  const DiagramStyle& style = {}) {
  std::vector<DiagramCurve> curves;
  for (const auto& [label, pts] : edges) curves.push_back({label, pts});
  DiagramStyle s = style;
  s.x_label = "x";
  s.y_label = "phi";
  return render_diagram(curves, {}, s);
}

}  // namespace qgraph
