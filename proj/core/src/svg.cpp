#include "cosserat/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "cosserat/errors.hpp"

namespace cosserat {

namespace {

constexpr double kWidth = 800.0, kHeight = 560.0;
constexpr double kLeft = 70.0, kRight = 24.0, kTop = 46.0, kBottom = 56.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fmt(double x, const char* spec = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double x) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  bool valid() const { return lo <= hi; }
  double span() const { return hi - lo; }
  void pad(double frac) {
    const double d = span() > 0.0 ? frac * span() : std::max(1.0, std::abs(lo)) * frac;
    lo -= d;
    hi += d;
  }
};

}  // namespace

void emit_plot(const std::string& path, PlotKind kind, const std::vector<PlotSeries>& series,
               const std::string& title, const std::string& x_label, const std::string& y_label) {
  const bool log_axes = kind == PlotKind::convergence;
  // Collect plottable points (log plots skip non-positive values).
  std::vector<std::vector<std::pair<double, double>>> pts(series.size());
  Range rx, ry;
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].x.size() != series[s].y.size())
      throw ValidationError("plot series '" + series[s].label + "' has mismatched x/y sizes");
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      double x = series[s].x[i], y = series[s].y[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (log_axes) {
        if (!(x > 0.0) || !(y > 0.0)) continue;
        x = std::log10(x);
        y = std::log10(y);
      }
      pts[s].emplace_back(x, y);
      rx.add(x);
      ry.add(y);
    }
  }
  if (!rx.valid() || !ry.valid()) throw ValidationError("plot has no finite data points");
  rx.pad(0.05);
  ry.pad(0.05);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  if (kind == PlotKind::centerline) {
    // Equal aspect: widen the tighter range about its midpoint.
    const double sx = rx.span() / plot_w, sy = ry.span() / plot_h;
    const double scale = std::max(sx, sy);
    const double cx = 0.5 * (rx.lo + rx.hi), cy = 0.5 * (ry.lo + ry.hi);
    rx.lo = cx - 0.5 * scale * plot_w;
    rx.hi = cx + 0.5 * scale * plot_w;
    ry.lo = cy - 0.5 * scale * plot_h;
    ry.hi = cy + 0.5 * scale * plot_h;
  }
  auto px = [&](double x) { return kLeft + (x - rx.lo) / rx.span() * plot_w; };
  auto py = [&](double y) { return kTop + (ry.hi - y) / ry.span() * plot_h; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open plot file for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"26\" font-family=\"sans-serif\" "
         "font-size=\"16\" text-anchor=\"middle\">"
      << escape(title) << "</text>\n"
      << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w)
      << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // Ticks: 5 per axis; on log axes prefer integer decades when they fit.
  auto emit_ticks = [&](bool horizontal, const Range& r) {
    std::vector<double> ticks;
    if (log_axes) {
      for (double d = std::ceil(r.lo); d <= std::floor(r.hi) + 1e-12; d += 1.0)
        ticks.push_back(d);
      if (ticks.size() < 2 || ticks.size() > 12) ticks.clear();
    }
    if (ticks.empty())
      for (int k = 0; k <= 4; ++k) ticks.push_back(r.lo + r.span() * k / 4.0);
    for (double t : ticks) {
      const std::string label =
          log_axes ? ("1e" + fmt(t, "%.0f")) : fmt(t, "%.4g");
      if (horizontal) {
        const double x = px(t);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(kTop + plot_h + 5) << "\" stroke=\"#333333\"/>\n"
            << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + plot_h + 20)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << label
            << "</text>\n";
      } else {
        const double y = py(t);
        out << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#333333\"/>\n"
            << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << label
            << "</text>\n";
      }
    }
  };
  emit_ticks(true, rx);
  emit_ticks(false, ry);

  out << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 14)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << fmt(kTop + plot_h / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 "
      << fmt(kTop + plot_h / 2) << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    if (pts[s].empty()) continue;
    const char* color = kPalette[s % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts[s]) out << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
    out << "\"/>\n";
    if (pts[s].size() <= 40)  // small series: mark the samples
      for (const auto& [x, y] : pts[s])
        out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = kTop + 14 + 16 * static_cast<double>(s);
    const char* color = kPalette[s % kPaletteSize];
    out << "<line x1=\"" << fmt(kLeft + plot_w - 150) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(kLeft + plot_w - 126) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fmt(kLeft + plot_w - 120) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(series[s].label)
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace cosserat
