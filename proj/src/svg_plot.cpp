#include "abring/svg_plot.hpp"

#include "abring/errors.hpp"
#include "abring/records_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace abring {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#e377c2"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string coord(double v) { return fmt("%.2f", v); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string color_for(const XYSeries& s, int& other_index) {
  switch (s.role) {
    case SeriesRole::Bare: return "#2ca02c";
    case SeriesRole::Coupled: return "#d62728";
    case SeriesRole::Reference: return "#7f7f7f";
    case SeriesRole::Other: break;
  }
  return kPalette[other_index++ % (sizeof kPalette / sizeof kPalette[0])];
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double unit(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double t = log ? std::log10(v) : v;
    return (t - a) / (b - a);
  }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis axis;
  axis.log = log;
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo) * 4.0) / 4.0);
    hi = std::pow(10.0, std::ceil(std::log10(hi) * 4.0) / 4.0);
    if (hi <= lo) hi = lo * 10.0;
  } else {
    if (hi <= lo) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    } else {
      const double pad = (hi - lo) * 0.04;
      lo -= pad;
      hi += pad;
    }
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

bool drawable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

std::string tick_label(double v, bool log) {
  if (log) return fmt("%g", v);
  if (std::abs(v) < 1e-12) return "0";
  return fmt("%g", v);
}

}  // namespace

std::vector<double> linear_ticks(double lo, double hi, int target) {
  std::vector<double> ticks;
  if (!(hi > lo) || target < 1) return ticks;
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  if (!(lo > 0.0) || !(hi > lo)) return ticks;
  const int first = static_cast<int>(std::floor(std::log10(lo)));
  const int last = static_cast<int>(std::ceil(std::log10(hi)));
  for (int k = first; k <= last; ++k) {
    const double v = std::pow(10.0, k);
    if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) ticks.push_back(v);
  }
  if (ticks.size() >= 2) return ticks;
  ticks.clear();
  for (int k = first; k <= last; ++k) {
    for (double m : {1.0, 2.0, 5.0}) {
      const double v = m * std::pow(10.0, k);
      if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) ticks.push_back(v);
    }
  }
  return ticks;
}

SvgResult render_svg(const std::vector<XYSeries>& series, const PlotSpec& spec) {
  SvgResult result;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  int drawable_series = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ArgumentError("series '" + s.label + "' has mismatched x and y lengths");
    int n = 0;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!drawable(s.x[k], spec.log_x) || !drawable(s.y[k], spec.log_y)) {
        ++result.dropped_points;
        continue;
      }
      ++n;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
    if (n >= 2) ++drawable_series;
  }
  if (drawable_series == 0) throw ArgumentError("plot needs at least one series with two drawable points");

  const Axis ax = make_axis(xmin, xmax, spec.log_x);
  const Axis ay = make_axis(ymin, ymax, spec.log_y);

  const double left = 72, right = 24, top = spec.title.empty() ? 20 : 40, bottom = 56;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;
  auto px = [&](double v) { return left + ax.unit(v) * pw; };
  auto py = [&](double v) { return top + (1.0 - ay.unit(v)) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    out += "<text x=\"" + coord(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(spec.title) + "</text>\n";
  }

  const auto xt = spec.log_x ? log_ticks(ax.lo, ax.hi) : linear_ticks(ax.lo, ax.hi);
  const auto yt = spec.log_y ? log_ticks(ay.lo, ay.hi) : linear_ticks(ay.lo, ay.hi);
  out += "<g stroke=\"#e0e0e0\" stroke-width=\"1\">\n";
  for (double t : xt) {
    out += "<line x1=\"" + coord(px(t)) + "\" y1=\"" + coord(top) + "\" x2=\"" + coord(px(t)) + "\" y2=\"" +
           coord(top + ph) + "\"/>\n";
  }
  for (double t : yt) {
    out += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(py(t)) + "\" x2=\"" + coord(left + pw) + "\" y2=\"" +
           coord(py(t)) + "\"/>\n";
  }
  out += "</g>\n";
  out += "<rect x=\"" + coord(left) + "\" y=\"" + coord(top) + "\" width=\"" + coord(pw) + "\" height=\"" +
         coord(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : xt) {
    out += "<text x=\"" + coord(px(t)) + "\" y=\"" + coord(top + ph + 16) + "\" text-anchor=\"middle\">" +
           tick_label(t, spec.log_x) + "</text>\n";
  }
  for (double t : yt) {
    out += "<text x=\"" + coord(left - 6) + "\" y=\"" + coord(py(t) + 4) + "\" text-anchor=\"end\">" +
           tick_label(t, spec.log_y) + "</text>\n";
  }
  out += "<text x=\"" + coord(left + pw / 2) + "\" y=\"" + coord(spec.height - 16.0) +
         "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
  out += "<text transform=\"translate(18 " + coord(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(spec.y_label) + "</text>\n";

  out += "<clipPath id=\"plot-area\"><rect x=\"" + coord(left) + "\" y=\"" + coord(top) + "\" width=\"" +
         coord(pw) + "\" height=\"" + coord(ph) + "\"/></clipPath>\n";
  int other_index = 0;
  std::vector<std::string> colors;
  for (const auto& s : series) {
    const std::string color = color_for(s, other_index);
    colors.push_back(color);
    std::string points;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!drawable(s.x[k], spec.log_x) || !drawable(s.y[k], spec.log_y)) continue;
      if (!points.empty()) points += ' ';
      points += coord(px(s.x[k])) + "," + coord(py(s.y[k]));
    }
    out += "<polyline clip-path=\"url(#plot-area)\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
    if (s.dashed) out += " stroke-dasharray=\"6 4\"";
    out += " points=\"" + points + "\"/>\n";
  }

  const double lx = left + pw - 180, ly = top + 10;
  out += "<g>\n<rect x=\"" + coord(lx) + "\" y=\"" + coord(ly) + "\" width=\"170\" height=\"" +
         coord(18.0 * series.size() + 8) + "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#999\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = ly + 16 + 18.0 * k;
    out += "<line x1=\"" + coord(lx + 8) + "\" y1=\"" + coord(y - 4) + "\" x2=\"" + coord(lx + 32) + "\" y2=\"" +
           coord(y - 4) + "\" stroke=\"" + colors[k] + "\" stroke-width=\"2\"";
    if (series[k].dashed) out += " stroke-dasharray=\"6 4\"";
    out += "/>\n<text x=\"" + coord(lx + 38) + "\" y=\"" + coord(y) + "\">" + escape(series[k].label) + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  result.svg = std::move(out);
  return result;
}

SvgResult render_line_plot(const std::vector<ObservableRecord>& records, const PlotSpec& spec) {
  if (spec.series.empty()) throw ArgumentError("plot spec has no series");
  std::vector<XYSeries> data;
  for (const auto& s : spec.series) {
    for (const auto* col : {&s.x_column, &s.y_column}) {
      if (!has_column(records, *col)) throw ArgumentError("plot column '" + *col + "' is not in the record schema");
    }
    XYSeries xy;
    xy.label = s.label.empty() ? s.y_column : s.label;
    xy.role = s.role;
    xy.dashed = s.dashed;
    for (const auto& r : records) {
      xy.x.push_back(record_column(r, s.x_column));
      xy.y.push_back(record_column(r, s.y_column));
    }
    data.push_back(std::move(xy));
  }
  return render_svg(data, spec);
}

}  // namespace abring
