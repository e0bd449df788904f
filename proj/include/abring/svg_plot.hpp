#pragma once

#include "abring/sweeps.hpp"

#include <string>
#include <vector>

namespace abring {

// Bare curves draw green, coupled curves red, reference guides grey dashed.
enum class SeriesRole { Bare, Coupled, Reference, Other };

struct SeriesSpec {
  std::string x_column;
  std::string y_column;
  std::string label;
  SeriesRole role = SeriesRole::Other;
  bool dashed = false;
};

struct XYSeries {
  std::string label;
  SeriesRole role = SeriesRole::Other;
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::vector<SeriesSpec> series;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 720;
  int height = 480;
};

struct SvgResult {
  std::string svg;
  // Points left out because they were non-finite or non-positive on a log axis.
  int dropped_points = 0;
};

// Series in `spec.series` are ignored; the data comes from `series`.
SvgResult render_svg(const std::vector<XYSeries>& series, const PlotSpec& spec);

// Pulls each series from record columns. Throws ArgumentError for an unknown
// column or when no series has two drawable points.
SvgResult render_line_plot(const std::vector<ObservableRecord>& records, const PlotSpec& spec);

// Axis tick positions covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi, int target = 6);
std::vector<double> log_ticks(double lo, double hi);

}  // namespace abring
