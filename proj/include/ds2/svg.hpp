#pragma once

#include <string>
#include <vector>

namespace ds2 {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;
  bool dashed = false;
};

struct PlotStyle {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;  // base 10
  std::vector<double> vlines;       // dotted vertical markers
  int width = 640, height = 480;
};

// Standalone SVG line plot. Throws InputError on empty or non-finite data.
std::string render_plot(const std::vector<PlotSeries>& series, const PlotStyle& style);
void emit_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotStyle& style);

// Heat map of a real field given row-major [i][j] with j fastest; x runs
// over i, y over j.
struct HeatMap {
  int nx = 0, ny = 0;
  std::vector<double> v;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
};
std::string render_heatmap(const HeatMap& h, const PlotStyle& style, int max_cells = 128);
void emit_heatmap(const std::string& path, const HeatMap& h, const PlotStyle& style, int max_cells = 128);

// Minimal reader: checks tag balance and counts the drawing elements.
struct SvgSummary {
  bool well_formed = false;
  double width = 0, height = 0;
  int polylines = 0, rects = 0, lines = 0, texts = 0;
  std::vector<std::string> text;
};
SvgSummary read_svg_text(const std::string& svg);
SvgSummary read_svg(const std::string& path);

// locale independent shortest round-trip formatting
std::string fmt_num(double v);

}  // namespace ds2
