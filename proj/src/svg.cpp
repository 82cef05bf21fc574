#include "ds2/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <locale>
#include <sstream>

#include "ds2/types.hpp"

namespace ds2 {

std::string fmt_num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

// fixed number of decimals, still via to_chars
std::string fmt_fixed(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
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

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

struct Axis {
  double lo, hi;
  bool log;
  double map(double v, double p0, double p1) const {
    double t = log ? std::log10(v) : v;
    return p0 + (t - lo) / (hi - lo) * (p1 - p0);
  }
};

Axis make_axis(double lo, double hi, bool log) {
  if (log) {
    lo = std::floor(std::log10(lo));
    hi = std::ceil(std::log10(hi));
  }
  if (hi - lo < 1e-300) {
    double pad = std::max(std::abs(lo) * 0.05, 0.5);
    lo -= pad;
    hi += pad;
  } else if (!log) {
    double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, log};
}

// tick positions in axis units (decades for log axes)
std::vector<double> ticks(const Axis& a) {
  std::vector<double> t;
  if (a.log) {
    int step = std::max(1, int(std::ceil((a.hi - a.lo) / 8)));
    for (double d = std::ceil(a.lo); d <= a.hi + 1e-9; d += step) t.push_back(d);
    return t;
  }
  double raw = (a.hi - a.lo) / 6;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-9 * step; v += step)
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

std::string tick_label(double v, bool log) {
  if (log) return "1e" + fmt_fixed(v, 0);
  double a = std::abs(v);
  if (a == 0) return "0";
  if (a >= 1e4 || a < 1e-3) return fmt_num(v);
  int digits = a >= 100 ? 0 : a >= 1 ? 2 : 3;
  std::string s = fmt_fixed(v, digits);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

struct Frame {
  double left = 70, right = 20, top = 36, bottom = 52;
};

void header(std::ostringstream& o, const PlotStyle& s) {
  o.imbue(std::locale::classic());
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << s.width << "\" height=\"" << s.height
    << "\" viewBox=\"0 0 " << s.width << ' ' << s.height << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << s.width << "\" height=\"" << s.height << "\" fill=\"white\"/>\n";
  if (!s.title.empty())
    o << "<text x=\"" << s.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << escape(s.title) << "</text>\n";
}

void axes(std::ostringstream& o, const PlotStyle& s, const Frame& f, const Axis& ax, const Axis& ay) {
  double x0 = f.left, x1 = s.width - f.right, y0 = s.height - f.bottom, y1 = f.top;
  o << "<rect x=\"" << fmt_num(x0) << "\" y=\"" << fmt_num(y1) << "\" width=\"" << fmt_num(x1 - x0)
    << "\" height=\"" << fmt_num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(ax)) {
    double px = x0 + (t - ax.lo) / (ax.hi - ax.lo) * (x1 - x0);
    o << "<line x1=\"" << fmt_fixed(px, 2) << "\" y1=\"" << fmt_num(y0) << "\" x2=\"" << fmt_fixed(px, 2)
      << "\" y2=\"" << fmt_num(y0 + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt_fixed(px, 2) << "\" y=\"" << fmt_num(y0 + 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(t, ax.log)
      << "</text>\n";
  }
  for (double t : ticks(ay)) {
    double py = y0 + (t - ay.lo) / (ay.hi - ay.lo) * (y1 - y0);
    o << "<line x1=\"" << fmt_num(x0 - 5) << "\" y1=\"" << fmt_fixed(py, 2) << "\" x2=\"" << fmt_num(x0)
      << "\" y2=\"" << fmt_fixed(py, 2) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt_num(x0 - 8) << "\" y=\"" << fmt_fixed(py + 4, 2)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(t, ay.log)
      << "</text>\n";
  }
  if (!s.xlabel.empty())
    o << "<text x=\"" << fmt_num((x0 + x1) / 2) << "\" y=\"" << fmt_num(s.height - 12.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(s.xlabel)
      << "</text>\n";
  if (!s.ylabel.empty())
    o << "<text x=\"16\" y=\"" << fmt_num((y0 + y1) / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 " << fmt_num((y0 + y1) / 2)
      << ")\">" << escape(s.ylabel) << "</text>\n";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

}  // namespace

std::string render_plot(const std::vector<PlotSeries>& series, const PlotStyle& style) {
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  size_t npts = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InputError("plot series '" + s.label + "' has mismatched lengths");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        throw InputError("plot series '" + s.label + "' has non-finite data");
      if ((style.logx && s.x[i] <= 0) || (style.logy && s.y[i] <= 0))
        throw InputError("plot series '" + s.label + "' has nonpositive data on a log axis");
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
      ++npts;
    }
  }
  if (npts == 0) throw InputError("empty plot data");
  for (double v : style.vlines)
    if (!style.logx || v > 0) {
      xlo = std::min(xlo, v);
      xhi = std::max(xhi, v);
    }

  Frame f;
  Axis ax = make_axis(xlo, xhi, style.logx), ay = make_axis(ylo, yhi, style.logy);
  double x0 = f.left, x1 = style.width - f.right, y0 = style.height - f.bottom, y1 = f.top;

  std::ostringstream o;
  header(o, style);
  axes(o, style, f, ax, ay);
  for (double v : style.vlines) {
    if (style.logx && v <= 0) continue;
    double px = ax.map(v, x0, x1);
    o << "<line x1=\"" << fmt_fixed(px, 2) << "\" y1=\"" << fmt_num(y0) << "\" x2=\"" << fmt_fixed(px, 2)
      << "\" y2=\"" << fmt_num(y1) << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
  }
  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (s.dashed) o << " stroke-dasharray=\"6,4\"";
    o << " points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (i) o << ' ';
      o << fmt_fixed(ax.map(s.x[i], x0, x1), 2) << ',' << fmt_fixed(ay.map(s.y[i], y0, y1), 2);
    }
    o << "\"/>\n";
    if (s.markers)
      for (size_t i = 0; i < s.x.size(); ++i)
        o << "<circle cx=\"" << fmt_fixed(ax.map(s.x[i], x0, x1), 2) << "\" cy=\""
          << fmt_fixed(ay.map(s.y[i], y0, y1), 2) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    if (!s.label.empty()) {
      double ly = y1 + 16 + 16 * double(si);
      o << "<line x1=\"" << fmt_num(x1 - 150) << "\" y1=\"" << fmt_num(ly - 4) << "\" x2=\"" << fmt_num(x1 - 126)
        << "\" y2=\"" << fmt_num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
      o << "<text x=\"" << fmt_num(x1 - 120) << "\" y=\"" << fmt_num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

void emit_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotStyle& style) {
  write_file(path, render_plot(series, style));
}

std::string render_heatmap(const HeatMap& h, const PlotStyle& style, int max_cells) {
  if (h.nx <= 0 || h.ny <= 0 || h.v.size() != size_t(h.nx) * h.ny) throw InputError("empty heat map");
  double vmax = -INFINITY, vmin = INFINITY;
  for (double v : h.v) {
    if (!std::isfinite(v)) throw InputError("heat map has non-finite data");
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  // block-average down to at most max_cells per side
  int bx = (h.nx + max_cells - 1) / max_cells, by = (h.ny + max_cells - 1) / max_cells;
  int cx = h.nx / bx, cy = h.ny / by;

  Frame f;
  f.right = 70;
  Axis ax{h.x0, h.x1, false}, ay{h.y0, h.y1, false};
  double x0 = f.left, x1 = style.width - f.right, y0 = style.height - f.bottom, y1 = f.top;
  double w = (x1 - x0) / cx, hgt = (y0 - y1) / cy;
  double span = vmax > vmin ? vmax - vmin : 1.0;

  std::ostringstream o;
  header(o, style);
  for (int i = 0; i < cx; ++i)
    for (int j = 0; j < cy; ++j) {
      double acc = 0;
      for (int a = 0; a < bx; ++a)
        for (int b = 0; b < by; ++b) acc += h.v[size_t(i * bx + a) * h.ny + (j * by + b)];
      double t = (acc / (bx * by) - vmin) / span;
      // white -> dark blue ramp
      int r = int(std::lround(255 * (1 - t))), g = int(std::lround(255 * (1 - 0.8 * t))),
          bl = int(std::lround(255 - 100 * t));
      char col[8];
      std::snprintf(col, sizeof col, "#%02x%02x%02x", r, g, bl);
      o << "<rect x=\"" << fmt_fixed(x0 + i * w, 2) << "\" y=\"" << fmt_fixed(y0 - (j + 1) * hgt, 2)
        << "\" width=\"" << fmt_fixed(w + 0.05, 2) << "\" height=\"" << fmt_fixed(hgt + 0.05, 2) << "\" fill=\""
        << col << "\"/>\n";
    }
  axes(o, style, f, ax, ay);
  o << "<text x=\"" << fmt_num(x1 + 8) << "\" y=\"" << fmt_num(y1 + 10)
    << "\" font-family=\"sans-serif\" font-size=\"11\">max " << tick_label(vmax, false) << "</text>\n";
  o << "<text x=\"" << fmt_num(x1 + 8) << "\" y=\"" << fmt_num(y0)
    << "\" font-family=\"sans-serif\" font-size=\"11\">min " << tick_label(vmin, false) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

void emit_heatmap(const std::string& path, const HeatMap& h, const PlotStyle& style, int max_cells) {
  write_file(path, render_heatmap(h, style, max_cells));
}

SvgSummary read_svg_text(const std::string& svg) {
  SvgSummary s;
  std::vector<std::string> stack;
  bool saw_root = false;
  size_t pos = 0;
  while (true) {
    size_t lt = svg.find('<', pos);
    if (lt == std::string::npos) break;
    if (!stack.empty() && stack.back() == "text") {
      std::string body = svg.substr(pos, lt - pos);
      if (!body.empty()) s.text.push_back(body);
    }
    size_t gt = svg.find('>', lt);
    if (gt == std::string::npos) return s;
    std::string tag = svg.substr(lt + 1, gt - lt - 1);
    pos = gt + 1;
    if (tag.empty()) return s;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return s;
      stack.pop_back();
      continue;
    }
    bool self_close = tag.back() == '/';
    std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (stack.empty()) {
      if (saw_root || name != "svg") return s;
      saw_root = true;
      auto attr = [&](const std::string& key) {
        size_t k = tag.find(" " + key + "=\"");
        if (k == std::string::npos) return 0.0;
        k += key.size() + 3;
        double v = 0;
        std::from_chars(tag.data() + k, tag.data() + tag.size(), v);
        return v;
      };
      s.width = attr("width");
      s.height = attr("height");
    }
    if (name == "polyline") ++s.polylines;
    else if (name == "rect") ++s.rects;
    else if (name == "line") ++s.lines;
    else if (name == "text") ++s.texts;
    if (!self_close) stack.push_back(name);
  }
  s.well_formed = saw_root && stack.empty();
  return s;
}

SvgSummary read_svg(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return read_svg_text(ss.str());
}

}  // namespace ds2
