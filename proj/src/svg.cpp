#include "relosc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace relosc {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 32;
constexpr int kMarginBottom = 48;

struct Range {
  double lo = 0.0, hi = 1.0;
  double span() const { return hi - lo; }
};

Range pad(Range r) {
  if (r.hi <= r.lo) {
    const double c = r.lo;
    r.lo = c - 1.0;
    r.hi = c + 1.0;
    return r;
  }
  const double m = 0.05 * r.span();
  r.lo -= m;
  r.hi += m;
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void open_svg(std::ostringstream& os, const PlotOptions& opts) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
     << "\" height=\"" << opts.height << "\" viewBox=\"0 0 " << opts.width << ' '
     << opts.height << "\">\n";
  os << "<rect width=\"" << opts.width << "\" height=\"" << opts.height
     << "\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    os << "<text x=\"" << opts.width / 2
       << "\" y=\"20\" text-anchor=\"middle\" font-family=\"monospace\" "
          "font-size=\"14\">"
       << opts.title << "</text>\n";
}

void draw_axes(std::ostringstream& os, const PlotOptions& opts, const Range& rx,
               const Range& ry, bool log_x) {
  const int x0 = kMarginLeft, x1 = opts.width - kMarginRight;
  const int y0 = opts.height - kMarginBottom, y1 = kMarginTop;
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = rx.lo + rx.span() * i / 4.0;
    const double fy = ry.lo + ry.span() * i / 4.0;
    const int px = x0 + (x1 - x0) * i / 4;
    const int py = y0 - (y0 - y1) * i / 4;
    os << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\""
       << y0 + 4 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px << "\" y=\"" << y0 + 18
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">"
       << fmt(log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    os << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\""
       << py << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 3
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">"
       << fmt(fy) << "</text>\n";
  }
  if (!opts.x_label.empty())
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << opts.height - 10
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
       << opts.x_label << "</text>\n";
  if (!opts.y_label.empty())
    os << "<text x=\"14\" y=\"" << (y0 + y1) / 2
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
          "transform=\"rotate(-90 14 "
       << (y0 + y1) / 2 << ")\">" << opts.y_label << "</text>\n";
}

}  // namespace

std::string line_plot_svg(const std::vector<PlotSeries>& series,
                          const PlotOptions& opts) {
  if (series.empty()) throw std::invalid_argument("line_plot_svg: no series");

  Range rx, ry;
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("line_plot_svg: x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double xv = s.x[i];
      if (opts.log_x) {
        if (xv <= 0.0)
          throw std::invalid_argument("line_plot_svg: log axis needs positive x");
        xv = std::log10(xv);
      }
      if (first) {
        rx = {xv, xv};
        ry = {s.y[i], s.y[i]};
        first = false;
      } else {
        rx.lo = std::min(rx.lo, xv);
        rx.hi = std::max(rx.hi, xv);
        ry.lo = std::min(ry.lo, s.y[i]);
        ry.hi = std::max(ry.hi, s.y[i]);
      }
    }
  }
  if (first) throw std::invalid_argument("line_plot_svg: all series empty");
  rx = pad(rx);
  ry = pad(ry);

  const int x0 = kMarginLeft, x1 = opts.width - kMarginRight;
  const int y0 = opts.height - kMarginBottom, y1 = kMarginTop;
  auto to_px = [&](double v) {
    return x0 + (x1 - x0) * (v - rx.lo) / rx.span();
  };
  auto to_py = [&](double v) {
    return y0 - (y0 - y1) * (v - ry.lo) / ry.span();
  };

  std::ostringstream os;
  os << std::setprecision(8);
  open_svg(os, opts);
  draw_axes(os, opts, rx, ry, opts.log_x);
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.x.empty()) continue;
    const char* color = kPalette[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double xv = opts.log_x ? std::log10(s.x[i]) : s.x[i];
      os << to_px(xv) << ',' << to_py(s.y[i]) << ' ';
    }
    os << "\"/>\n";
    if (!s.label.empty())
      os << "<text x=\"" << x1 - 8 << "\" y=\"" << y1 + 14 * (si + 1)
         << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\""
         << color << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string histogram_svg(const std::vector<double>& values, int bins,
                          const PlotOptions& opts) {
  if (values.empty()) throw std::invalid_argument("histogram_svg: no values");
  if (bins < 1) throw std::invalid_argument("histogram_svg: bins must be positive");

  Range rv{*std::min_element(values.begin(), values.end()),
           *std::max_element(values.begin(), values.end())};
  if (rv.hi <= rv.lo) rv.hi = rv.lo + 1.0;
  std::vector<int> counts(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - rv.lo) / rv.span() * bins);
    b = std::clamp(b, 0, bins - 1);
    ++counts[b];
  }
  const int max_count = *std::max_element(counts.begin(), counts.end());

  const int x0 = kMarginLeft, x1 = opts.width - kMarginRight;
  const int y0 = opts.height - kMarginBottom, y1 = kMarginTop;

  std::ostringstream os;
  os << std::setprecision(8);
  open_svg(os, opts);
  draw_axes(os, opts, rv, Range{0.0, static_cast<double>(max_count)}, false);
  const double bar_w = static_cast<double>(x1 - x0) / bins;
  for (int b = 0; b < bins; ++b) {
    const double hgt = static_cast<double>(y0 - y1) * counts[b] / max_count;
    os << "<rect x=\"" << x0 + b * bar_w << "\" y=\"" << y0 - hgt << "\" width=\""
       << bar_w * 0.92 << "\" height=\"" << hgt << "\" fill=\"" << kPalette[0]
       << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace relosc
