#include "wordrep/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wordrep::svg {

namespace {

constexpr int kWidth = 480;
constexpr int kHeight = 360;
constexpr int kMarginLeft = 56;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 32;
constexpr int kMarginBottom = 48;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

struct Axis {
  double lo = 0, hi = 1;
  double to_px(double v, double px_lo, double px_hi) const {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return px_lo + t * (px_hi - px_lo);
  }
};

Axis fit_axis(double lo, double hi) {
  if (!(hi > lo)) {
    hi = lo + 1;
    lo = lo - 1;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";
}

void axes(std::ostringstream& out, const Axis& xa, const Axis& ya, const std::string& x_label,
          const std::string& y_label) {
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xa.lo + (xa.hi - xa.lo) * i / 4.0;
    const double fy = ya.lo + (ya.hi - ya.lo) * i / 4.0;
    const double px = xa.to_px(fx, x0, x1);
    const double py = ya.to_px(fy, y0, y1);
    out << "<text x=\"" << num(px) << "\" y=\"" << y0 + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(fx)
        << "</text>\n";
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << num(py + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
         "14 "
      << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
}

}  // namespace

std::string line_panel(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        xlo = xhi = x;
        ylo = yhi = y;
        first = false;
      }
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  const Axis xa = fit_axis(xlo, xhi);
  const Axis ya = fit_axis(std::min(0.0, ylo), yhi);
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;

  std::ostringstream out;
  open_svg(out, title);
  axes(out, xa, ya, x_label, y_label);
  int legend_y = y1 + 12;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) out << " stroke-dasharray=\"5,3\"";
    out << " points=\"";
    for (const auto& [x, y] : s.points)
      out << num(xa.to_px(x, x0, x1)) << ',' << num(ya.to_px(y, y0, y1)) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : s.points)
      out << "<circle cx=\"" << num(xa.to_px(x, x0, x1)) << "\" cy=\"" << num(ya.to_px(y, y0, y1))
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << x1 - 4 << "\" y=\"" << legend_y
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << s.color
        << "\">" << s.label << (s.dashed ? " (dashed)" : "") << "</text>\n";
    legend_y += 12;
  }
  out << "</svg>\n";
  return out.str();
}

std::string bar_panel(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::vector<double>& errors) {
  double lo = 0, hi = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    const double e = i < errors.size() ? errors[i] : 0.0;
    lo = std::min(lo, values[i] - e);
    hi = std::max(hi, values[i] + e);
  }
  const Axis ya = fit_axis(lo, hi);
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;

  std::ostringstream out;
  open_svg(out, title);
  axes(out, Axis{0, 1}, ya, "", "");
  const double slot = static_cast<double>(x1 - x0) / std::max<size_t>(1, values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double cx = x0 + slot * (static_cast<double>(i) + 0.5);
    const double zero_px = ya.to_px(0.0, y0, y1);
    const double top_px = ya.to_px(values[i], y0, y1);
    out << "<rect x=\"" << num(cx - slot * 0.3) << "\" y=\"" << num(std::min(top_px, zero_px))
        << "\" width=\"" << num(slot * 0.6) << "\" height=\"" << num(std::abs(zero_px - top_px))
        << "\" fill=\"" << (values[i] >= 0 ? "#4878cf" : "#d65f5f") << "\"/>\n";
    if (i < errors.size() && errors[i] > 0) {
      const double e1 = ya.to_px(values[i] - errors[i], y0, y1);
      const double e2 = ya.to_px(values[i] + errors[i], y0, y1);
      out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(e1) << "\" x2=\"" << num(cx) << "\" y2=\""
          << num(e2) << "\" stroke=\"black\"/>\n";
    }
    out << "<text x=\"" << num(cx) << "\" y=\"" << y0 + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << labels[i]
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string scatter_panel(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<ScatterPoint>& points,
                          bool diagonal) {
  double lo = 0, hi = 1;
  for (const auto& p : points) {
    lo = std::min({lo, p.x, p.y});
    hi = std::max({hi, p.x, p.y});
  }
  const Axis a = fit_axis(lo, hi);
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;

  std::ostringstream out;
  open_svg(out, title);
  axes(out, a, a, x_label, y_label);
  if (diagonal) {
    out << "<line x1=\"" << num(a.to_px(a.lo, x0, x1)) << "\" y1=\"" << num(a.to_px(a.lo, y0, y1))
        << "\" x2=\"" << num(a.to_px(a.hi, x0, x1)) << "\" y2=\"" << num(a.to_px(a.hi, y0, y1))
        << "\" stroke=\"#999999\" stroke-dasharray=\"4,3\"/>\n";
  }
  for (const auto& p : points)
    out << "<circle cx=\"" << num(a.to_px(p.x, x0, x1)) << "\" cy=\"" << num(a.to_px(p.y, y0, y1))
        << "\" r=\"3\" fill=\"" << p.color << "\" fill-opacity=\"0.7\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string heatmap(const std::string& title, const Eigen::MatrixXd& values,
                    const std::vector<std::string>& labels) {
  const Eigen::Index n = values.rows();
  const int cell = std::max(4, static_cast<int>(420 / std::max<Eigen::Index>(1, n)));
  const int grid = cell * static_cast<int>(n);
  const int margin = 60;
  const int width = grid + margin + 16;
  const int height = grid + margin + 16;
  double lo = values.minCoeff(), hi = values.maxCoeff();
  if (!(hi > lo)) hi = lo + 1;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << title << "</text>\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double t = (values(i, j) - lo) / (hi - lo);
      const int r = static_cast<int>(255 * t);
      const int b = static_cast<int>(255 * (1 - t));
      out << "<rect x=\"" << margin + static_cast<int>(j) * cell << "\" y=\""
          << margin + static_cast<int>(i) * cell << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"rgb(" << r << ",64," << b << ")\"/>\n";
    }
  }
  if (!labels.empty() && cell >= 8) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out << "<text x=\"" << margin - 4 << "\" y=\"" << margin + static_cast<int>(i) * cell + cell / 2 + 3
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"" << std::min(9, cell - 1)
          << "\">" << labels[static_cast<size_t>(i)] << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace wordrep::svg
