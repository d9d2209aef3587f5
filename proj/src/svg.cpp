#include "qwpde/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qwpde::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// five-stop dark-blue to yellow ramp
std::string colour_at(double t) {
  static const double stops[5][3] = {{68, 1, 84},
                                     {59, 82, 139},
                                     {33, 145, 140},
                                     {94, 201, 98},
                                     {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int lo = std::min(3, static_cast<int>(t));
  const double f = t - lo;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                int(std::lround(stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0]))),
                int(std::lround(stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1]))),
                int(std::lround(stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2]))));
  return buf;
}

}  // namespace

std::string heatmap(const Eigen::MatrixXd& values, const std::string& title) {
  const Eigen::Index rows = values.rows(), cols = values.cols();
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  const double plot = 480.0;
  const double cw = plot / double(std::max<Eigen::Index>(rows, 1));
  const double ch = plot / double(std::max<Eigen::Index>(cols, 1));
  const double width = plot + 120, height = plot + 60;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\">\n";
  out += "<text x=\"20\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" + title +
         "</text>\n";
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double t = (values(i, j) - lo) / span;
      // row index runs along x, column index upward along y
      out += "<rect x=\"" + num(20 + i * cw) + "\" y=\"" +
             num(40 + plot - (j + 1) * ch) + "\" width=\"" + num(cw + 0.5) +
             "\" height=\"" + num(ch + 0.5) + "\" fill=\"" + colour_at(t) + "\"/>\n";
    }
  }
  for (int k = 0; k <= 40; ++k) {
    out += "<rect x=\"" + num(plot + 50) + "\" y=\"" + num(40 + plot - (k + 1) * plot / 41) +
           "\" width=\"18\" height=\"" + num(plot / 41 + 0.5) + "\" fill=\"" +
           colour_at(k / 40.0) + "\"/>\n";
  }
  out += "<text x=\"" + num(plot + 72) + "\" y=\"" + num(40 + plot) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + num(lo) + "</text>\n";
  out += "<text x=\"" + num(plot + 72) + "\" y=\"52\" font-family=\"sans-serif\" "
         "font-size=\"11\">" + num(hi) + "</text>\n";
  out += "</svg>\n";
  return out;
}

std::string line_chart(const std::vector<Line>& lines, const std::string& title) {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  bool first = true;
  for (const Line& l : lines) {
    if (l.x.size() == 0) continue;
    if (first) {
      x_lo = l.x.minCoeff();
      x_hi = l.x.maxCoeff();
      y_lo = l.y.minCoeff();
      y_hi = l.y.maxCoeff();
      first = false;
    } else {
      x_lo = std::min(x_lo, l.x.minCoeff());
      x_hi = std::max(x_hi, l.x.maxCoeff());
      y_lo = std::min(y_lo, l.y.minCoeff());
      y_hi = std::max(y_hi, l.y.maxCoeff());
    }
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1;
  if (y_hi <= y_lo) y_hi = y_lo + 1;

  const double w = 560, h = 380, ml = 60, mb = 40, mt = 40, mr = 20;
  auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mb - mt); };

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" +
         num(h) + "\">\n";
  out += "<text x=\"20\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">" + title +
         "</text>\n";
  out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(h - mb) + "\" x2=\"" + num(w - mr) +
         "\" y2=\"" + num(h - mb) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(h - mb) + "\" x2=\"" + num(ml) +
         "\" y2=\"" + num(mt) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(ml) + "\" y=\"" + num(h - 14) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + num(x_lo) + "</text>\n";
  out += "<text x=\"" + num(w - mr - 30) + "\" y=\"" + num(h - 14) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + num(x_hi) + "</text>\n";
  out += "<text x=\"8\" y=\"" + num(h - mb) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + num(y_lo) + "</text>\n";
  out += "<text x=\"8\" y=\"" + num(mt + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + num(y_hi) + "</text>\n";

  double legend_y = mt + 4;
  for (const Line& l : lines) {
    if (l.x.size() == 0) continue;
    std::string pts;
    for (Eigen::Index i = 0; i < l.x.size(); ++i) {
      pts += num(px(l.x[i])) + "," + num(py(l.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + l.colour + "\"";
    if (l.dashed) out += " stroke-dasharray=\"6 4\"";
    out += " stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + num(w - 150) + "\" y=\"" + num(legend_y) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + l.colour + "\">" +
           l.label + "</text>\n";
    legend_y += 16;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace qwpde::svg
