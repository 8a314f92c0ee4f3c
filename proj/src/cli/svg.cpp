#include "admissible/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace admissible::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 170.0, kTop = 40.0, kBottom = 60.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

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

void header(std::ostringstream& o, const std::string& title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
}

void legend(std::ostringstream& o, const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = kTop + 10.0;
  const double x = kWidth - kRight + 20.0;
  for (const auto& [label, color] : entries) {
    o << "<circle class=\"legend\" cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"5\" fill=\"" << color
      << "\"/><text x=\"" << num(x + 10) << "\" y=\"" << num(y + 4) << "\">" << escape(label) << "</text>\n";
    y += 18.0;
  }
}

}  // namespace

std::string verdict_color(const std::string& verdict) {
  if (verdict == "accepted") return "#1b9e77";
  if (verdict == "consistency-lower") return "#d95f02";
  if (verdict == "consistency-upper") return "#7570b3";
  if (verdict == "evaluability") return "#e7298a";
  return "#666666";
}

std::string render_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  double x_lo = spec.x_lo, x_hi = spec.x_hi, y_lo = spec.y_lo, y_hi = spec.y_hi;
  if (x_lo == x_hi || y_lo == y_hi) {
    double a = INFINITY, b = -INFINITY, c = INFINITY, d = -INFINITY;
    for (const auto& s : series) {
      for (const auto& [x, y] : s.points) {
        a = std::min(a, x), b = std::max(b, x), c = std::min(c, y), d = std::max(d, y);
      }
    }
    if (!std::isfinite(a)) a = 0, b = 1, c = 0, d = 1;
    if (x_lo == x_hi) x_lo = a, x_hi = b > a ? b : a + 1.0;
    if (y_lo == y_hi) {
      const double pad = d > c ? 0.05 * (d - c) : 0.5;
      y_lo = c - pad, y_hi = d + pad;
    }
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

  std::ostringstream o;
  header(o, spec.title);
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0, yv = y_lo + (y_hi - y_lo) * i / 4.0;
    o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">" << num(xv)
      << "</text>\n<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
      << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 18) << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n<text transform=\"translate(18," << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";
  if (spec.l1_diamond) {
    o << "<polygon points=\"" << num(px(1)) << ',' << num(py(0)) << ' ' << num(px(0)) << ',' << num(py(1)) << ' '
      << num(px(-1)) << ',' << num(py(0)) << ' ' << num(px(0)) << ',' << num(py(-1))
      << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
  }
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& s : series) {
    entries.emplace_back(s.label, s.color);
    if (s.line && !s.points.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (const auto& [x, y] : s.points) o << num(px(x)) << ',' << num(py(y)) << ' ';
      o << "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      o << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
    }
  }
  legend(o, entries);
  o << "</svg>\n";
  return o.str();
}

std::string render_ternary(const std::string& title, const std::vector<std::string>& corner_labels,
                           const std::vector<std::pair<std::string, std::string>>& legend_entries,
                           const std::vector<TernaryPoint>& points) {
  // Corners: 0 bottom-left, 1 top, 2 bottom-right.
  const double side = 320.0;
  const double cx[3] = {kLeft + 20.0, kLeft + 20.0 + side / 2.0, kLeft + 20.0 + side};
  const double base = kTop + 30.0 + side * std::sqrt(3.0) / 2.0;
  const double cy[3] = {base, kTop + 30.0, base};

  std::ostringstream o;
  header(o, title);
  o << "<polygon points=\"";
  for (int i = 0; i < 3; ++i) o << num(cx[i]) << ',' << num(cy[i]) << ' ';
  o << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double dy[3] = {18.0, -8.0, 18.0};
  for (int i = 0; i < 3 && i < static_cast<int>(corner_labels.size()); ++i) {
    o << "<text x=\"" << num(cx[i]) << "\" y=\"" << num(cy[i] + dy[i]) << "\" text-anchor=\"middle\">"
      << escape(corner_labels[static_cast<std::size_t>(i)]) << "</text>\n";
  }
  for (const auto& p : points) {
    const Vec a = p.weights.cwiseAbs();
    const double s = a.sum();
    if (!(s > 0.0)) continue;
    const double x = (a[0] * cx[0] + a[1] * cx[1] + a[2] * cx[2]) / s;
    const double y = (a[0] * cy[0] + a[1] * cy[1] + a[2] * cy[2]) / s;
    const std::string color = p.series < legend_entries.size() ? legend_entries[p.series].second : "#666666";
    o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
  }
  legend(o, legend_entries);
  o << "</svg>\n";
  return o.str();
}

}  // namespace admissible::cli
