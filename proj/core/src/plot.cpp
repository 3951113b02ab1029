#include "mhfit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "format.hpp"

namespace mhfit {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
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

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << escape(title) << "</text>\n";
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, std::span<const Series> series,
                          std::span<const Marker> markers) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return kTop + (1.0 - (v - y0) / (y1 - y0)) * ph; };

  std::ostringstream out;
  header(out, title);
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = y0 + (y1 - y0) * i / 4.0;
    const double xv = x0 + (x1 - x0) * i / 4.0;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sy(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(yv)
        << "</text>\n";
    out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xv)
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 16 " << kTop + ph / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      out << num(sx(s.x[k])) << ',' << num(sy(s.y[k])) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color << "\"/>\n"
        << "<text x=\"" << kWidth - kRight + 36 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.name) << "</text>\n";
  }
  for (const auto& m : markers) {
    out << "<line x1=\"" << num(sx(m.x)) << "\" y1=\"" << kTop << "\" x2=\"" << num(sx(m.x))
        << "\" y2=\"" << kTop + ph << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n"
        << "<text x=\"" << num(sx(m.x) + 3) << "\" y=\"" << kTop + 12
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(m.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string bar_chart_svg(const std::string& title, std::span<const std::string> groups,
                          std::span<const std::string> bar_names,
                          const std::vector<std::vector<double>>& values) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double group_w = pw / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  const double bar_w =
      group_w * 0.8 / static_cast<double>(std::max<std::size_t>(bar_names.size(), 1));

  std::ostringstream out;
  header(out, title);
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = kTop + ph * (1.0 - i / 5.0);
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << i * 20
        << "%</text>\n";
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = kLeft + group_w * static_cast<double>(g) + group_w * 0.1;
    for (std::size_t b = 0; b < bar_names.size(); ++b) {
      const double v = std::clamp(values[g][b], 0.0, 1.0);
      const double h = v * ph;
      out << "<rect x=\"" << num(gx + bar_w * static_cast<double>(b)) << "\" y=\""
          << num(kTop + ph - h) << "\" width=\"" << num(bar_w * 0.9) << "\" height=\"" << num(h)
          << "\" fill=\"" << kPalette[b % std::size(kPalette)] << "\"><title>"
          << escape(groups[g]) << ' ' << escape(bar_names[b]) << ' ' << num(100.0 * v)
          << "%</title></rect>\n";
    }
    out << "<text x=\"" << num(gx + group_w * 0.4) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(groups[g]) << "</text>\n";
  }
  for (std::size_t b = 0; b < bar_names.size(); ++b) {
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(b);
    out << "<rect x=\"" << kWidth - kRight + 10 << "\" y=\"" << ly - 8
        << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[b % std::size(kPalette)] << "\"/>\n"
        << "<text x=\"" << kWidth - kRight + 28 << "\" y=\"" << ly + 2
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(bar_names[b])
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string series_csv(std::span<const Series> series) {
  std::ostringstream out;
  out << "series,x,y\n";
  for (const auto& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      out << s.name << ',' << format_double(s.x[k]) << ',' << format_double(s.y[k]) << '\n';
    }
  }
  return out.str();
}

}  // namespace mhfit
