#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "stcast/types.hpp"

namespace stcast::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

void write_line_chart(const std::filesystem::path& path,
                      const std::string& title,
                      const std::vector<std::string>& x_labels,
                      const std::vector<SvgSeries>& series, int split_index) {
  constexpr double kWidth = 920, kHeight = 420;
  constexpr double kLeft = 60, kRight = 160, kTop = 40, kBottom = 40;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  const std::size_t n = x_labels.size();
  double lo = 0, hi = 1;
  for (const auto& s : series) {
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) hi = lo + 1;

  auto xpos = [&](std::size_t i) {
    return kLeft + (n <= 1 ? 0.0 : plot_w * static_cast<double>(i) /
                                       static_cast<double>(n - 1));
  };
  auto ypos = [&](double v) {
    return kTop + plot_h * (1.0 - (v - lo) / (hi - lo));
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";

  // Axes.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << ypos(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(v) << "</text>\n";
  }
  const std::size_t label_step = std::max<std::size_t>(1, n / 10);
  for (std::size_t i = 0; i < n; i += label_step) {
    out << "<text x=\"" << xpos(i) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << x_labels[i] << "</text>\n";
  }

  // Train/test boundary.
  if (split_index > 0 && static_cast<std::size_t>(split_index) < n) {
    out << "<line x1=\"" << xpos(split_index) << "\" y1=\"" << kTop
        << "\" x2=\"" << xpos(split_index) << "\" y2=\"" << kTop + plot_h
        << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"";
    if (s.dashed) out << " stroke-dasharray=\"4,3\"";
    out << " points=\"";
    for (std::size_t i = 0; i < s.values.size() && i < n; ++i) {
      out << num(xpos(i)) << "," << num(ypos(s.values[i])) << " ";
    }
    out << "\"/>\n";
  }

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    out << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << legend_y
        << "\" x2=\"" << kLeft + plot_w + 36 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) out << " stroke-dasharray=\"4,3\"";
    out << "/>\n";
    out << "<text x=\"" << kLeft + plot_w + 42 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name
        << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

}  // namespace stcast::cli
