#include "ssinv/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssinv/types.hpp"
#include "ssinv/util.hpp"

namespace ssinv::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 56.0;
constexpr double kRight = 16.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 48.0;

std::string num(double v) {
  // Pixel coordinates; two decimals keeps files small and stable.
  double r = std::round(v * 100.0) / 100.0;
  if (r == 0.0) r = 0.0;  // avoid -0
  return format_double(r);
}

}  // namespace

std::string histogram(const std::vector<double>& values, double bin_width,
                      const std::string& title, const std::string& x_label) {
  if (values.empty()) throw Error("svg histogram: no values");
  if (!(bin_width > 0.0)) throw Error("svg histogram: bin width must be positive");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error("svg histogram: values must be finite and non-negative");
  }

  const double vmax = *std::max_element(values.begin(), values.end());
  int n_bin = static_cast<int>(std::floor(vmax / bin_width)) + 1;
  if (n_bin < 1) n_bin = 1;
  std::vector<int> counts(static_cast<std::size_t>(n_bin), 0);
  for (double v : values) {
    int b = static_cast<int>(std::floor(v / bin_width));
    if (b >= n_bin) b = n_bin - 1;  // v == exact upper edge
    ++counts[static_cast<std::size_t>(b)];
  }
  const int cmax = *std::max_element(counts.begin(), counts.end());
  const double mean = mean_of(values);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double x_span = bin_width * n_bin;
  auto px = [&](double v) { return kLeft + v / x_span * plot_w; };
  auto py = [&](double c) { return kTop + plot_h - c / cmax * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth)
      << " " << num(kHeight) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  for (int b = 0; b < n_bin; ++b) {
    const int c = counts[static_cast<std::size_t>(b)];
    if (c == 0) continue;
    const double x0 = px(b * bin_width);
    const double x1 = px((b + 1) * bin_width);
    out << "<rect x=\"" << num(x0 + 0.5) << "\" y=\"" << num(py(c))
        << "\" width=\"" << num(x1 - x0 - 1.0) << "\" height=\""
        << num(kTop + plot_h - py(c))
        << "\" fill=\"#4878a8\" stroke=\"#2d4a66\" stroke-width=\"0.5\"/>\n";
  }

  // axes
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h)
      << "\" x2=\"" << num(kLeft + plot_w) << "\" y2=\"" << num(kTop + plot_h)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\""
      << num(kLeft) << "\" y2=\"" << num(kTop + plot_h)
      << "\" stroke=\"black\"/>\n";

  // x ticks: label every bin edge while readable, else thin out
  int stride = 1;
  while (n_bin / stride > 12) stride *= 2;
  for (int b = 0; b <= n_bin; b += stride) {
    const double x = px(b * bin_width);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + plot_h)
        << "\" x2=\"" << num(x) << "\" y2=\"" << num(kTop + plot_h + 5)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(b * bin_width) << "</text>\n";
  }
  // y ticks: 0 .. cmax in up to five steps
  int y_step = std::max(1, (cmax + 4) / 5);
  for (int c = 0; c <= cmax; c += y_step) {
    const double y = py(c);
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y)
        << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kLeft - 9) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << c << "</text>\n";
  }

  out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\""
      << num(kHeight - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << num(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << num(kTop + plot_h / 2) << ")\">count</text>\n";

  const double mx = px(std::min(mean, x_span));
  out << "<line x1=\"" << num(mx) << "\" y1=\"" << num(kTop) << "\" x2=\""
      << num(mx) << "\" y2=\"" << num(kTop + plot_h)
      << "\" stroke=\"#b03030\" stroke-dasharray=\"5,3\"/>\n";
  out << "<text x=\"" << num(mx + 5) << "\" y=\"" << num(kTop + 14)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#b03030\">mean = "
      << format_double(std::round(mean * 1000.0) / 1000.0) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace ssinv::svg
