#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "fddt/margins.hpp"
#include "fddt/time.hpp"

namespace fddt::svg {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Canvas {
  static constexpr double width = 860, height = 440;
  static constexpr double left = 70, right = 20, top = 44, bottom = 64;

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double x(double frac) const { return left + frac * plot_w(); }
  double y(double value, double ymax) const { return top + (1.0 - value / ymax) * plot_h(); }

  std::string header(const std::string& title) const {
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         title + "</text>\n";
    return s;
  }

  std::string axes(double ymax, const std::string& y_label) const {
    std::string s;
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
         num(height - bottom) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" +
         num(width - right) + "\" y2=\"" + num(height - bottom) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
      double v = ymax * t / 5.0;
      double yy = y(v, ymax);
      s += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(yy) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(yy) + "\" stroke=\"black\"/>\n";
      s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(yy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + short_num(v) +
           "</text>\n";
    }
    s += "<text x=\"16\" y=\"" + num(top - 12) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + y_label + "</text>\n";
    return s;
  }

  std::string x_labels(const BinGrid& grid) const {
    std::string s;
    int step = std::max(1, grid.bin_count / 12);
    for (int i = 0; i <= grid.bin_count; i += step) {
      TimeOfDay t = i < grid.bin_count ? grid.bin_start(i) : grid.window.end;
      double xx = x(static_cast<double>(i) / grid.bin_count);
      char label[16];
      std::snprintf(label, sizeof label, "%d:%02d", t.hour(), t.minute());
      s += "<text x=\"" + num(xx) + "\" y=\"" + num(height - bottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + label +
           "</text>\n";
    }
    return s;
  }
};

}  // namespace detail

/// Box-style confidence chart: one box per bin spanning [lower, upper] with a
/// line at the mean.
inline std::string margin_chart(const MarginForecast& f, const std::string& title) {
  detail::Canvas c;
  double ymax = 1.0;
  for (const auto& b : f.bins) ymax = std::max(ymax, b.upper);
  ymax *= 1.08;

  std::string s = c.header(title) + c.axes(ymax, "departures per interval") + c.x_labels(f.grid);
  const int n = f.grid.bin_count;
  for (int i = 0; i < n; ++i) {
    const auto& b = f.bins[static_cast<std::size_t>(i)];
    double x0 = c.x((i + 0.2) / n);
    double x1 = c.x((i + 0.8) / n);
    double yl = c.y(b.lower, ymax), yu = c.y(b.upper, ymax), ym = c.y(b.mean, ymax);
    s += "<rect x=\"" + detail::num(x0) + "\" y=\"" + detail::num(yu) + "\" width=\"" +
         detail::num(x1 - x0) + "\" height=\"" + detail::num(yl - yu) +
         "\" fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n";
    s += "<line x1=\"" + detail::num(x0) + "\" y1=\"" + detail::num(ym) + "\" x2=\"" +
         detail::num(x1) + "\" y2=\"" + detail::num(ym) + "\" stroke=\"#08306b\" stroke-width=\"2\"/>\n";
  }
  return s + "</svg>\n";
}

/// Plain bar chart over the grid's bins.
inline std::string bar_chart(const BinGrid& grid, const std::vector<double>& values,
                             const std::string& title, const std::string& y_label) {
  detail::Canvas c;
  double ymax = 0.0;
  for (double v : values) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.08;

  std::string s = c.header(title) + c.axes(ymax, y_label) + c.x_labels(grid);
  const int n = grid.bin_count;
  for (int i = 0; i < n; ++i) {
    double v = values[static_cast<std::size_t>(i)];
    double x0 = c.x((i + 0.1) / n);
    double x1 = c.x((i + 0.9) / n);
    double yv = c.y(v, ymax), y0 = c.y(0.0, ymax);
    s += "<rect x=\"" + detail::num(x0) + "\" y=\"" + detail::num(yv) + "\" width=\"" +
         detail::num(x1 - x0) + "\" height=\"" + detail::num(y0 - yv) +
         "\" fill=\"#a1d99b\" stroke=\"#31a354\"/>\n";
  }
  return s + "</svg>\n";
}

/// Side-by-side bars per bin: forecast value next to held-out ground truth.
inline std::string comparison_chart(const BinGrid& grid, const std::vector<double>& predicted,
                                    const std::vector<double>& ground_truth,
                                    const std::string& title) {
  detail::Canvas c;
  double ymax = 0.0;
  for (double v : predicted) ymax = std::max(ymax, v);
  for (double v : ground_truth) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.08;

  std::string s = c.header(title) + c.axes(ymax, "fraction of departures") + c.x_labels(grid);
  const int n = grid.bin_count;
  for (int i = 0; i < n; ++i) {
    double xp0 = c.x((i + 0.12) / n), xp1 = c.x((i + 0.48) / n);
    double xg0 = c.x((i + 0.52) / n), xg1 = c.x((i + 0.88) / n);
    double y0 = c.y(0.0, ymax);
    double yp = c.y(predicted[static_cast<std::size_t>(i)], ymax);
    double yg = c.y(ground_truth[static_cast<std::size_t>(i)], ymax);
    s += "<rect x=\"" + detail::num(xp0) + "\" y=\"" + detail::num(yp) + "\" width=\"" +
         detail::num(xp1 - xp0) + "\" height=\"" + detail::num(y0 - yp) +
         "\" fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n";
    s += "<rect x=\"" + detail::num(xg0) + "\" y=\"" + detail::num(yg) + "\" width=\"" +
         detail::num(xg1 - xg0) + "\" height=\"" + detail::num(y0 - yg) +
         "\" fill=\"#fdae6b\" stroke=\"#e6550d\"/>\n";
  }
  s += "<rect x=\"" + detail::num(c.width - 220) + "\" y=\"30\" width=\"12\" height=\"12\" fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n";
  s += "<text x=\"" + detail::num(c.width - 204) + "\" y=\"40\" font-family=\"sans-serif\" font-size=\"11\">forecast</text>\n";
  s += "<rect x=\"" + detail::num(c.width - 130) + "\" y=\"30\" width=\"12\" height=\"12\" fill=\"#fdae6b\" stroke=\"#e6550d\"/>\n";
  s += "<text x=\"" + detail::num(c.width - 114) + "\" y=\"40\" font-family=\"sans-serif\" font-size=\"11\">ground truth</text>\n";
  return s + "</svg>\n";
}

}  // namespace fddt::svg
