#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fddt/binning.hpp"
#include "fddt/dataset.hpp"
#include "fddt/time.hpp"

namespace fddt {

/// Gauss error function (2/sqrt(pi)) * integral of exp(-t^2) over [0, x].
/// Result stays inside the open interval (-1, 1): where libm correctly
/// rounds to +-1 (|x| above ~5.86) the value is pulled back by one ulp.
inline double erf(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("erf: non-finite input");
  double v = std::erf(x);
  if (v >= 1.0) return std::nextafter(1.0, 0.0);
  if (v <= -1.0) return std::nextafter(-1.0, 0.0);
  return v;
}

/// Dispersion score of a normalized per-bin forecast: erf of every bin value,
/// their average, and the average scaled by the bin count.
struct EvaluationReport {
  BinGrid grid;
  std::vector<double> input_values;
  std::vector<double> erf_values;
  double average_erf;
  double normalized_score;
  std::string label;
};

inline EvaluationReport score(const std::vector<double>& values, const BinGrid& grid,
                              std::string label) {
  const std::size_t b = static_cast<std::size_t>(grid.bin_count);
  if (values.size() != b)
    throw std::invalid_argument("expected " + std::to_string(b) + " bin values, got " +
                                std::to_string(values.size()));
  std::vector<double> erf_values(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    if (!(values[i] >= 0.0))
      throw std::invalid_argument("bin value must be >= 0, got " + std::to_string(values[i]));
    erf_values[i] = erf(values[i]);
    sum += erf_values[i];
  }
  double average = sum / static_cast<double>(b);
  return EvaluationReport{grid,    values, std::move(erf_values), average,
                          average * static_cast<double>(b), std::move(label)};
}

/// Normalized per-bin fractions of a held-out dataset over the grid.
inline std::vector<double> ground_truth_bins(const Dataset& test, const BinGrid& grid) {
  Dataset trimmed = trim_range(test, grid.window);
  if (trimmed.empty())
    throw std::invalid_argument("test set has no records inside the evaluation window");
  return normalize(impose_and_avg(divide_in_intervals(trimmed, grid)));
}

/// Sample Pearson correlation coefficient.
inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("correlation inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("correlation needs at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace fddt
