#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fddt/binning.hpp"
#include "fddt/dataset.hpp"
#include "fddt/time.hpp"

namespace fddt {

struct MarginBin {
  double mean;
  double lower;
  double upper;

  bool operator==(const MarginBin&) const = default;
};

/// Per-bin departure-count forecast with k-sigma style confidence margins:
/// [max(0, m - k*sqrt(m)), m + k*sqrt(m)] around each bin mean m.
struct MarginForecast {
  BinGrid grid;
  std::vector<MarginBin> bins;
  double k;
  double confidence_level;  // exact two-sided normal coverage of +-k sigma

  bool operator==(const MarginForecast&) const = default;
};

/// Margins around every bin mean. The sqrt(m) spread treats each bin count as
/// Poisson with rate m, whose normal approximation has sigma = sqrt(m).
/// Lower bounds clamp at zero; counts cannot be negative.
inline MarginForecast compute_margins(const BinStats& stats, double k) {
  if (!(k >= 0.0) || !std::isfinite(k))
    throw std::invalid_argument("confidence multiplier k must be finite and >= 0");
  std::vector<MarginBin> bins;
  bins.reserve(stats.means.size());
  for (double m : stats.means) {
    double half_width = k * std::sqrt(m);
    bins.push_back({m, std::max(0.0, m - half_width), m + half_width});
  }
  double confidence = std::erf(k / std::sqrt(2.0));
  return MarginForecast{stats.grid, std::move(bins), k, confidence};
}

/// Which reading of the granularity constraint to apply.
///   paper_literal:  epsilon <= m_min / sqrt(m_min), i.e. epsilon <= sqrt(m_min)
///   relative_error: sqrt(m_min) / m_min <= epsilon, i.e. m_min >= 1 / epsilon^2
/// The first keeps the published inequality as printed; the second bounds the
/// relative half-width of the sqrt(m) margin, which is what makes the
/// constraint bite as an error bound. Empty bins fail both.
enum class GranularityRule { paper_literal, relative_error };

inline const char* to_string(GranularityRule rule) {
  return rule == GranularityRule::paper_literal ? "paper" : "relative";
}

struct GranularityTraceEntry {
  int b;
  double m_min;     // NaN when the candidate was skipped
  bool satisfied;
  bool skipped;     // window length not divisible into b whole-second bins
};

/// Outcome of the granularity scan: the largest feasible bin count plus the
/// per-candidate evaluation trail.
struct GranularityResult {
  int chosen_b;
  BinStats stats;  // at chosen_b
  double epsilon;
  GranularityRule rule;
  std::vector<GranularityTraceEntry> trace;
};

/// No candidate bin count satisfied the constraint; carries the full trace.
class granularity_error : public std::runtime_error {
public:
  granularity_error(std::string msg, std::vector<GranularityTraceEntry> trace)
      : std::runtime_error(std::move(msg)), trace_(std::move(trace)) {}

  const std::vector<GranularityTraceEntry>& trace() const { return trace_; }

private:
  std::vector<GranularityTraceEntry> trace_;
};

inline bool granularity_constraint_satisfied(GranularityRule rule, double m_min, double epsilon) {
  if (!(m_min > 0.0)) return false;
  if (rule == GranularityRule::paper_literal) return epsilon <= std::sqrt(m_min);
  return std::sqrt(m_min) / m_min <= epsilon;
}

/// Scans b = b_min..b_max over the trimmed dataset and keeps the largest b
/// whose minimum bin mean still satisfies the rule at the requested epsilon.
/// Candidates whose bin width would not be a whole number of seconds are
/// skipped and recorded in the trace.
inline GranularityResult scale_granularity(const Dataset& d, const TimeWindow& window,
                                           double epsilon, GranularityRule rule, int b_min,
                                           int b_max) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must be in (0, 1], got " + std::to_string(epsilon));
  if (b_min < 1 || b_min > b_max)
    throw std::invalid_argument("need 1 <= b_min <= b_max, got b_min=" + std::to_string(b_min) +
                                " b_max=" + std::to_string(b_max));

  const Dataset trimmed = trim_range(d, window);
  std::vector<GranularityTraceEntry> trace;
  trace.reserve(static_cast<std::size_t>(b_max - b_min + 1));
  int chosen_b = 0;
  BinStats chosen_stats{BinGrid(window, 1), {}, 0};
  bool have_choice = false;

  for (int b = b_min; b <= b_max; ++b) {
    if (window.length_seconds() % b != 0) {
      trace.push_back({b, std::numeric_limits<double>::quiet_NaN(), false, true});
      continue;
    }
    BinGrid grid(window, b);
    BinStats stats = impose_and_avg(divide_in_intervals(trimmed, grid));
    double m_min = stats.means.empty() ? 0.0 : stats.means[0];
    for (double m : stats.means) m_min = std::min(m_min, m);
    bool ok = granularity_constraint_satisfied(rule, m_min, epsilon);
    trace.push_back({b, m_min, ok, false});
    if (ok) {
      chosen_b = b;
      chosen_stats = std::move(stats);
      have_choice = true;
    }
  }

  if (!have_choice) {
    std::ostringstream msg;
    msg << "no bin count in [" << b_min << ", " << b_max << "] satisfies the " << to_string(rule)
        << " granularity constraint at epsilon " << epsilon;
    throw granularity_error(msg.str(), std::move(trace));
  }
  return GranularityResult{chosen_b, std::move(chosen_stats), epsilon, rule, std::move(trace)};
}

}  // namespace fddt
