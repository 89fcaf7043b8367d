#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fddt/dataset.hpp"
#include "fddt/time.hpp"

namespace fddt {

/// Per-session departure counts over a bin grid. Row j holds the counts of
/// session j across the grid's bins; row sums equal that session's in-window
/// record count.
struct CountMatrix {
  BinGrid grid;
  std::vector<std::string> session_ids;
  std::vector<std::vector<std::uint32_t>> counts;  // [session][bin]

  std::size_t session_count() const { return session_ids.size(); }

  bool operator==(const CountMatrix&) const = default;
};

/// Column averages of a count matrix: the expected departures per bin.
struct BinStats {
  BinGrid grid;
  std::vector<double> means;  // one per bin
  std::size_t total_sessions;

  bool operator==(const BinStats&) const = default;
};

/// Buckets every record of d into its session row and bin column.
/// All records must lie inside the grid window; trim first.
inline CountMatrix divide_in_intervals(const Dataset& d, const BinGrid& grid) {
  std::unordered_map<std::string, std::size_t> row_of;
  row_of.reserve(d.sessions().size());
  for (std::size_t j = 0; j < d.sessions().size(); ++j) row_of.emplace(d.sessions()[j], j);

  std::vector<std::vector<std::uint32_t>> counts(
      d.sessions().size(), std::vector<std::uint32_t>(static_cast<std::size_t>(grid.bin_count), 0));
  for (const auto& r : d.records()) {
    auto bin = bin_index(grid, r.departure);
    if (!bin)
      throw std::invalid_argument("record outside window: vehicle \"" + r.vehicle_id +
                                  "\" session \"" + r.session_id + "\" at " +
                                  r.departure.to_string());
    ++counts[row_of.at(r.session_id)][static_cast<std::size_t>(*bin)];
  }
  return CountMatrix{grid, d.sessions(), std::move(counts)};
}

/// Averages the matrix columns: means[i] = (1/n) * sum_j counts[j][i].
/// Each mean is a single integer sum divided once by n, so results are
/// reproducible against any recount oracle bit for bit.
inline BinStats impose_and_avg(const CountMatrix& k) {
  const std::size_t n = k.session_count();
  if (n == 0) throw std::invalid_argument("no sampling sessions");
  std::vector<double> means(static_cast<std::size_t>(k.grid.bin_count), 0.0);
  for (std::size_t i = 0; i < means.size(); ++i) {
    std::uint64_t column = 0;
    for (std::size_t j = 0; j < n; ++j) column += k.counts[j][i];
    means[i] = static_cast<double>(column) / static_cast<double>(n);
  }
  return BinStats{k.grid, std::move(means), n};
}

/// Scales bin means to fractions summing to 1 (the share of departures per
/// bin). Raw means stay available for margin computation, which needs counts.
inline std::vector<double> normalize(const BinStats& stats) {
  double total = 0.0;
  for (double m : stats.means) total += m;
  if (total <= 0.0) throw std::invalid_argument("empty window: all bin means are zero");
  std::vector<double> fractions(stats.means.size());
  for (std::size_t i = 0; i < fractions.size(); ++i) fractions[i] = stats.means[i] / total;
  return fractions;
}

}  // namespace fddt
