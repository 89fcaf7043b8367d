#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fddt/margins.hpp"

using namespace fddt;

namespace {

TimeWindow commuter_window() {
  return TimeWindow(TimeOfDay::from_hms(6, 0, 0), TimeOfDay::from_hms(9, 0, 0));
}

MarginForecast margins_for(std::vector<double> means, double k) {
  auto grid = BinGrid(commuter_window(), static_cast<int>(means.size()));
  return compute_margins(BinStats{grid, std::move(means), 1}, k);
}

// single-session dataset with one record every `spacing` seconds
Dataset evenly_spaced(const TimeWindow& w, int spacing) {
  std::vector<DepartureRecord> records;
  int v = 0;
  for (int s = w.start.seconds(); s < w.end.seconds(); s += spacing)
    records.push_back({"v" + std::to_string(v++), "s0", TimeOfDay(s)});
  return Dataset(std::move(records));
}

}  // namespace

TEST_CASE("compute_margins applies the k*sqrt(m) spread with a zero clamp") {
  auto f = margins_for({4.0, 0.0, 9.0, 1.0}, 2.0);
  CHECK(f.bins[0].lower == 0.0);
  CHECK(f.bins[0].upper == 8.0);
  CHECK(f.bins[1].lower == 0.0);
  CHECK(f.bins[1].upper == 0.0);
  CHECK(f.bins[2].lower == 3.0);
  CHECK(f.bins[2].upper == 15.0);
  CHECK(f.bins[3].lower == 0.0);  // clamped from -1
  CHECK(f.bins[3].upper == 3.0);
  CHECK(f.confidence_level == Catch::Approx(0.9545).margin(5e-5));
}

TEST_CASE("compute_margins keeps lower <= mean <= upper with lower >= 0") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> mean(0.0, 40.0);
  std::vector<double> means(18);
  for (auto& m : means) m = mean(rng);
  const double k = 2.0;
  auto f = margins_for(means, k);
  for (const auto& b : f.bins) {
    CHECK(b.lower >= 0.0);
    CHECK(b.lower <= b.mean);
    CHECK(b.mean <= b.upper);
    // spread above is always k*sqrt(m); below it clamps at zero
    CHECK(b.upper - b.mean == Catch::Approx(k * std::sqrt(b.mean)).margin(1e-12));
    CHECK(b.mean - b.lower ==
          Catch::Approx(std::min(k * std::sqrt(b.mean), b.mean)).margin(1e-12));
  }
}

TEST_CASE("compute_margins with k=0 collapses to the mean") {
  auto f = margins_for({4.0, 0.5, 12.0}, 0.0);
  for (const auto& b : f.bins) {
    CHECK(b.lower == b.mean);
    CHECK(b.upper == b.mean);
  }
  CHECK(f.confidence_level == 0.0);
}

TEST_CASE("margin half-width grows linearly in k") {
  for (double m : {1.0, 4.0, 25.0}) {
    double w1 = margins_for({m}, 1.0).bins[0].upper - m;
    double w2 = margins_for({m}, 2.0).bins[0].upper - m;
    double w3 = margins_for({m}, 3.0).bins[0].upper - m;
    CHECK(w2 == Catch::Approx(2.0 * w1).epsilon(1e-12));
    CHECK(w3 == Catch::Approx(3.0 * w1).epsilon(1e-12));
  }
}

TEST_CASE("two-sigma margins cover Poisson draws at the promised rate") {
  const double lambda = 25.0;
  auto f = margins_for({lambda}, 2.0);
  std::mt19937 rng(314159);
  std::poisson_distribution<int> draw(lambda);
  int inside = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    int x = draw(rng);
    if (x >= f.bins[0].lower && x <= f.bins[0].upper) ++inside;
  }
  CHECK(static_cast<double>(inside) / trials >= 0.93);
}

TEST_CASE("scale_granularity boundary case: one record, one bin, epsilon 1") {
  Dataset d({{"v0", "s0", TimeOfDay::parse("07:00:00")}});
  auto r = scale_granularity(d, commuter_window(), 1.0, GranularityRule::paper_literal, 1, 1);
  CHECK(r.chosen_b == 1);
  CHECK(r.stats.means == std::vector<double>{1.0});
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].satisfied);
}

TEST_CASE("paper-literal rule stops where a bin first empties") {
  // 2.6 h window divides into both 12 and 13 bins; one record per 780 s
  // fills every 12-bin but leaves the last 13-bin empty.
  TimeWindow w(TimeOfDay::parse("06:00:00"), TimeOfDay::parse("08:36:00"));
  REQUIRE(w.length_seconds() == 9360);
  auto d = evenly_spaced(w, 780);
  REQUIRE(d.size() == 12);

  auto r = scale_granularity(d, w, 0.05, GranularityRule::paper_literal, 1, 13);
  CHECK(r.chosen_b == 12);

  // independent enumeration oracle over the same candidates
  int best = 0;
  for (int b = 1; b <= 13; ++b) {
    if (9360 % b != 0) continue;
    std::vector<int> counts(static_cast<std::size_t>(b), 0);
    for (const auto& rec : d.records())
      ++counts[static_cast<std::size_t>((rec.departure.seconds() - w.start.seconds()) /
                                        (9360 / b))];
    int m_min = counts[0];
    for (int c : counts) m_min = std::min(m_min, c);
    if (m_min > 0 && 0.05 <= std::sqrt(static_cast<double>(m_min))) best = b;
  }
  CHECK(best == 12);
  CHECK(r.chosen_b == best);

  // 13 was evaluated, not skipped, and failed on the empty bin
  REQUIRE(r.trace.back().b == 13);
  CHECK_FALSE(r.trace.back().skipped);
  CHECK(r.trace.back().m_min == 0.0);
  CHECK_FALSE(r.trace.back().satisfied);
  // 7 and 11 cannot produce whole-second bins
  for (const auto& e : r.trace) CHECK(e.skipped == (e.b == 7 || e.b == 11));
}

TEST_CASE("the two rules pick different granularities on the same data") {
  auto d = evenly_spaced(commuter_window(), 225);  // 48 records, 1 per 225 s
  // paper-literal epsilon 1: any all-nonempty binning passes, so b_max wins
  auto lit = scale_granularity(d, commuter_window(), 1.0, GranularityRule::paper_literal, 1, 48);
  CHECK(lit.chosen_b == 48);
  // relative error 0.5 requires every bin mean >= 4, satisfied last at b=12
  auto rel = scale_granularity(d, commuter_window(), 0.5, GranularityRule::relative_error, 1, 48);
  CHECK(rel.chosen_b == 12);
  CHECK(rel.stats.means == std::vector<double>(12, 4.0));

  // on this evenly split data the relative rule never re-satisfies after its
  // first violation
  bool violated = false;
  for (const auto& e : rel.trace) {
    if (e.skipped) continue;
    if (!e.satisfied) violated = true;
    if (violated) CHECK_FALSE(e.satisfied);
  }
}

TEST_CASE("scale_granularity reports failure with the full trace") {
  auto d = evenly_spaced(commuter_window(), 450);  // 2 records per 900 s bin
  try {
    scale_granularity(d, commuter_window(), 0.1, GranularityRule::relative_error, 10, 14);
    FAIL("expected granularity_error");
  } catch (const granularity_error& e) {
    REQUIRE(e.trace().size() == 5);
    for (const auto& t : e.trace()) CHECK_FALSE(t.satisfied);
    CHECK(e.trace()[1].skipped);  // b=11
    CHECK(e.trace()[3].skipped);  // b=13
  }
}

TEST_CASE("scale_granularity validates its arguments") {
  Dataset d({{"v0", "s0", TimeOfDay::parse("07:00:00")}});
  CHECK_THROWS_AS(
      scale_granularity(d, commuter_window(), 0.0, GranularityRule::paper_literal, 1, 4),
      std::invalid_argument);
  CHECK_THROWS_AS(
      scale_granularity(d, commuter_window(), 1.5, GranularityRule::paper_literal, 1, 4),
      std::invalid_argument);
  CHECK_THROWS_AS(
      scale_granularity(d, commuter_window(), 0.5, GranularityRule::paper_literal, 5, 4),
      std::invalid_argument);
}
