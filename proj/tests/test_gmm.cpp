#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fddt/dataset.hpp"
#include "fddt/gmm.hpp"

using namespace fddt;

namespace {

std::vector<double> two_cluster_sample(std::uint64_t seed, double mean_a, double mean_b,
                                       double stddev, int per_cluster) {
  detail::NormalSampler normal(seed);
  std::vector<double> times;
  times.reserve(2 * static_cast<std::size_t>(per_cluster));
  for (int i = 0; i < per_cluster; ++i) times.push_back(normal(mean_a, stddev));
  for (int i = 0; i < per_cluster; ++i) times.push_back(normal(mean_b, stddev));
  return times;
}

std::vector<GmmComponent> by_mean(const GmmModel& m) {
  auto comps = m.components;
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.mean < b.mean; });
  return comps;
}

}  // namespace

TEST_CASE("fit_em with one component recovers mean and population variance") {
  std::vector<double> times{25200, 25800, 26400, 27000, 30000};
  EmConfig cfg;
  cfg.component_count = 1;
  auto model = fit_em(times, cfg);
  REQUIRE(model.components.size() == 1);
  double mean = 0.0;
  for (double t : times) mean += t;
  mean /= times.size();
  double var = 0.0;
  for (double t : times) var += (t - mean) * (t - mean);
  var /= times.size();
  CHECK(model.components[0].weight == 1.0);
  CHECK(model.components[0].mean == Catch::Approx(mean).epsilon(1e-12));
  CHECK(model.components[0].variance == Catch::Approx(var).epsilon(1e-12));
  CHECK(model.converged);
}

TEST_CASE("fit_em separates two well-spaced clusters") {
  auto times = two_cluster_sample(99, 25200.0, 30600.0, 300.0, 500);  // 7:00 and 8:30
  EmConfig cfg;
  cfg.component_count = 2;
  auto model = fit_em(times, cfg);
  auto comps = by_mean(model);
  CHECK(std::abs(comps[0].mean - 25200.0) < 60.0);
  CHECK(std::abs(comps[1].mean - 30600.0) < 60.0);
  CHECK(std::abs(comps[0].weight - 0.5) < 0.05);
  CHECK(std::abs(comps[1].weight - 0.5) < 0.05);
}

TEST_CASE("fit_em is deterministic for a fixed config") {
  auto times = two_cluster_sample(7, 25200.0, 30600.0, 450.0, 200);
  EmConfig cfg;
  cfg.component_count = 3;
  cfg.init_strategy = InitStrategy::seeded_random;
  cfg.rng_seed = 17;
  auto a = fit_em(times, cfg);
  auto b = fit_em(times, cfg);
  REQUIRE(a.components.size() == b.components.size());
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    CHECK(a.components[i].weight == b.components[i].weight);
    CHECK(a.components[i].mean == b.components[i].mean);
    CHECK(a.components[i].variance == b.components[i].variance);
  }
  CHECK(a.log_likelihood == b.log_likelihood);
  CHECK(a.iterations_used == b.iterations_used);
}

TEST_CASE("fit_em validates its input") {
  EmConfig cfg;
  cfg.component_count = 3;
  CHECK_THROWS_AS(fit_em({}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(fit_em({25200.0, 25300.0}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(fit_em({25200.0, std::nan(""), 26000.0}, cfg), std::invalid_argument);
  EmConfig bad;
  bad.component_count = 0;
  CHECK_THROWS_AS(fit_em({25200.0}, bad), std::invalid_argument);
}

TEST_CASE("log-likelihood never decreases across EM iterations") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> second(21600.0, 32400.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> times(300);
    for (auto& t : times) t = std::floor(second(rng));
    EmConfig cfg;
    cfg.component_count = 4;
    cfg.init_strategy = trial % 2 == 0 ? InitStrategy::evenly_spaced
                                       : InitStrategy::seeded_random;
    cfg.rng_seed = static_cast<std::uint64_t>(trial);
    auto model = fit_em(times, cfg);
    REQUIRE(model.loglik_trace.size() >= 2);
    for (std::size_t i = 1; i < model.loglik_trace.size(); ++i)
      CHECK(model.loglik_trace[i] >=
            model.loglik_trace[i - 1] - 1e-9 * std::max(1.0, std::abs(model.loglik_trace[i - 1])));
  }
}

TEST_CASE("weights stay a distribution and variances stay floored") {
  std::vector<double> times(200, 25200.0);
  for (int i = 0; i < 200; ++i) times.push_back(30600.0);
  EmConfig cfg;
  cfg.component_count = 2;
  auto model = fit_em(times, cfg);
  double sum = 0.0;
  for (const auto& c : model.components) {
    sum += c.weight;
    CHECK(c.variance >= cfg.variance_floor);
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
  // duplicated timestamps collapse onto the atoms, held apart from singularity
  auto comps = by_mean(model);
  CHECK(comps[0].mean == Catch::Approx(25200.0).margin(1e-6));
  CHECK(comps[1].mean == Catch::Approx(30600.0).margin(1e-6));
  CHECK(comps[0].variance == cfg.variance_floor);
}

TEST_CASE("shifting all times shifts the fit with it") {
  auto times = two_cluster_sample(21, 25200.0, 28800.0, 400.0, 250);
  std::vector<double> shifted = times;
  for (auto& t : shifted) t += 3600.0;
  EmConfig cfg;
  cfg.component_count = 2;
  auto a = fit_em(times, cfg);
  auto b = fit_em(shifted, cfg);
  auto ca = by_mean(a), cb = by_mean(b);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(cb[i].mean == Catch::Approx(ca[i].mean + 3600.0).margin(1e-6));
    CHECK(cb[i].weight == Catch::Approx(ca[i].weight).margin(1e-8));
    CHECK(cb[i].variance == Catch::Approx(ca[i].variance).epsilon(1e-6));
  }
  CHECK(b.log_likelihood == Catch::Approx(a.log_likelihood).epsilon(1e-7));
}

TEST_CASE("density evaluates the weighted normal sum") {
  GmmModel standard;
  standard.components = {{1.0, 0.0, 1.0}};
  CHECK(density(standard, 0.0) == Catch::Approx(0.3989422804014327).epsilon(1e-12));

  GmmModel m;
  m.components = {{0.5, 25200.0, 90000.0}, {0.5, 30600.0, 250000.0}};
  for (double a : {100.0, 500.0, 1200.0})
    CHECK(density(m, 25200.0 + a) + density(m, 30600.0 + a) ==
          Catch::Approx(density(m, 25200.0 - a) + density(m, 30600.0 - a)).epsilon(1e-12));
}

TEST_CASE("responsibilities sum to one and follow the density ratios") {
  GmmModel m;
  m.components = {{0.2, 24000.0, 40000.0}, {0.5, 27000.0, 160000.0}, {0.3, 31000.0, 90000.0}};
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> t(20000.0, 34000.0);
  for (int i = 0; i < 50; ++i) {
    double x = t(rng);
    auto r = responsibilities(m, x);
    double sum = 0.0;
    for (double v : r) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    // each responsibility is that component's share of the total density
    for (std::size_t c = 0; c < 3; ++c) {
      GmmModel solo;
      solo.components = {m.components[c]};
      CHECK(r[c] == Catch::Approx(density(solo, x) / density(m, x)).margin(1e-9));
    }
  }
}

TEST_CASE("density matches an independently coded oracle") {
  GmmModel m;
  m.components = {{0.2, 24000.0, 40000.0}, {0.5, 27000.0, 160000.0}, {0.3, 31000.0, 90000.0}};
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> t(20000.0, 34000.0);
  for (int i = 0; i < 50; ++i) {
    double x = t(rng);
    double expected = 0.0;
    for (const auto& c : m.components)
      expected += c.weight * std::exp(-(x - c.mean) * (x - c.mean) / (2.0 * c.variance)) /
                  std::sqrt(2.0 * M_PI * c.variance);
    CHECK(density(m, x) == Catch::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("density integrates to one") {
  GmmModel m;
  m.components = {{0.4, 25200.0, 90000.0}, {0.6, 30600.0, 490000.0}};
  // Simpson over a span covering every component's mean +- 10 sigma
  double lo = 25200.0 - 10.0 * 700.0, hi = 30600.0 + 10.0 * 700.0;
  const int steps = 20000;  // even
  double h = (hi - lo) / steps;
  double integral = density(m, lo) + density(m, hi);
  for (int i = 1; i < steps; ++i) integral += density(m, lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  integral *= h / 3.0;
  CHECK(integral == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("bin_mass integrates bins, renormalized over the window") {
  TimeWindow w(TimeOfDay::parse("06:00:00"), TimeOfDay::parse("09:00:00"));
  BinGrid grid(w, 12);

  SECTION("window-centered component gives a symmetric vector") {
    GmmModel m;
    m.components = {{1.0, (21600.0 + 32400.0) / 2.0, 640000.0}};
    auto mass = bin_mass(m, grid);
    for (std::size_t i = 0; i < 6; ++i)
      CHECK(mass[i] == Catch::Approx(mass[11 - i]).margin(1e-12));
  }

  SECTION("vector sums to one") {
    GmmModel m;
    m.components = {{0.3, 24000.0, 250000.0}, {0.7, 30000.0, 360000.0}};
    auto mass = bin_mass(m, grid);
    double sum = 0.0;
    for (double v : mass) sum += v;
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
  }

  SECTION("mixture far outside the window is an error") {
    GmmModel m;
    m.components = {{1.0, 3600.0, 100.0}};  // 1:00 am, sigma 10 s
    CHECK_THROWS_WITH(bin_mass(m, grid),
                      Catch::Matchers::ContainsSubstring("mixture mass outside window"));
  }

  SECTION("invalid models are rejected") {
    GmmModel m;
    m.components = {{0.5, 25200.0, 10000.0}};  // weights sum to 0.5
    CHECK_THROWS_AS(bin_mass(m, grid), std::invalid_argument);
  }
}
