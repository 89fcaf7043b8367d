#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fddt/time.hpp"

namespace fddt {

struct GmmComponent {
  double weight;
  double mean;      // seconds since midnight
  double variance;  // seconds^2

  bool operator==(const GmmComponent&) const = default;
};

/// One-dimensional Gaussian mixture over departure times.
struct GmmModel {
  std::vector<GmmComponent> components;
  double log_likelihood = 0.0;
  int iterations_used = 0;  // number of parameter updates performed
  bool converged = false;
  std::vector<double> loglik_trace;  // log-likelihood after init and each update

  void validate() const {
    if (components.empty()) throw std::invalid_argument("mixture needs at least one component");
    double weight_sum = 0.0;
    for (const auto& c : components) {
      if (!(c.weight >= 0.0)) throw std::invalid_argument("negative component weight");
      if (!(c.variance > 0.0)) throw std::invalid_argument("non-positive component variance");
      weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9)
      throw std::invalid_argument("component weights sum to " + std::to_string(weight_sum) +
                                  ", expected 1");
  }
};

enum class InitStrategy { evenly_spaced, seeded_random };

inline const char* to_string(InitStrategy s) {
  return s == InitStrategy::evenly_spaced ? "even" : "random";
}

struct EmConfig {
  int component_count = 1;
  int max_iterations = 500;
  double rel_loglik_tolerance = 1e-8;
  double variance_floor = 1.0;  // seconds^2; keeps duplicated timestamps from collapsing a component
  InitStrategy init_strategy = InitStrategy::evenly_spaced;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (component_count < 1) throw std::invalid_argument("component_count must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(rel_loglik_tolerance > 0)) throw std::invalid_argument("tolerance must be > 0");
    if (!(variance_floor > 0)) throw std::invalid_argument("variance_floor must be > 0");
  }
};

namespace detail {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

inline std::vector<GmmComponent> init_components(const std::vector<double>& times,
                                                 const EmConfig& cfg) {
  const int k = cfg.component_count;
  std::vector<GmmComponent> comps(static_cast<std::size_t>(k));
  const double uniform_weight = 1.0 / k;
  if (cfg.init_strategy == InitStrategy::evenly_spaced) {
    auto [lo_it, hi_it] = std::minmax_element(times.begin(), times.end());
    double lo = *lo_it;
    double span = *hi_it - lo;
    if (span <= 0.0) span = 1.0;
    double slot = span / k;
    for (int i = 0; i < k; ++i)
      comps[static_cast<std::size_t>(i)] = {uniform_weight, lo + (i + 0.5) * slot,
                                            std::max(cfg.variance_floor, slot * slot)};
    return comps;
  }
  // seeded-random: distinct data points as means, pooled variance everywhere
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<std::size_t> idx(times.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> means(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), idx.size() - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[pick(rng)]);
    means[static_cast<std::size_t>(i)] = times[idx[static_cast<std::size_t>(i)]];
  }
  std::sort(means.begin(), means.end());
  double mean = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
  double var = 0.0;
  for (double t : times) var += (t - mean) * (t - mean);
  var = std::max(cfg.variance_floor, var / times.size());
  for (int i = 0; i < k; ++i)
    comps[static_cast<std::size_t>(i)] = {uniform_weight, means[static_cast<std::size_t>(i)], var};
  return comps;
}

}  // namespace detail

/// Fits a K-component mixture by expectation-maximization.
///
/// E-step responsibilities come from log-space densities normalized per point;
/// the M-step re-estimates weights, means, and floored variances from them.
/// The log-likelihood is accumulated with compensated summation so the
/// non-decreasing-per-iteration guarantee survives rounding. Iteration stops
/// when the relative improvement drops below cfg.rel_loglik_tolerance or
/// cfg.max_iterations updates have run. Fully deterministic for a fixed
/// config: all reductions are sequential in input order.
inline GmmModel fit_em(const std::vector<double>& times, const EmConfig& cfg) {
  cfg.validate();
  if (times.empty()) throw std::invalid_argument("cannot fit a mixture to no data");
  const std::size_t n = times.size();
  const std::size_t k = static_cast<std::size_t>(cfg.component_count);
  if (n < k)
    throw std::invalid_argument("need at least as many points as components: " +
                                std::to_string(n) + " < " + std::to_string(k));
  for (double t : times)
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite departure time in input");

  std::vector<GmmComponent> comps = detail::init_components(times, cfg);

  std::vector<double> resp(n * k);
  std::vector<double> log_weight(k), log_norm(k), inv_two_var(k);

  auto e_step = [&]() {
    for (std::size_t c = 0; c < k; ++c) {
      log_weight[c] = comps[c].weight > 0.0 ? std::log(comps[c].weight)
                                            : -std::numeric_limits<double>::infinity();
      log_norm[c] = -0.5 * std::log(2.0 * M_PI * comps[c].variance);
      inv_two_var[c] = 0.5 / comps[c].variance;
    }
    detail::KahanSum ll;
    std::vector<double> lp(k);
    for (std::size_t j = 0; j < n; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double d = times[j] - comps[c].mean;
        lp[c] = log_weight[c] + log_norm[c] - d * d * inv_two_var[c];
        best = std::max(best, lp[c]);
      }
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) sum += std::exp(lp[c] - best);
      double lse = best + std::log(sum);
      for (std::size_t c = 0; c < k; ++c) resp[j * k + c] = std::exp(lp[c] - lse);
      ll.add(lse);
    }
    return ll.sum;
  };

  auto m_step = [&]() {
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0, sum_x = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        nk += resp[j * k + c];
        sum_x += resp[j * k + c] * times[j];
      }
      if (nk <= 1e-300) {  // dead component: freeze it with zero weight
        comps[c].weight = 0.0;
        continue;
      }
      double mu = sum_x / nk;
      double sq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double d = times[j] - mu;
        sq += resp[j * k + c] * d * d;
      }
      comps[c] = {nk / static_cast<double>(n), mu, std::max(cfg.variance_floor, sq / nk)};
    }
  };

  GmmModel model;
  double ll = e_step();
  model.loglik_trace.push_back(ll);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    m_step();
    model.iterations_used = it;
    double ll_new = e_step();
    model.loglik_trace.push_back(ll_new);
    if (std::abs(ll_new - ll) <= cfg.rel_loglik_tolerance * std::max(1.0, std::abs(ll))) {
      model.converged = true;
      ll = ll_new;
      break;
    }
    ll = ll_new;
  }
  model.log_likelihood = ll;
  model.components = std::move(comps);
  return model;
}

/// Mixture density at time t (seconds).
inline double density(const GmmModel& model, double t) {
  double sum = 0.0;
  for (const auto& c : model.components) {
    double d = t - c.mean;
    sum += c.weight * std::exp(-d * d / (2.0 * c.variance)) / std::sqrt(2.0 * M_PI * c.variance);
  }
  return sum;
}

/// Posterior component memberships p(component | t); sums to 1.
inline std::vector<double> responsibilities(const GmmModel& model, double t) {
  const std::size_t k = model.components.size();
  std::vector<double> lp(k);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const auto& comp = model.components[c];
    double d = t - comp.mean;
    lp[c] = (comp.weight > 0.0 ? std::log(comp.weight)
                               : -std::numeric_limits<double>::infinity()) -
            0.5 * std::log(2.0 * M_PI * comp.variance) - d * d / (2.0 * comp.variance);
    best = std::max(best, lp[c]);
  }
  double sum = 0.0;
  for (double v : lp) sum += std::exp(v - best);
  double lse = best + std::log(sum);
  std::vector<double> r(k);
  for (std::size_t c = 0; c < k; ++c) r[c] = std::exp(lp[c] - lse);
  return r;
}

namespace detail {

inline double normal_cdf(double x, double mean, double stddev) {
  return 0.5 * std::erfc((mean - x) / (stddev * std::sqrt(2.0)));
}

}  // namespace detail

/// Probability mass the mixture assigns to each bin, integrated over the bin
/// bounds and renormalized to the window so the vector sums to 1.
inline std::vector<double> bin_mass(const GmmModel& model, const BinGrid& grid) {
  model.validate();
  std::vector<double> mass(static_cast<std::size_t>(grid.bin_count), 0.0);
  for (int i = 0; i < grid.bin_count; ++i) {
    double lo = grid.bin_start(i).seconds();
    double hi = lo + grid.width_seconds();
    double m = 0.0;
    for (const auto& c : model.components) {
      double sd = std::sqrt(c.variance);
      m += c.weight * (detail::normal_cdf(hi, c.mean, sd) - detail::normal_cdf(lo, c.mean, sd));
    }
    mass[static_cast<std::size_t>(i)] = m;
  }
  double total = 0.0;
  for (double m : mass) total += m;
  if (total < 1e-12) throw std::runtime_error("mixture mass outside window");
  for (double& m : mass) m /= total;
  return mass;
}

}  // namespace fddt
