#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fddt/binning.hpp"
#include "fddt/evaluation.hpp"
#include "fddt/gmm.hpp"
#include "fddt/margins.hpp"
#include "fddt/time.hpp"

namespace fddt::jsonio {

using json = nlohmann::ordered_json;

// Artifacts carry a "type" tag so downstream commands can dispatch on it.
inline constexpr const char* margin_forecast_type = "margin_forecast";
inline constexpr const char* granularity_type = "granularity_result";
inline constexpr const char* gmm_fit_type = "gmm_fit";
inline constexpr const char* evaluation_type = "evaluation_report";

inline json to_json(const TimeWindow& w) {
  return json{{"start", w.start.to_string()}, {"end", w.end.to_string()}};
}

inline TimeWindow time_window_from_json(const json& j) {
  return TimeWindow(TimeOfDay::parse(j.at("start").get<std::string>()),
                    TimeOfDay::parse(j.at("end").get<std::string>()));
}

inline json to_json(const BinGrid& g) {
  return json{{"window", to_json(g.window)}, {"bin_count", g.bin_count}};
}

inline BinGrid bin_grid_from_json(const json& j) {
  return BinGrid(time_window_from_json(j.at("window")), j.at("bin_count").get<int>());
}

inline json to_json(const CountMatrix& k) {
  return json{{"grid", to_json(k.grid)}, {"session_ids", k.session_ids}, {"counts", k.counts}};
}

inline CountMatrix count_matrix_from_json(const json& j) {
  return CountMatrix{bin_grid_from_json(j.at("grid")),
                     j.at("session_ids").get<std::vector<std::string>>(),
                     j.at("counts").get<std::vector<std::vector<std::uint32_t>>>()};
}

inline json to_json(const BinStats& s) {
  return json{{"grid", to_json(s.grid)}, {"means", s.means}, {"total_sessions", s.total_sessions}};
}

inline BinStats bin_stats_from_json(const json& j) {
  return BinStats{bin_grid_from_json(j.at("grid")), j.at("means").get<std::vector<double>>(),
                  j.at("total_sessions").get<std::size_t>()};
}

inline json to_json(const MarginForecast& f) {
  json bins = json::array();
  for (int i = 0; i < f.grid.bin_count; ++i) {
    const auto& b = f.bins[static_cast<std::size_t>(i)];
    bins.push_back(json{{"label", bin_label(f.grid, i)},
                        {"mean", b.mean},
                        {"lower", b.lower},
                        {"upper", b.upper}});
  }
  return json{{"type", margin_forecast_type},
              {"grid", to_json(f.grid)},
              {"k", f.k},
              {"confidence_level", f.confidence_level},
              {"bins", std::move(bins)}};
}

inline MarginForecast margin_forecast_from_json(const json& j) {
  BinGrid grid = bin_grid_from_json(j.at("grid"));
  std::vector<MarginBin> bins;
  for (const auto& b : j.at("bins"))
    bins.push_back(
        {b.at("mean").get<double>(), b.at("lower").get<double>(), b.at("upper").get<double>()});
  if (bins.size() != static_cast<std::size_t>(grid.bin_count))
    throw std::invalid_argument("margin forecast bin list does not match grid");
  return MarginForecast{grid, std::move(bins), j.at("k").get<double>(),
                        j.at("confidence_level").get<double>()};
}

inline json to_json(const GranularityResult& r) {
  json trace = json::array();
  for (const auto& e : r.trace) {
    json entry{{"b", e.b}};
    if (e.skipped)
      entry["m_min"] = nullptr;
    else
      entry["m_min"] = e.m_min;
    entry["satisfied"] = e.satisfied;
    entry["skipped"] = e.skipped;
    trace.push_back(std::move(entry));
  }
  return json{{"type", granularity_type}, {"window", to_json(r.stats.grid.window)},
              {"epsilon", r.epsilon},     {"rule", to_string(r.rule)},
              {"chosen_b", r.chosen_b},   {"stats", to_json(r.stats)},
              {"trace", std::move(trace)}};
}

inline json to_json(const GmmModel& m) {
  json comps = json::array();
  for (const auto& c : m.components)
    comps.push_back(json{{"weight", c.weight}, {"mean_seconds", c.mean}, {"variance", c.variance}});
  return json{{"components", std::move(comps)},
              {"log_likelihood", m.log_likelihood},
              {"iterations_used", m.iterations_used},
              {"converged", m.converged}};
}

inline GmmModel gmm_model_from_json(const json& j) {
  GmmModel m;
  for (const auto& c : j.at("components"))
    m.components.push_back({c.at("weight").get<double>(), c.at("mean_seconds").get<double>(),
                            c.at("variance").get<double>()});
  m.log_likelihood = j.at("log_likelihood").get<double>();
  m.iterations_used = j.at("iterations_used").get<int>();
  m.converged = j.at("converged").get<bool>();
  m.validate();
  return m;
}

inline json gmm_fit_to_json(const GmmModel& model, const BinGrid& grid,
                            const std::vector<double>& mass) {
  return json{{"type", gmm_fit_type},
              {"grid", to_json(grid)},
              {"model", to_json(model)},
              {"bin_mass", mass}};
}

inline json to_json(const EvaluationReport& r, const std::vector<double>* ground_truth = nullptr) {
  json j{{"type", evaluation_type},
         {"label", r.label},
         {"grid", to_json(r.grid)},
         {"values", r.input_values},
         {"erf_values", r.erf_values},
         {"average_erf", r.average_erf},
         {"normalized_score", r.normalized_score}};
  if (ground_truth) j["ground_truth"] = *ground_truth;
  return j;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace fddt::jsonio
