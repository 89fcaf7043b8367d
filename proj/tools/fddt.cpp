// fddt: departure-time forecasting over a morning commuter window.
//
// Subcommands build batch pipelines that hand off JSON artifacts:
//   generate -> forecast | scale | fit-gmm -> evaluate
// All output is deterministic given flags, input files, and seeds.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fddt/fddt.hpp"

namespace {

using fddt::jsonio::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out << text;
}

fddt::TimeWindow parse_window(const std::string& start, const std::string& end) {
  return fddt::TimeWindow(fddt::TimeOfDay::parse(start), fddt::TimeOfDay::parse(end));
}

fddt::Dataset load_inputs(const std::vector<std::string>& paths) {
  std::vector<fddt::Dataset> parts;
  parts.reserve(paths.size());
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file " + path);
    try {
      parts.push_back(fddt::parse_csv(in));
    } catch (const fddt::parse_error& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
  }
  return parts.size() == 1 ? std::move(parts.front()) : fddt::superimpose(parts);
}

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string margin_table(const fddt::MarginForecast& f) {
  std::ostringstream out;
  out << "interval             mean      lower      upper\n";
  for (int i = 0; i < f.grid.bin_count; ++i) {
    const auto& b = f.bins[static_cast<std::size_t>(i)];
    char line[128];
    std::snprintf(line, sizeof line, "%-18s %8.4f   %8.4f   %8.4f\n",
                  fddt::bin_label(f.grid, i).c_str(), b.mean, b.lower, b.upper);
    out << line;
  }
  out << "k = " << fmt("%.4g", f.k)
      << ", two-sided confidence = " << fmt("%.4f", f.confidence_level * 100.0) << "%\n";
  return out.str();
}

std::string margin_csv(const fddt::MarginForecast& f) {
  std::ostringstream out;
  out << "interval,mean,lower,upper\n";
  for (int i = 0; i < f.grid.bin_count; ++i) {
    const auto& b = f.bins[static_cast<std::size_t>(i)];
    out << fddt::bin_label(f.grid, i) << ',' << fmt("%.10g", b.mean) << ','
        << fmt("%.10g", b.lower) << ',' << fmt("%.10g", b.upper) << '\n';
  }
  return out.str();
}

std::string render_margins(const fddt::MarginForecast& f, const std::string& format,
                           const std::string& title) {
  if (format == "json") return fddt::jsonio::dump(fddt::jsonio::to_json(f));
  if (format == "csv") return margin_csv(f);
  if (format == "svg") return fddt::svg::margin_chart(f, title);
  return margin_table(f);
}

struct ForecastArgs {
  std::vector<std::string> inputs;
  std::string window_start = "06:00:00";
  std::string window_end = "09:00:00";
  int bins = 12;
  double k = 2.0;
  std::string format = "table";
  std::string out;
};

void add_format_option(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table", "svg"}));
}

void run_forecast(const ForecastArgs& a) {
  auto window = parse_window(a.window_start, a.window_end);
  fddt::BinGrid grid(window, a.bins);
  auto data = fddt::trim_range(load_inputs(a.inputs), window);
  auto stats = fddt::impose_and_avg(fddt::divide_in_intervals(data, grid));
  auto forecast = fddt::compute_margins(stats, a.k);
  emit(render_margins(forecast, a.format, "Departure count margins per interval"), a.out);
}

struct ScaleArgs {
  std::vector<std::string> inputs;
  std::string window_start = "06:00:00";
  std::string window_end = "09:00:00";
  double epsilon = 0.0;
  std::string rule = "paper";
  int b_min = 1;
  int b_max = 48;
  double k = 2.0;
  std::string format = "table";
  std::string out;
};

std::string scale_table(const fddt::GranularityResult& r, const fddt::MarginForecast& margins) {
  std::ostringstream out;
  out << "granularity scan: rule=" << to_string(r.rule) << " epsilon=" << fmt("%.6g", r.epsilon)
      << "\n";
  out << "    b      m_min  satisfied\n";
  for (const auto& e : r.trace) {
    char line[96];
    if (e.skipped)
      std::snprintf(line, sizeof line, "%5d          -  skipped (inexact bin width)\n", e.b);
    else
      std::snprintf(line, sizeof line, "%5d   %8.4f  %s\n", e.b, e.m_min,
                    e.satisfied ? "yes" : "no");
    out << line;
  }
  out << "chosen b = " << r.chosen_b << "\n\n";
  out << margin_table(margins);
  return out.str();
}

void run_scale(const ScaleArgs& a) {
  auto window = parse_window(a.window_start, a.window_end);
  auto rule = a.rule == "relative" ? fddt::GranularityRule::relative_error
                                   : fddt::GranularityRule::paper_literal;
  auto data = load_inputs(a.inputs);
  std::optional<fddt::GranularityResult> result;
  try {
    result = fddt::scale_granularity(data, window, a.epsilon, rule, a.b_min, a.b_max);
  } catch (const fddt::granularity_error& e) {
    std::ostringstream msg;
    msg << e.what() << "\ntrace:\n";
    for (const auto& t : e.trace()) {
      msg << "  b=" << t.b;
      if (t.skipped)
        msg << " skipped (inexact bin width)";
      else
        msg << " m_min=" << fmt("%.6g", t.m_min) << (t.satisfied ? " satisfied" : " violated");
      msg << "\n";
    }
    throw std::runtime_error(msg.str());
  }
  auto margins = fddt::compute_margins(result->stats, a.k);

  if (a.format == "json") {
    json j = fddt::jsonio::to_json(*result);
    j["margins"] = fddt::jsonio::to_json(margins);
    emit(fddt::jsonio::dump(j), a.out);
  } else if (a.format == "table") {
    emit(scale_table(*result, margins), a.out);
  } else {
    emit(render_margins(margins, a.format, "Departure count margins per interval"), a.out);
  }
}

struct FitGmmArgs {
  std::vector<std::string> inputs;
  std::string window_start = "06:00:00";
  std::string window_end = "09:00:00";
  int bins = 12;
  int components = 0;  // 0: match the bin count
  std::uint64_t seed = 0;
  int max_iterations = 500;
  double tolerance = 1e-8;
  double variance_floor = 1.0;
  std::string init = "even";
  std::string format = "table";
  std::string out;
};

std::string gmm_table(const fddt::GmmModel& model, const fddt::BinGrid& grid,
                      const std::vector<double>& mass) {
  std::ostringstream out;
  out << "component   weight       mean    stddev(s)\n";
  for (std::size_t c = 0; c < model.components.size(); ++c) {
    const auto& comp = model.components[c];
    int mean_s = static_cast<int>(comp.mean);
    char clock[16];
    std::snprintf(clock, sizeof clock, "%02d:%02d:%02d", mean_s / 3600, mean_s / 60 % 60,
                  mean_s % 60);
    char line[96];
    std::snprintf(line, sizeof line, "%9zu   %6.4f   %s   %9.2f\n", c, comp.weight, clock,
                  std::sqrt(comp.variance));
    out << line;
  }
  out << "log-likelihood = " << fmt("%.6f", model.log_likelihood)
      << ", iterations = " << model.iterations_used
      << ", converged = " << (model.converged ? "yes" : "no") << "\n\n";
  out << "interval             mass\n";
  for (int i = 0; i < grid.bin_count; ++i) {
    char line[64];
    std::snprintf(line, sizeof line, "%-18s %6.4f\n", fddt::bin_label(grid, i).c_str(),
                  mass[static_cast<std::size_t>(i)]);
    out << line;
  }
  return out.str();
}

void run_fit_gmm(const FitGmmArgs& a) {
  auto window = parse_window(a.window_start, a.window_end);
  fddt::BinGrid grid(window, a.bins);
  auto data = fddt::trim_range(load_inputs(a.inputs), window);
  std::vector<double> times;
  times.reserve(data.size());
  for (const auto& r : data.records()) times.push_back(r.departure.seconds());

  fddt::EmConfig cfg;
  cfg.component_count = a.components > 0 ? a.components : a.bins;
  cfg.max_iterations = a.max_iterations;
  cfg.rel_loglik_tolerance = a.tolerance;
  cfg.variance_floor = a.variance_floor;
  cfg.init_strategy = a.init == "random" ? fddt::InitStrategy::seeded_random
                                         : fddt::InitStrategy::evenly_spaced;
  cfg.rng_seed = a.seed;

  auto model = fddt::fit_em(times, cfg);
  auto mass = fddt::bin_mass(model, grid);

  if (a.format == "json")
    emit(fddt::jsonio::dump(fddt::jsonio::gmm_fit_to_json(model, grid, mass)), a.out);
  else if (a.format == "csv") {
    std::ostringstream out;
    out << "interval,mass\n";
    for (int i = 0; i < grid.bin_count; ++i)
      out << fddt::bin_label(grid, i) << ',' << fmt("%.10g", mass[static_cast<std::size_t>(i)])
          << '\n';
    emit(out.str(), a.out);
  } else if (a.format == "svg")
    emit(fddt::svg::bar_chart(grid, mass, "Mixture mass per interval", "fraction of departures"),
         a.out);
  else
    emit(gmm_table(model, grid, mass), a.out);
}

struct EvaluateArgs {
  std::string model_path;
  std::string test_path;
  int bins = 0;  // 0: take the model's grid as-is
  std::string label;
  std::string format = "table";
  std::string out;
};

std::string evaluation_table(const fddt::EvaluationReport& r,
                             const std::vector<double>& ground_truth) {
  std::ostringstream out;
  out << r.label << "\n";
  out << "interval            value   erf value   ground truth\n";
  for (int i = 0; i < r.grid.bin_count; ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "%-18s %6.4f      %6.4f         %6.4f\n",
                  fddt::bin_label(r.grid, i).c_str(), r.input_values[static_cast<std::size_t>(i)],
                  r.erf_values[static_cast<std::size_t>(i)],
                  ground_truth[static_cast<std::size_t>(i)]);
    out << line;
  }
  out << "average erf value                         " << fmt("%.4f", r.average_erf) << "\n";
  out << "normalized score on " << r.grid.bin_count << " bins                " << (r.grid.bin_count < 10 ? " " : "")
      << fmt("%.4f", r.normalized_score) << "\n";
  return out.str();
}

void run_evaluate(const EvaluateArgs& a) {
  json artifact = load_json(a.model_path);
  const std::string type = artifact.value("type", "");

  fddt::BinGrid grid = fddt::jsonio::bin_grid_from_json(artifact.at("grid"));
  std::vector<double> values;
  std::string kind;
  if (type == fddt::jsonio::margin_forecast_type) {
    auto forecast = fddt::jsonio::margin_forecast_from_json(artifact);
    std::vector<double> means;
    means.reserve(forecast.bins.size());
    for (const auto& b : forecast.bins) means.push_back(b.mean);
    values = fddt::normalize(fddt::BinStats{grid, std::move(means), 1});
    kind = "margin forecast";
  } else if (type == fddt::jsonio::gmm_fit_type) {
    values = artifact.at("bin_mass").get<std::vector<double>>();
    fddt::jsonio::gmm_model_from_json(artifact.at("model"));  // structural check
    kind = "gmm";
  } else {
    throw std::runtime_error(a.model_path + ": unsupported model artifact type \"" + type + "\"");
  }
  if (a.bins > 0 && a.bins != grid.bin_count)
    throw std::runtime_error("model grid has " + std::to_string(grid.bin_count) +
                             " bins, requested " + std::to_string(a.bins));

  std::ifstream test_in(a.test_path, std::ios::binary);
  if (!test_in) throw std::runtime_error("cannot open test file " + a.test_path);
  auto test = fddt::parse_csv(test_in);
  auto ground_truth = fddt::ground_truth_bins(test, grid);

  std::string label = a.label.empty() ? kind + " vs " + a.test_path : a.label;
  auto report = fddt::score(values, grid, label);

  if (a.format == "json")
    emit(fddt::jsonio::dump(fddt::jsonio::to_json(report, &ground_truth)), a.out);
  else if (a.format == "csv") {
    std::ostringstream out;
    out << "interval,value,erf_value,ground_truth\n";
    for (int i = 0; i < grid.bin_count; ++i) {
      auto idx = static_cast<std::size_t>(i);
      out << fddt::bin_label(grid, i) << ',' << fmt("%.10g", report.input_values[idx]) << ','
          << fmt("%.10g", report.erf_values[idx]) << ',' << fmt("%.10g", ground_truth[idx])
          << '\n';
    }
    out << "average_erf,,";
    out << fmt("%.10g", report.average_erf) << ",\n";
    out << "normalized_score,,";
    out << fmt("%.10g", report.normalized_score) << ",\n";
    emit(out.str(), a.out);
  } else if (a.format == "svg")
    emit(fddt::svg::comparison_chart(grid, report.input_values, ground_truth,
                                     "Forecast vs held-out departures"),
         a.out);
  else
    emit(evaluation_table(report, ground_truth), a.out);
}

struct GenerateArgs {
  std::string window_start = "06:00:00";
  std::string window_end = "09:00:00";
  std::string mean;
  double stddev = 0.0;
  int sessions = 1;
  int vehicles = 100;
  std::uint64_t seed = 0;
  std::string session_prefix = "s";
  std::string out;
};

void run_generate(const GenerateArgs& a) {
  auto window = parse_window(a.window_start, a.window_end);
  fddt::SyntheticSpec spec{window,     fddt::TimeOfDay::parse(a.mean), a.stddev,
                           a.sessions, a.vehicles,                     a.seed};
  auto data = fddt::generate_synthetic(spec, a.session_prefix);
  std::ostringstream out;
  fddt::write_csv(data, out);
  emit(out.str(), a.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"departure-time forecasting toolkit"};
  app.require_subcommand(1);

  ForecastArgs fc;
  auto* forecast = app.add_subcommand(
      "forecast", "per-interval departure counts with confidence margins");
  forecast->add_option("--input", fc.inputs, "training CSV (repeat to superimpose)")
      ->required()
      ->check(CLI::ExistingFile);
  forecast->add_option("--window-start", fc.window_start, "analysis window start (HH:MM:SS)");
  forecast->add_option("--window-end", fc.window_end, "analysis window end (HH:MM:SS)");
  forecast->add_option("--bins", fc.bins, "number of intervals");
  forecast->add_option("--k", fc.k, "confidence multiplier (2 ~ 95%)");
  add_format_option(forecast, fc.format);
  forecast->add_option("--out", fc.out, "output file (default stdout)");

  ScaleArgs sc;
  auto* scale = app.add_subcommand(
      "scale", "pick the finest interval granularity meeting an error constraint");
  scale->add_option("--input", sc.inputs, "training CSV (repeat to superimpose)")
      ->required()
      ->check(CLI::ExistingFile);
  scale->add_option("--window-start", sc.window_start, "analysis window start (HH:MM:SS)");
  scale->add_option("--window-end", sc.window_end, "analysis window end (HH:MM:SS)");
  scale->add_option("--epsilon", sc.epsilon, "error constraint in (0, 1]")->required();
  scale->add_option("--rule", sc.rule, "constraint reading")
      ->check(CLI::IsMember({"paper", "relative"}));
  scale->add_option("--b-min", sc.b_min, "smallest candidate bin count");
  scale->add_option("--b-max", sc.b_max, "largest candidate bin count");
  scale->add_option("--k", sc.k, "confidence multiplier for the final margins");
  add_format_option(scale, sc.format);
  scale->add_option("--out", sc.out, "output file (default stdout)");

  FitGmmArgs fg;
  auto* fit = app.add_subcommand("fit-gmm", "fit a Gaussian mixture to departure times");
  fit->add_option("--input", fg.inputs, "training CSV (repeat to superimpose)")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--window-start", fg.window_start, "analysis window start (HH:MM:SS)");
  fit->add_option("--window-end", fg.window_end, "analysis window end (HH:MM:SS)");
  fit->add_option("--bins", fg.bins, "number of intervals for the mass table");
  fit->add_option("--components", fg.components, "mixture components (default: --bins)");
  fit->add_option("--seed", fg.seed, "rng seed for random initialization");
  fit->add_option("--max-iterations", fg.max_iterations, "EM iteration cap");
  fit->add_option("--tolerance", fg.tolerance, "relative log-likelihood stopping tolerance");
  fit->add_option("--variance-floor", fg.variance_floor, "minimum component variance (s^2)");
  fit->add_option("--init", fg.init, "initialization strategy")
      ->check(CLI::IsMember({"even", "random"}));
  add_format_option(fit, fg.format);
  fit->add_option("--out", fg.out, "output file (default stdout)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "score a model artifact against held-out data");
  evaluate->add_option("--model", ev.model_path, "forecast or fit-gmm JSON artifact")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--test", ev.test_path, "held-out CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--bins", ev.bins, "expected bin count (must match the artifact)");
  evaluate->add_option("--label", ev.label, "report label");
  add_format_option(evaluate, ev.format);
  evaluate->add_option("--out", ev.out, "output file (default stdout)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic departure CSV");
  generate->add_option("--window-start", gen.window_start, "analysis window start (HH:MM:SS)");
  generate->add_option("--window-end", gen.window_end, "analysis window end (HH:MM:SS)");
  generate->add_option("--mean", gen.mean, "true mean departure time (HH:MM:SS)")->required();
  generate->add_option("--stddev", gen.stddev, "true standard deviation in seconds")->required();
  generate->add_option("--sessions", gen.sessions, "number of sampling sessions");
  generate->add_option("--vehicles", gen.vehicles, "vehicles per session");
  generate->add_option("--seed", gen.seed, "rng seed");
  generate->add_option("--session-prefix", gen.session_prefix,
                       "session id prefix (make ids unique before superimposing)");
  generate->add_option("--out", gen.out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*forecast) run_forecast(fc);
    if (*scale) run_scale(sc);
    if (*fit) run_fit_gmm(fg);
    if (*evaluate) run_evaluate(ev);
    if (*generate) run_generate(gen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
