#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fddt/time.hpp"

namespace fddt {

/// One vehicle's first departure of the day within one sampling session.
struct DepartureRecord {
  std::string vehicle_id;
  std::string session_id;
  TimeOfDay departure;

  bool operator==(const DepartureRecord&) const = default;
};

/// CSV or input-contract failure, with the 1-based source line when known.
class parse_error : public std::runtime_error {
public:
  parse_error(std::string msg, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + std::move(msg)
                                    : std::move(msg)),
        line_(line) {}

  long line() const { return line_; }

private:
  long line_;
};

/// Ordered collection of departure records plus the distinct sessions present,
/// in first-appearance order. At most one record per (vehicle, session).
class Dataset {
public:
  Dataset() = default;

  explicit Dataset(std::vector<DepartureRecord> records) : records_(std::move(records)) {
    std::unordered_set<std::string> seen;
    seen.reserve(records_.size());
    std::unordered_set<std::string> session_seen;
    for (const auto& r : records_) {
      if (!seen.insert(r.vehicle_id + '\x1f' + r.session_id).second)
        throw parse_error("duplicate record for vehicle \"" + r.vehicle_id + "\" in session \"" +
                          r.session_id + "\"");
      if (session_seen.insert(r.session_id).second) sessions_.push_back(r.session_id);
    }
  }

  const std::vector<DepartureRecord>& records() const { return records_; }
  const std::vector<std::string>& sessions() const { return sessions_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  bool operator==(const Dataset&) const = default;

private:
  std::vector<DepartureRecord> records_;
  std::vector<std::string> sessions_;
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

}  // namespace detail

inline constexpr const char* csv_header = "vehicle_id,session_id,start_tm";

/// Reads the three-column departure CSV. Accepts LF or CRLF, preserves row
/// order, rejects duplicate (vehicle, session) pairs.
inline Dataset parse_csv(std::istream& in) {
  std::vector<DepartureRecord> records;
  std::string line;
  long line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      // tolerate a UTF-8 BOM from spreadsheet exports
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line != csv_header)
        throw parse_error("expected header \"" + std::string(csv_header) + "\", got \"" + line + "\"",
                          line_no);
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != 3)
      throw parse_error("expected 3 fields, got " + std::to_string(fields.size()), line_no);
    if (fields[0].empty()) throw parse_error("empty vehicle_id field", line_no);
    if (fields[1].empty()) throw parse_error("empty session_id field", line_no);
    TimeOfDay dep;
    try {
      dep = TimeOfDay::parse(fields[2]);
    } catch (const std::invalid_argument& e) {
      throw parse_error(e.what(), line_no);
    }
    records.push_back({std::move(fields[0]), std::move(fields[1]), dep});
  }
  if (!saw_header) throw parse_error("empty input: missing header");
  return Dataset(std::move(records));
}

/// Canonical serialization: header + one row per record, LF line endings.
/// parse_csv(write_csv(d)) round-trips byte-exactly for canonical input.
inline void write_csv(const Dataset& d, std::ostream& out) {
  out << csv_header << '\n';
  for (const auto& r : d.records())
    out << r.vehicle_id << ',' << r.session_id << ',' << r.departure.to_string() << '\n';
}

/// Keeps exactly the records with window.start <= departure < window.end.
/// Sessions left with no records disappear from the session list.
inline Dataset trim_range(const Dataset& d, const TimeWindow& window) {
  std::vector<DepartureRecord> kept;
  kept.reserve(d.size());
  for (const auto& r : d.records())
    if (window.contains(r.departure)) kept.push_back(r);
  return Dataset(std::move(kept));
}

/// Union of several datasets. Parts must not share session ids; callers
/// prefix session ids (e.g. by city) before combining.
inline Dataset superimpose(const std::vector<Dataset>& parts) {
  std::unordered_set<std::string> sessions;
  std::vector<DepartureRecord> all;
  for (const auto& part : parts) {
    for (const auto& s : part.sessions())
      if (!sessions.insert(s).second)
        throw parse_error("session \"" + s + "\" appears in more than one part");
    all.insert(all.end(), part.records().begin(), part.records().end());
  }
  return Dataset(std::move(all));
}

/// Parameters for a synthetic departure dataset drawn from one normal
/// distribution, the generating model the forecasters assume.
struct SyntheticSpec {
  TimeWindow window;
  TimeOfDay true_mean;
  double true_stddev_seconds;
  int session_count;
  int vehicles_per_session;
  std::uint64_t rng_seed;

  void validate() const {
    if (!window.contains(true_mean))
      throw std::invalid_argument("true_mean " + true_mean.to_string() + " outside window " +
                                  window.start.to_string() + "-" + window.end.to_string());
    if (!(true_stddev_seconds > 0)) throw std::invalid_argument("true_stddev must be > 0");
    if (session_count < 1) throw std::invalid_argument("session_count must be >= 1");
    if (vehicles_per_session < 1) throw std::invalid_argument("vehicles_per_session must be >= 1");
  }
};

namespace detail {

/// Marsaglia polar normal sampler. Hand-rolled so the stream depends only on
/// this code, not on the stdlib's unspecified normal_distribution algorithm.
class NormalSampler {
public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()(double mean, double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return mean + stddev * u * factor;
  }

private:
  double uniform01() { return (rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace detail

/// Draws vehicles_per_session departures per session from
/// N(true_mean, true_stddev), rounded to whole seconds and rejection-resampled
/// until inside the window. Deterministic for a fixed seed.
inline Dataset generate_synthetic(const SyntheticSpec& spec,
                                  const std::string& session_prefix = "s") {
  spec.validate();
  detail::NormalSampler normal(spec.rng_seed);
  std::vector<DepartureRecord> records;
  records.reserve(static_cast<std::size_t>(spec.session_count) * spec.vehicles_per_session);
  long vehicle_no = 0;
  for (int s = 0; s < spec.session_count; ++s) {
    char sid[64];
    std::snprintf(sid, sizeof sid, "%s%03d", session_prefix.c_str(), s);
    for (int v = 0; v < spec.vehicles_per_session; ++v) {
      int seconds;
      do {
        double draw = normal(spec.true_mean.seconds(), spec.true_stddev_seconds);
        seconds = static_cast<int>(std::llround(draw));
      } while (seconds < spec.window.start.seconds() || seconds >= spec.window.end.seconds());
      char vid[32];
      std::snprintf(vid, sizeof vid, "v%05ld", vehicle_no++);
      records.push_back({vid, sid, TimeOfDay(seconds)});
    }
  }
  return Dataset(std::move(records));
}

}  // namespace fddt
