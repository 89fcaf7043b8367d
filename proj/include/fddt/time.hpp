#pragma once

#include <compare>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace fddt {

inline constexpr int seconds_per_day = 86400;

/// Clock time within one day, whole-second resolution.
class TimeOfDay {
public:
  TimeOfDay() = default;

  explicit TimeOfDay(int seconds_since_midnight) : seconds_(seconds_since_midnight) {
    if (seconds_ < 0 || seconds_ >= seconds_per_day)
      throw std::invalid_argument("TimeOfDay out of range: " + std::to_string(seconds_));
  }

  static TimeOfDay from_hms(int h, int m, int s) {
    if (h < 0 || h > 23 || m < 0 || m > 59 || s < 0 || s > 59)
      throw std::invalid_argument("invalid clock time " + std::to_string(h) + ":" +
                                  std::to_string(m) + ":" + std::to_string(s));
    return TimeOfDay(h * 3600 + m * 60 + s);
  }

  /// Parses strict 24-hour "HH:MM:SS".
  static TimeOfDay parse(const std::string& text) {
    if (text.size() != 8 || text[2] != ':' || text[5] != ':')
      throw std::invalid_argument("cannot parse time \"" + text + "\": expected HH:MM:SS");
    for (int i : {0, 1, 3, 4, 6, 7})
      if (text[i] < '0' || text[i] > '9')
        throw std::invalid_argument("cannot parse time \"" + text + "\": expected HH:MM:SS");
    int h = (text[0] - '0') * 10 + (text[1] - '0');
    int m = (text[3] - '0') * 10 + (text[4] - '0');
    int s = (text[6] - '0') * 10 + (text[7] - '0');
    if (h > 23 || m > 59 || s > 59)
      throw std::invalid_argument("cannot parse time \"" + text + "\": field out of range");
    return TimeOfDay(h * 3600 + m * 60 + s);
  }

  int seconds() const { return seconds_; }
  int hour() const { return seconds_ / 3600; }
  int minute() const { return seconds_ / 60 % 60; }
  int second() const { return seconds_ % 60; }

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", hour(), minute(), second());
    return buf;
  }

  auto operator<=>(const TimeOfDay&) const = default;

private:
  int seconds_ = 0;
};

/// Half-open analysis window [start, end) within one day.
struct TimeWindow {
  TimeOfDay start;
  TimeOfDay end;

  TimeWindow(TimeOfDay s, TimeOfDay e) : start(s), end(e) {
    if (!(start < end))
      throw std::invalid_argument("TimeWindow start " + start.to_string() +
                                  " must precede end " + end.to_string());
  }

  int length_seconds() const { return end.seconds() - start.seconds(); }

  bool contains(TimeOfDay t) const { return start <= t && t < end; }

  bool operator==(const TimeWindow&) const = default;
};

/// Equal-width partition of a window into bin_count half-open bins.
/// The window length must be an exact multiple of the bin width in seconds.
struct BinGrid {
  TimeWindow window;
  int bin_count;

  BinGrid(TimeWindow w, int bins) : window(w), bin_count(bins) {
    if (bin_count < 1)
      throw std::invalid_argument("bin_count must be >= 1, got " + std::to_string(bin_count));
    if (window.length_seconds() % bin_count != 0)
      throw std::invalid_argument("window length " + std::to_string(window.length_seconds()) +
                                  " s is not divisible into " + std::to_string(bin_count) +
                                  " whole-second bins");
  }

  int width_seconds() const { return window.length_seconds() / bin_count; }

  TimeOfDay bin_start(int i) const { return TimeOfDay(window.start.seconds() + i * width_seconds()); }
  TimeOfDay bin_end(int i) const { return TimeOfDay(window.start.seconds() + (i + 1) * width_seconds()); }

  bool operator==(const BinGrid&) const = default;
};

/// Bin holding t, or nullopt when t lies outside the window.
/// Every bin is half-open, so t == window.end is outside.
inline std::optional<int> bin_index(const BinGrid& grid, TimeOfDay t) {
  if (!grid.window.contains(t)) return std::nullopt;
  return (t.seconds() - grid.window.start.seconds()) / grid.width_seconds();
}

/// Interval label in report style, e.g. "6.00-6.15am" or "8.50-9.00am".
/// Seconds appear only for boundaries not on a whole minute.
inline std::string interval_label(TimeOfDay lo, TimeOfDay hi) {
  auto part = [](TimeOfDay t) {
    int h12 = t.hour() % 12;
    if (h12 == 0) h12 = 12;
    char buf[24];
    if (t.second() == 0)
      std::snprintf(buf, sizeof buf, "%d.%02d", h12, t.minute());
    else
      std::snprintf(buf, sizeof buf, "%d.%02d.%02d", h12, t.minute(), t.second());
    return std::string(buf);
  };
  const char* suffix = hi.seconds() < seconds_per_day / 2 ? "am" : "pm";
  return part(lo) + "-" + part(hi) + suffix;
}

inline std::string bin_label(const BinGrid& grid, int i) {
  return interval_label(grid.bin_start(i), grid.bin_end(i));
}

}  // namespace fddt
