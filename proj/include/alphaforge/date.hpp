#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace alphaforge {

/// Calendar date at day resolution (exchange local).
using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 `YYYY-MM-DD` date. Anything else (including a
/// time-of-day suffix) throws Error(MalformedRow).
Date parse_date(std::string_view text);
std::string format_date(Date d);

inline Date make_date(int y, unsigned m, unsigned d) {
  return std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

/// Half-open date interval [start, end).
struct DateRange {
  Date start;
  Date end;

  bool contains(Date d) const noexcept { return d >= start && d < end; }
  bool empty() const noexcept { return end <= start; }
  /// Length in years, exact day count / 365.25.
  double years() const noexcept { return static_cast<double>((end - start).count()) / 365.25; }
};

inline bool is_weekday(Date d) {
  const std::chrono::weekday wd{d};
  return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

}  // namespace alphaforge
