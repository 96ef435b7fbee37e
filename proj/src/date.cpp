#include "alphaforge/date.hpp"

#include <charconv>
#include <cstdio>

#include "alphaforge/error.hpp"

namespace alphaforge {

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') throw Error(ErrorCode::MalformedRow, "bad date '" + std::string(text) + "'");
  }
  std::from_chars(first, last, value);
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorCode::MalformedRow, "bad date '" + std::string(text) + "'");
  }
  const int y = parse_fixed(text, 0, 4);
  const int m = parse_fixed(text, 5, 2);
  const int d = parse_fixed(text, 8, 2);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(ErrorCode::MalformedRow, "invalid calendar date '" + std::string(text) + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace alphaforge
