#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "alphaforge/date.hpp"

namespace alphaforge {

struct Bar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::int64_t volume = 0;

  friend bool operator==(const Bar&, const Bar&) = default;
};

/// Throws Error(InvariantViolation) unless prices are positive, volume is
/// non-negative and low <= min(open, close) <= max(open, close) <= high.
void validate_bar(const Bar& bar);

/// Chronologically ordered daily bars for one ticker.
class BarSeries {
 public:
  BarSeries() = default;
  /// Sorts by date, rejects duplicates (DuplicateDate) and invalid bars.
  BarSeries(std::string ticker, std::vector<Bar> bars);

  const std::string& ticker() const noexcept { return ticker_; }
  const std::vector<Bar>& bars() const noexcept { return bars_; }
  std::size_t size() const noexcept { return bars_.size(); }
  bool empty() const noexcept { return bars_.empty(); }
  const Bar& operator[](std::size_t i) const { return bars_[i]; }
  const Bar& front() const { return bars_.front(); }
  const Bar& back() const { return bars_.back(); }

  std::vector<Date> dates() const;
  Eigen::VectorXd opens() const;
  Eigen::VectorXd highs() const;
  Eigen::VectorXd lows() const;
  Eigen::VectorXd closes() const;

  /// Index of the bar dated `d`, or -1.
  std::ptrdiff_t index_of(Date d) const;

  /// Bars within `range`, in order. May be empty.
  BarSeries slice(DateRange range) const;

  friend bool operator==(const BarSeries&, const BarSeries&) = default;

 private:
  std::string ticker_;
  std::vector<Bar> bars_;
};

/// Ticker -> series, iterated in alphabetical ticker order.
class Universe {
 public:
  Universe() = default;
  explicit Universe(std::map<std::string, BarSeries> series);

  const std::map<std::string, BarSeries>& series() const noexcept { return series_; }
  const BarSeries& at(const std::string& ticker) const;
  bool contains(const std::string& ticker) const { return series_.count(ticker) != 0; }
  std::size_t size() const noexcept { return series_.size(); }
  bool empty() const noexcept { return series_.empty(); }
  std::vector<std::string> tickers() const;
  /// Sorted union of every series' dates.
  const std::vector<Date>& trading_calendar() const noexcept { return calendar_; }

 private:
  std::map<std::string, BarSeries> series_;
  std::vector<Date> calendar_;
};

BarSeries load_ohlcv_csv(const std::filesystem::path& path, std::string ticker = {});
void write_ohlcv_csv(const BarSeries& series, const std::filesystem::path& path);

/// Loads every `<TICKER>.csv` in `dir`. When `tickers` is non-empty only
/// those are loaded, and a missing file is an Io error.
Universe load_universe(const std::filesystem::path& dir, std::span<const std::string> tickers = {});

/// Earliest ceil(fraction * n) bars and the remainder.
std::pair<BarSeries, BarSeries> train_test_split(const BarSeries& series, double train_fraction);

struct AlignedUniverse {
  Universe universe;
  std::vector<std::string> dropped;
};

/// Truncates every series to `range`; tickers left empty are dropped and
/// reported. Throws EmptyUniverse when nothing is left.
AlignedUniverse align_to_calendar(const Universe& universe, DateRange range);

/// Keeps only bars dated <= `last`.
Universe truncate_after(const Universe& universe, Date last);

}  // namespace alphaforge
