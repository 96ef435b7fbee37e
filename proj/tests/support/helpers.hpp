#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "alphaforge/date.hpp"
#include "alphaforge/market_data.hpp"

namespace testing {

/// Bars on consecutive weekdays from 2020-01-01 with the given closes. Opens
/// equal the previous close; highs and lows bracket open and close by `pad`.
inline alphaforge::BarSeries series_from_closes(const std::string& ticker, const std::vector<double>& closes,
                                                double pad = 0.5,
                                                alphaforge::Date start = alphaforge::make_date(2020, 1, 1)) {
  std::vector<alphaforge::Bar> bars;
  alphaforge::Date d = start;
  for (std::size_t i = 0; i < closes.size(); ++i) {
    while (!alphaforge::is_weekday(d)) d += std::chrono::days{1};
    const double open = i == 0 ? closes[0] : closes[i - 1];
    bars.push_back({d, open, std::max(open, closes[i]) + pad, std::min(open, closes[i]) - pad * 0.5, closes[i], 1000});
    d += std::chrono::days{1};
  }
  return alphaforge::BarSeries(ticker, std::move(bars));
}

/// Geometric random walk with random intraday ranges.
inline alphaforge::BarSeries random_walk(std::uint64_t seed, int n, const std::string& ticker = "RW",
                                         double start_price = 100.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, 0.015);
  std::uniform_real_distribution<double> wiggle(0.0, 0.01);
  std::vector<alphaforge::Bar> bars;
  alphaforge::Date d = alphaforge::make_date(2020, 1, 1);
  double prev = start_price;
  for (int i = 0; i < n; ++i) {
    while (!alphaforge::is_weekday(d)) d += std::chrono::days{1};
    const double open = prev * (1.0 + step(rng) * 0.2);
    const double close = prev * std::exp(step(rng));
    const double high = std::max(open, close) * (1.0 + wiggle(rng));
    const double low = std::min(open, close) * (1.0 - wiggle(rng));
    bars.push_back({d, open, high, low, close, 1000 + i});
    prev = close;
    d += std::chrono::days{1};
  }
  return alphaforge::BarSeries(ticker, std::move(bars));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("alphaforge_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
