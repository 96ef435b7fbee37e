#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "alphaforge/date.hpp"
#include "alphaforge/market_data.hpp"
#include "alphaforge/sentiment.hpp"

namespace alphaforge::fixtures {

/// Seeded generator used for every fixture: std::mt19937_64 (its output
/// sequence is fixed by the C++ standard) with uniforms taken from the top
/// 53 bits and normals from the Box-Muller transform, so files are
/// reproducible across compilers and platforms.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64+box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// A run of days sharing one drift/volatility (log-return per day). A
/// positive `reversion` pulls the log price back toward its level at the
/// start of the segment.
struct Segment {
  int length = 0;
  double drift = 0.0;
  double volatility = 0.0;
  double reversion = 0.0;
};

struct NewsInjection {
  std::string ticker;
  Date date;
  int minutes_et = 8 * 60;  // published at this Eastern local time
  double p_pos = 0.0;
  double p_neu = 0.0;
  double p_neg = 0.0;
};

struct FixtureSpec {
  std::vector<std::string> tickers;
  Date start = make_date(2019, 1, 1);
  int days = 0;  // business days
  std::vector<Segment> segments;
  std::vector<NewsInjection> news;
  /// Chance per ticker-day of one mild background article (|S| <= 0.65).
  double background_news_rate = 0.0;
  std::uint64_t seed = 0;
  double initial_price = 100.0;

  /// Throws InvalidSpec.
  void validate() const;
};

struct Fixture {
  Universe universe;
  std::vector<ScoredArticle> articles;
};

/// The first `count` Monday-to-Friday dates on or after `start`.
std::vector<Date> business_days(Date start, int count);
/// Number of weekdays in [range.start, range.end).
int business_day_count(DateRange range);

Fixture generate_fixture(const FixtureSpec& spec);

/// Writes `<dir>/data/<TICKER>.csv`, `<dir>/news.csv` and a
/// `<dir>/fixture.json` manifest naming the generator and seed.
void write_fixture(const Fixture& fixture, const FixtureSpec& spec, const std::filesystem::path& dir);

/// Five tickers over 2019-01-01..2025-01-01 mixing random-walk, trending,
/// mean-reverting and bear segments, with light background news.
FixtureSpec standard_fixture_spec(std::uint64_t seed = 7);

/// History, then a volatile bull run, then a crash whose first sessions
/// carry strongly negative news for every ticker. `crash_start` receives the
/// first crash date and `bull_start` the first bull-run date.
FixtureSpec crash_fixture_spec(Date* bull_start = nullptr, Date* crash_start = nullptr, std::uint64_t seed = 11);

}  // namespace alphaforge::fixtures
