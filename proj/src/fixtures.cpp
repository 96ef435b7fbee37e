#include "alphaforge/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"

namespace alphaforge::fixtures {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void FixtureSpec::validate() const {
  const auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
  if (tickers.empty()) bad("no tickers");
  if (std::set<std::string>(tickers.begin(), tickers.end()).size() != tickers.size()) bad("duplicate tickers");
  if (days < 1) bad("days must be positive");
  long total = 0;
  for (const auto& s : segments) {
    if (s.length < 1) bad("segment length must be positive");
    if (!(s.volatility >= 0)) bad("volatility must be non-negative");
    if (!(s.reversion >= 0 && s.reversion < 1)) bad("reversion must lie in [0, 1)");
    total += s.length;
  }
  if (total != days) bad("segment lengths sum to " + std::to_string(total) + ", expected " + std::to_string(days));
  if (!(initial_price > 0)) bad("initial price must be positive");
  if (!(background_news_rate >= 0 && background_news_rate <= 1)) bad("background news rate must lie in [0, 1]");
  for (const auto& n : news) {
    if (std::find(tickers.begin(), tickers.end(), n.ticker) == tickers.end()) bad("news for unknown ticker " + n.ticker);
    if (n.minutes_et < 0 || n.minutes_et >= 24 * 60) bad("news time out of range");
    validate_article({n.ticker, Instant{}, n.p_pos, n.p_neu, n.p_neg});
  }
}

std::vector<Date> business_days(Date start, int count) {
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (Date d = start; static_cast<int>(out.size()) < count; d += std::chrono::days{1}) {
    if (is_weekday(d)) out.push_back(d);
  }
  return out;
}

int business_day_count(DateRange range) {
  int n = 0;
  for (Date d = range.start; d < range.end; d += std::chrono::days{1}) n += is_weekday(d) ? 1 : 0;
  return n;
}

Fixture generate_fixture(const FixtureSpec& spec) {
  spec.validate();
  const auto dates = business_days(spec.start, spec.days);
  Fixture fx;
  std::map<std::string, BarSeries> series;
  for (std::size_t t = 0; t < spec.tickers.size(); ++t) {
    const std::string& ticker = spec.tickers[t];
    // Independent stream per ticker.
    Rng rng(spec.seed ^ (0x9E3779B97F4A7C15ULL * (t + 1)));
    std::vector<Bar> bars;
    bars.reserve(dates.size());
    double prev_close = spec.initial_price * (1.0 + 0.25 * static_cast<double>(t));
    std::size_t day = 0;
    for (const auto& seg : spec.segments) {
      const double anchor = std::log(prev_close);
      for (int k = 0; k < seg.length; ++k, ++day) {
        const double z_close = rng.normal();
        const double z_open = rng.normal();
        const double z_range = rng.normal();
        const double log_prev = std::log(prev_close);
        const double step = seg.drift + seg.reversion * (anchor - log_prev) + seg.volatility * z_close;
        Bar b;
        b.date = dates[day];
        b.open = day == 0 ? prev_close : prev_close * std::exp(0.25 * seg.volatility * z_open);
        b.close = prev_close * std::exp(step);
        const double u = std::min(0.5, 0.5 * seg.volatility * std::abs(z_range));
        b.high = std::max(b.open, b.close) * (1.0 + u);
        b.low = std::min(b.open, b.close) * (1.0 - u);
        b.volume = 1000000 + static_cast<std::int64_t>(rng.uniform() * 1000000.0);
        bars.push_back(b);
        prev_close = b.close;
      }
    }

    if (spec.background_news_rate > 0) {
      Rng news_rng(spec.seed ^ (0xD1B54A32D192ED03ULL * (t + 1)));
      for (const Date d : dates) {
        if (!(news_rng.uniform() < spec.background_news_rate)) continue;
        const int minute = static_cast<int>(news_rng.uniform() * 24 * 60);
        const double neutral = 0.35 + 0.65 * news_rng.uniform();
        const double tilt = news_rng.uniform();
        ScoredArticle a{ticker, eastern_time(d, minute), (1.0 - neutral) * tilt, neutral, (1.0 - neutral) * (1.0 - tilt)};
        fx.articles.push_back(a);
      }
    }
    series.emplace(ticker, BarSeries(ticker, std::move(bars)));
  }
  for (const auto& n : spec.news) {
    fx.articles.push_back({n.ticker, eastern_time(n.date, n.minutes_et), n.p_pos, n.p_neu, n.p_neg});
  }
  std::stable_sort(fx.articles.begin(), fx.articles.end(), [](const ScoredArticle& a, const ScoredArticle& b) {
    return a.published_at < b.published_at;
  });
  fx.universe = Universe(std::move(series));
  return fx;
}

void write_fixture(const Fixture& fixture, const FixtureSpec& spec, const std::filesystem::path& dir) {
  for (const auto& [ticker, s] : fixture.universe.series()) write_ohlcv_csv(s, dir / "data" / (ticker + ".csv"));
  write_articles_csv(fixture.articles, dir / "news.csv");
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : spec.segments) {
    segments.push_back({{"length", s.length}, {"drift", s.drift}, {"volatility", s.volatility},
                        {"reversion", s.reversion}});
  }
  const nlohmann::json manifest{{"generator", Rng::kName},
                                {"seed", spec.seed},
                                {"tickers", spec.tickers},
                                {"start", format_date(spec.start)},
                                {"days", spec.days},
                                {"segments", segments},
                                {"news_injections", spec.news.size()},
                                {"background_news_rate", spec.background_news_rate},
                                {"initial_price", spec.initial_price}};
  csv::write_text(dir / "fixture.json", manifest.dump(2) + "\n");
}

FixtureSpec standard_fixture_spec(std::uint64_t seed) {
  FixtureSpec spec;
  spec.tickers = {"AAA", "BBB", "CCC", "DDD", "EEE"};
  spec.start = make_date(2019, 1, 1);
  spec.days = business_day_count({spec.start, make_date(2025, 1, 1)});
  spec.segments = {
      {300, 0.0003, 0.015, 0.0},   // random walk
      {250, 0.0012, 0.012, 0.0},   // trend
      {200, 0.0, 0.015, 0.05},     // mean reverting
      {150, -0.0015, 0.02, 0.0},   // bear
      {300, 0.001, 0.015, 0.0},    // trend
      {200, 0.0, 0.014, 0.04},     // mean reverting
  };
  int used = 0;
  for (const auto& s : spec.segments) used += s.length;
  spec.segments.push_back({spec.days - used, 0.0004, 0.016, 0.0});
  spec.background_news_rate = 0.1;
  const auto dates = business_days(spec.start, spec.days);
  spec.news = {
      {"BBB", dates[1200], 7 * 60, 0.02, 0.08, 0.90},
      {"DDD", dates[1350], 8 * 60, 0.05, 0.05, 0.90},
  };
  spec.seed = seed;
  return spec;
}

FixtureSpec crash_fixture_spec(Date* bull_start, Date* crash_start, std::uint64_t seed) {
  FixtureSpec spec;
  spec.tickers = {"AAA", "BBB", "CCC", "DDD", "EEE"};
  spec.start = make_date(2019, 1, 1);
  constexpr int kHistory = 700;
  constexpr int kBull = 250;
  constexpr int kCrash = 60;
  constexpr int kAfter = 100;
  spec.segments = {
      {350, 0.0004, 0.015, 0.0},
      {kHistory - 350, 0.0, 0.015, 0.04},
      {kBull, 0.0012, 0.02, 0.0},
      {kCrash, -0.012, 0.02, 0.0},
      {kAfter, 0.0, 0.015, 0.0},
  };
  spec.days = kHistory + kBull + kCrash + kAfter;
  const auto dates = business_days(spec.start, spec.days);
  const int first_crash = kHistory + kBull;
  for (const auto& t : spec.tickers) {
    for (int k = 0; k < 10; ++k) spec.news.push_back({t, dates[static_cast<std::size_t>(first_crash + k)], 7 * 60, 0.05, 0.0, 0.95});
  }
  spec.background_news_rate = 0.05;
  spec.seed = seed;
  if (bull_start) *bull_start = dates[kHistory];
  if (crash_start) *crash_start = dates[first_crash];
  return spec;
}

}  // namespace alphaforge::fixtures
