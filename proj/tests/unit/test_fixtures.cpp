#include <doctest.h>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/fixtures.hpp"
#include "alphaforge/indicators.hpp"
#include "helpers.hpp"

using namespace alphaforge;
using namespace alphaforge::fixtures;

namespace {

FixtureSpec one_segment(double drift, double vol, int days, std::uint64_t seed = 3) {
  FixtureSpec s;
  s.tickers = {"ONE", "TWO"};
  s.days = days;
  s.segments = {{days, drift, vol, 0.0}};
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("zero drift and volatility give a constant series") {
  const Fixture fx = generate_fixture(one_segment(0.0, 0.0, 250));
  for (const auto& [t, s] : fx.universe.series()) {
    for (const auto& b : s.bars()) {
      CHECK(b.open == s.front().close);
      CHECK(b.close == s.front().close);
      CHECK(b.high == b.close);
      CHECK(b.low == b.close);
    }
  }
  CHECK(fx.universe.at("TWO").front().close == 125.0);
}

TEST_CASE("same seed gives identical files") {
  const auto spec = standard_fixture_spec(5);
  const auto a = testing::scratch_dir("fx_a"), b = testing::scratch_dir("fx_b");
  write_fixture(generate_fixture(spec), spec, a);
  write_fixture(generate_fixture(spec), spec, b);
  for (const auto& rel : {"data/AAA.csv", "data/EEE.csv", "news.csv", "fixture.json"}) {
    CHECK(csv::read_text(a / rel) == csv::read_text(b / rel));
  }
  const auto other = standard_fixture_spec(6);
  const auto c = testing::scratch_dir("fx_c");
  write_fixture(generate_fixture(other), other, c);
  CHECK(csv::read_text(a / "data/AAA.csv") != csv::read_text(c / "data/AAA.csv"));
  // Written files load back to the same universe.
  const Universe back = load_universe(a / "data");
  CHECK(back.series() == generate_fixture(spec).universe.series());
}

TEST_CASE("a positive-drift segment reads as bullish") {
  const Fixture fx = generate_fixture(one_segment(0.003, 0.005, 500));
  for (const auto& [t, s] : fx.universe.series()) {
    const Eigen::VectorXd r = detect_regime(s.closes());
    int defined = 0, bullish = 0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (std::isnan(r(i))) continue;
      ++defined;
      bullish += r(i) > 0;
    }
    CHECK(defined == 480);
    CHECK(static_cast<double>(bullish) >= 0.95 * defined);
  }
}

TEST_CASE("fixture dates and news") {
  const auto dates = business_days(make_date(2024, 6, 7), 3);
  CHECK(dates == std::vector<Date>{make_date(2024, 6, 7), make_date(2024, 6, 10), make_date(2024, 6, 11)});
  CHECK(business_day_count({make_date(2024, 6, 7), make_date(2024, 6, 12)}) == 3);
  const auto spec = standard_fixture_spec();
  const Fixture fx = generate_fixture(spec);
  CHECK(fx.universe.size() == 5);
  for (const auto& a : fx.articles) CHECK_NOTHROW(validate_article(a));
  int strong = 0;
  for (const auto& a : fx.articles) strong += a.polarity() < -0.7;
  CHECK(strong == 2);
  for (std::size_t i = 1; i < fx.articles.size(); ++i) CHECK(fx.articles[i - 1].published_at <= fx.articles[i].published_at);
}

TEST_CASE("invalid specs are refused") {
  FixtureSpec s = one_segment(0.0, 0.01, 10);
  s.days = 11;
  CHECK_THROWS_AS(generate_fixture(s), Error);
  s = one_segment(0.0, -0.01, 10);
  CHECK_THROWS_AS(generate_fixture(s), Error);
  s = one_segment(0.0, 0.01, 10);
  s.tickers.clear();
  CHECK_THROWS_AS(generate_fixture(s), Error);
}
