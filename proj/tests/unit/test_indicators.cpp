#include <doctest.h>

#include "alphaforge/error.hpp"
#include "alphaforge/indicators.hpp"
#include "helpers.hpp"
#include "indicator_check.hpp"

using namespace alphaforge;

TEST_CASE("constant closes are a fixed point") {
  const double c = 42.5;
  const BarSeries s = testing::series_from_closes("C", std::vector<double>(300, c));
  const IndicatorFrame f = compute_indicators(s);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    if (f.defined(i, Field::Ema50)) CHECK(f(i, Field::Ema50) == doctest::Approx(c).epsilon(1e-12));
    if (f.defined(i, Field::Ema200)) CHECK(f(i, Field::Ema200) == doctest::Approx(c).epsilon(1e-12));
    if (f.defined(i, Field::EmaRatio)) CHECK(f(i, Field::EmaRatio) == doctest::Approx(1.0).epsilon(1e-12));
    for (Field z : {Field::Macd, Field::MacdSignal, Field::MacdHist, Field::Vol20}) {
      if (f.defined(i, z)) CHECK(std::abs(f(i, z)) < 1e-12);
    }
    for (Field b : {Field::BbUpper, Field::BbMid, Field::BbLower}) {
      if (f.defined(i, b)) CHECK(f(i, b) == doctest::Approx(c).epsilon(1e-12));
    }
  }
}

TEST_CASE("strictly increasing closes give rsi 100 and a bullish regime") {
  std::vector<double> up;
  for (int i = 0; i < 300; ++i) up.push_back(50.0 + 0.3 * i);
  const IndicatorFrame f = compute_indicators(testing::series_from_closes("U", up));
  for (Eigen::Index i = f.warmup_of(Field::Rsi14); i < f.rows(); ++i) CHECK(f(i, Field::Rsi14) == 100.0);
  for (Eigen::Index i = f.warmup_of(Field::Regime); i < f.rows(); ++i) CHECK(f(i, Field::Regime) == 1.0);
}

TEST_CASE("strictly decreasing closes give a bearish regime") {
  Eigen::VectorXd down(120);
  for (int i = 0; i < 120; ++i) down(i) = 200.0 - i;
  const Eigen::VectorXd r = detect_regime(down, 20);
  for (Eigen::Index i = 0; i < 20; ++i) CHECK(std::isnan(r(i)));
  for (Eigen::Index i = 20; i < r.size(); ++i) CHECK(r(i) == -1.0);
}

TEST_CASE("regime needs more bars than the window") {
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(20, 1.0);
  CHECK_THROWS_AS(detect_regime(x, 20), Error);
}

TEST_CASE("unchanged closes give rsi 50") {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(30, 7.0);
  const Eigen::VectorXd r = rsi(x);
  CHECK(std::isnan(r(13)));
  CHECK(r(14) == 50.0);
  CHECK(r(29) == 50.0);
}

TEST_CASE("random walks match the direct-definition oracle") {
  testing::IndicatorCheck check;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    testing::check_indicators(testing::random_walk(seed, 512), check);
  }
  INFO(check.first_problem);
  CHECK(check.compared > 0);
  CHECK(check.mismatches == 0);
  CHECK(check.warmups_match);
  CHECK(check.rsi_in_bounds);
  CHECK(check.bollinger_ordered);
}

TEST_CASE("warm-up indices") {
  const IndicatorFrame f = compute_indicators(testing::random_walk(8, 260));
  CHECK(f.warmup_of(Field::Ema50) == 49);
  CHECK(f.warmup_of(Field::Ema200) == 199);
  CHECK(f.warmup_of(Field::Macd) == 25);
  CHECK(f.warmup_of(Field::MacdSignal) == 33);
  CHECK(f.warmup_of(Field::Rsi14) == 14);
  CHECK(f.warmup_of(Field::Atr14) == 13);
  CHECK(f.warmup_of(Field::BbWidth) == 19);
  CHECK(f.warmup_of(Field::Vol20) == 20);
  CHECK(f.warmup_of(Field::Regime) == 20);
  CHECK(f.ready_index() == 199);
  CHECK(std::isnan(f(48, Field::Ema50)));
  CHECK_FALSE(std::isnan(f(49, Field::Ema50)));
}

TEST_CASE("too short a series is refused") {
  CHECK_THROWS_AS(compute_indicators(testing::random_walk(1, 150)), Error);
  std::map<std::string, BarSeries> m;
  m.emplace("LONG", testing::random_walk(1, 250, "LONG"));
  m.emplace("SHORT", testing::random_walk(2, 100, "SHORT"));
  std::vector<std::string> skipped;
  const FrameMap frames = compute_frames(Universe(m), {}, &skipped);
  CHECK(frames.size() == 1);
  CHECK(skipped == std::vector<std::string>{"SHORT"});
}

TEST_CASE("values at t ignore later bars") {
  const BarSeries full = testing::random_walk(21, 400);
  const IndicatorFrame ff = compute_indicators(full);
  for (std::size_t cut : {200u, 201u, 257u, 333u, 399u}) {
    const BarSeries prefix("RW", {full.bars().begin(), full.bars().begin() + static_cast<std::ptrdiff_t>(cut)});
    const IndicatorFrame pf = compute_indicators(prefix);
    for (Eigen::Index i = 0; i < pf.rows(); ++i) {
      for (int c = 0; c < kFieldCount; ++c) {
        const double a = pf.values(i, c), b = ff.values(i, c);
        CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
      }
    }
  }
}

TEST_CASE("scaling prices scales price fields and leaves ratios alone") {
  const BarSeries s = testing::random_walk(31, 300);
  std::vector<Bar> scaled = s.bars();
  const double k = 3.7;
  for (auto& b : scaled) {
    b.open *= k;
    b.high *= k;
    b.low *= k;
    b.close *= k;
  }
  const IndicatorFrame a = compute_indicators(s);
  const IndicatorFrame b = compute_indicators(BarSeries("RW", scaled));
  for (Eigen::Index i = a.ready_index(); i < a.rows(); ++i) {
    for (Field f : {Field::Ema50, Field::Ema200, Field::BbMid, Field::Atr14, Field::Sma200}) {
      CHECK(b(i, f) == doctest::Approx(k * a(i, f)).epsilon(1e-9));
    }
    for (Field f : {Field::EmaRatio, Field::Rsi14, Field::BbWidth, Field::Vol20}) {
      CHECK(b(i, f) == doctest::Approx(a(i, f)).epsilon(1e-8));
    }
  }
}

TEST_CASE("templated primitives work for float too") {
  Eigen::VectorXf x(5);
  x << 1, 2, 3, 4, 5;
  const Eigen::VectorXf e = ema(x, 3);
  CHECK(std::isnan(e(1)));
  CHECK(e(2) == doctest::Approx(2.25));
  const Eigen::VectorXf m = sma(x, 2);
  CHECK(m(4) == doctest::Approx(4.5));
}
