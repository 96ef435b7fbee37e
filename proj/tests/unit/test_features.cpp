#include <doctest.h>

#include <random>

#include "alphaforge/error.hpp"
#include "alphaforge/features.hpp"
#include "alphaforge/gbdt.hpp"
#include "helpers.hpp"

using namespace alphaforge;

TEST_CASE("labels by direct definition") {
  const auto labels = make_labels(testing::series_from_closes("L", {10, 11, 11, 9}));
  REQUIRE(labels.size() == 3);
  CHECK(labels[0].label == 1);
  CHECK(labels[1].label == 0);
  CHECK(labels[2].label == 0);

  std::vector<double> up;
  for (int i = 0; i < 50; ++i) up.push_back(1.0 + i);
  for (const auto& l : make_labels(testing::series_from_closes("U", up))) CHECK(l.label == 1);
}

TEST_CASE("labels match a diff sign test on random series") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const BarSeries s = testing::random_walk(seed, 200);
    const auto labels = make_labels(s);
    REQUIRE(labels.size() == s.size() - 1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      CHECK(labels[i].date == s[i].date);
      CHECK(labels[i].label == (s[i + 1].close - s[i].close > 0.0 ? 1 : 0));
    }
  }
}

TEST_CASE("scaler two-point symmetry") {
  FeatureMatrix x(2, kFeatureCount);
  x.row(0).setZero();
  x.row(1).setConstant(2.0);
  const ScalerParams p = fit_scaler(x);
  for (int j = 0; j < kFeatureCount; ++j) {
    CHECK(p.mean(j) == 1.0);
    CHECK(p.std(j) == 1.0);
    CHECK_FALSE(p.constant[static_cast<std::size_t>(j)]);
  }
  CHECK(p.transform(p.mean).isZero());
  CHECK(p.transform(p.mean + p.std).isApprox(FeatureVector::Ones()));
}

TEST_CASE("scaler zero-variance path") {
  FeatureMatrix x(5, kFeatureCount);
  for (int r = 0; r < 5; ++r) x.row(r).setLinSpaced(kFeatureCount, 1.0, 10.0);
  x(2, 3) = 99.0;
  const ScalerParams p = fit_scaler(x);
  for (int j = 0; j < kFeatureCount; ++j) {
    const bool constant = j != 3;
    CHECK(p.constant[static_cast<std::size_t>(j)] == constant);
    if (constant) CHECK(p.std(j) == 1.0);
  }
  FeatureMatrix one(1, kFeatureCount);
  one.setZero();
  CHECK_THROWS_AS(fit_scaler(one), Error);
}

TEST_CASE("standardized columns have zero mean and unit std") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  FeatureMatrix x(1000, kFeatureCount);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (int j = 0; j < kFeatureCount; ++j) x(r, j) = 50.0 * j + (j + 1) * 3.0 * n(rng);
  const ScalerParams p = fit_scaler(x);
  const FeatureMatrix z = transform(p, x);
  for (int j = 0; j < kFeatureCount; ++j) {
    // Oracle: recompute the column statistics directly.
    double m = 0.0;
    for (Eigen::Index r = 0; r < z.rows(); ++r) m += z(r, j);
    m /= static_cast<double>(z.rows());
    double ss = 0.0;
    for (Eigen::Index r = 0; r < z.rows(); ++r) ss += (z(r, j) - m) * (z(r, j) - m);
    CHECK(std::abs(m) < 1e-9);
    CHECK(std::abs(std::sqrt(ss / static_cast<double>(z.rows())) - 1.0) < 1e-9);
  }
  CHECK(scaler_from_json(scaler_to_json(p)) == p);
  CHECK(p.inverse(p.transform(x.row(7).transpose())).isApprox(x.row(7).transpose()));
}

namespace {

Universe two_tickers(int bars) {
  std::map<std::string, BarSeries> m;
  m.emplace("BBB", testing::random_walk(12, bars, "BBB"));
  m.emplace("AAA", testing::random_walk(11, bars, "AAA"));
  return Universe(m);
}

}  // namespace

TEST_CASE("dataset counting and order") {
  const Universe u = two_tickers(205);
  const FrameMap frames = compute_frames(u);
  const auto& dates = u.at("AAA").dates();
  // Rows 199..203 are defined and labelable; 204 is the last bar.
  const DateRange range{dates[199], dates[204] + std::chrono::days{1}};
  const Dataset d = build_dataset(u, frames, range);
  REQUIRE(d.size() == 10);
  for (int i = 0; i < 5; ++i) {
    CHECK(d.keys[static_cast<std::size_t>(i)] == RowKey{"AAA", dates[static_cast<std::size_t>(199 + i)]});
    CHECK(d.keys[static_cast<std::size_t>(5 + i)] == RowKey{"BBB", dates[static_cast<std::size_t>(199 + i)]});
  }
  const auto& s = u.at("BBB");
  CHECK(d.labels(5) == (s[200].close > s[199].close ? 1 : 0));
  CHECK(d.features.row(0).transpose() == *feature_vector(frames.at("AAA"), 199));

  const Dataset again = build_dataset(u, frames, range);
  CHECK(again.keys == d.keys);
  CHECK(again.features == d.features);
  CHECK(again.labels == d.labels);
}

TEST_CASE("range with no defined rows is an empty dataset") {
  const Universe u = two_tickers(205);
  const FrameMap frames = compute_frames(u);
  const auto& dates = u.at("AAA").dates();
  try {
    build_dataset(u, frames, {dates[0], dates[199]});
    FAIL("expected EmptyDataset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyDataset);
  }
}

TEST_CASE("chronological split keeps held-out rows out of the scaler") {
  const Universe u = two_tickers(400);
  const FrameMap frames = compute_frames(u);
  const auto& dates = u.at("AAA").dates();
  const Dataset d = build_dataset(u, frames, {dates.front(), dates.back() + std::chrono::days{1}});
  auto [train, test] = chronological_split(d, 0.7);
  CHECK(train.size() + test.size() == d.size());
  Date last_train = train.keys.front().date;
  for (const auto& k : train.keys) last_train = std::max(last_train, k.date);
  for (const auto& k : test.keys) CHECK(k.date > last_train);
  CHECK(train.size() >= static_cast<Eigen::Index>(std::ceil(0.7 * static_cast<double>(d.size()))));

  gbdt::Hyperparams hp;
  hp.n_estimators = 5;
  const gbdt::Ensemble model = gbdt::fit(train, hp);
  CHECK(model.scaler.fitted_rows == static_cast<std::size_t>(train.size()));
  CHECK(model.scaler == fit_scaler(train.features));
  // Perturbing held-out rows leaves the fitted model untouched.
  Dataset perturbed = d;
  for (Eigen::Index r = 0; r < d.size(); ++r)
    if (d.keys[static_cast<std::size_t>(r)].date > last_train) perturbed.features.row(r) *= 1000.0;
  auto [train2, test2] = chronological_split(perturbed, 0.7);
  CHECK(gbdt::fit(train2, hp) == model);
}
