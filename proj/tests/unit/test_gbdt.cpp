#include <doctest.h>

#include <random>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/gbdt.hpp"
#include "helpers.hpp"
#include "synthetic.hpp"

using namespace alphaforge;
using gbdt::Ensemble;
using gbdt::Hyperparams;

namespace {

double accuracy_on(const Ensemble& m, const FeatureMatrix& x, const Eigen::VectorXi& y) {
  int hits = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) hits += gbdt::predict(m, x.row(r).transpose()) == y(r);
  return static_cast<double>(hits) / static_cast<double>(x.rows());
}

// Walks the flat node array by hand.
double walk(const gbdt::Tree& t, const FeatureVector& x) {
  const auto& nodes = t.nodes();
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const double v = x(nodes[i].feature);
    const bool left = std::isnan(v) ? nodes[i].default_left : v < nodes[i].split;
    i = static_cast<std::size_t>(left ? nodes[i].left : nodes[i].right);
  }
  return nodes[i].weight;
}

ErrorCode load_error(const std::string& text) {
  try {
    gbdt::from_json(text);
  } catch (const Error& e) {
    return e.code();
  } catch (...) {
    return ErrorCode::Io;
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("separable data is learned within ten rounds") {
  const auto d = testing::sign_dataset(4, 500, 3, 0.0, 0.3);
  Hyperparams hp;
  hp.n_estimators = 10;
  const Ensemble m = gbdt::train(d.x, d.y, hp);
  CHECK(accuracy_on(m, d.x, d.y) == 1.0);
}

TEST_CASE("one positive and one negative row give a single pure split") {
  FeatureMatrix x(2, kFeatureCount);
  x.row(0) << 0, 0, 1, 0, 0, 0, 0, 0, 0, 0;
  x.row(1) << 0, 0, -1, 0, 0, 0, 0, 0, 0, 0;
  Eigen::VectorXi y(2);
  y << 1, 0;
  Hyperparams hp;
  hp.n_estimators = 1;
  hp.max_depth = 1;
  hp.min_child_weight = 0.0;
  const Ensemble m = gbdt::train(x, y, hp);
  REQUIRE(m.trees.size() == 1);
  const auto& nodes = m.trees[0].nodes();
  REQUIRE(nodes.size() == 3);
  CHECK(nodes[0].feature == 2);
  CHECK(nodes[0].split == 0.0);
  CHECK(m.trees[0].leaf_count() == 2);
  CHECK(m.trees[0].depth() == 1);
  // Each leaf holds exactly one row, and the weights push toward its label.
  CHECK(m.trees[0].evaluate(x.row(0).transpose()) > 0.0);
  CHECK(m.trees[0].evaluate(x.row(1).transpose()) < 0.0);
  CHECK(gbdt::predict_proba(m, x.row(0).transpose()) > gbdt::predict_proba(m, x.row(1).transpose()));
}

TEST_CASE("coin-flip labels stay near chance on held-out rows") {
  const auto d = testing::noise_dataset(21, 2000);
  const Ensemble m = gbdt::train(testing::head_rows(d.x, 1400), d.y.head(1400), Hyperparams{});
  const double acc = accuracy_on(m, testing::tail_rows(d.x, 600), d.y.tail(600));
  CHECK(acc >= 0.45);
  CHECK(acc <= 0.55);
}

TEST_CASE("closed-form predictions") {
  Ensemble zero;
  zero.base_score_logit = 0.0;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int i = 0; i < 10; ++i) {
    FeatureVector x;
    for (int j = 0; j < kFeatureCount; ++j) x(j) = n(rng);
    CHECK(gbdt::predict_proba(zero, x) == 0.5);
  }
  Ensemble one;
  one.learning_rate = 1.0;
  one.trees.push_back(gbdt::Tree({gbdt::TreeNode{-1, 0.0, -1, -1, true, 0.8}}));
  CHECK(gbdt::predict_proba(one, FeatureVector::Zero()) == doctest::Approx(1.0 / (1.0 + std::exp(-0.8))));
}

TEST_CASE("decision threshold is inclusive") {
  Ensemble half;
  CHECK(gbdt::predict(half, FeatureVector::Zero()) == 1);
  Ensemble below;
  below.base_score_logit = std::log(0.49 / 0.51);
  CHECK(gbdt::predict_proba(below, FeatureVector::Zero()) == doctest::Approx(0.49));
  CHECK(gbdt::predict(below, FeatureVector::Zero()) == 0);
}

TEST_CASE("predictions equal a hand walk of every tree") {
  const auto d = testing::sign_dataset(8, 600, 1, 0.1);
  Hyperparams hp;
  hp.n_estimators = 30;
  const Ensemble m = gbdt::train(d.x, d.y, hp);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    FeatureVector x;
    for (int j = 0; j < kFeatureCount; ++j) x(j) = n(rng);
    if (i % 10 == 0) x(1) = std::numeric_limits<double>::quiet_NaN();
    double margin = m.base_score_logit;
    for (const auto& t : m.trees) margin += m.learning_rate * walk(t, x);
    CHECK(gbdt::predict_proba(m, x) == doctest::Approx(1.0 / (1.0 + std::exp(-margin))).epsilon(1e-12));
  }
}

TEST_CASE("model files round-trip") {
  const auto dir = testing::scratch_dir("gbdt_roundtrip");
  const auto d = testing::sign_dataset(9, 400, 5, 0.05);
  Dataset ds;
  ds.features = d.x;
  ds.labels = d.y;
  ds.keys.resize(static_cast<std::size_t>(d.x.rows()));
  Hyperparams hp;
  hp.n_estimators = 25;
  const Ensemble m = gbdt::fit(ds, hp);
  gbdt::save_model(m, dir / "model.json");
  const Ensemble back = gbdt::load_model(dir / "model.json");
  CHECK(back == m);
  CHECK(gbdt::to_json(back) == gbdt::to_json(m));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    FeatureVector x;
    for (int j = 0; j < kFeatureCount; ++j) x(j) = n(rng);
    CHECK(gbdt::predict_proba(back, x) == gbdt::predict_proba(m, x));
  }
}

TEST_CASE("corrupt model files are rejected") {
  const auto d = testing::sign_dataset(9, 200, 5, 0.05);
  Hyperparams hp;
  hp.n_estimators = 3;
  const std::string text = gbdt::to_json(gbdt::train(d.x, d.y, hp));
  CHECK(load_error(text.substr(0, text.size() / 2)) == ErrorCode::CorruptModelFile);
  CHECK(load_error("") == ErrorCode::CorruptModelFile);
  CHECK(load_error("[1,2,3]") == ErrorCode::CorruptModelFile);
  std::string other = text;
  other.replace(other.find("\"schema_version\": 1"), 19, "\"schema_version\": 2");
  CHECK(load_error(other) == ErrorCode::SchemaVersionMismatch);
  const auto dir = testing::scratch_dir("gbdt_missing");
  CHECK_THROWS_AS(gbdt::load_model(dir / "absent.json"), Error);
}

TEST_CASE("training refuses degenerate inputs") {
  FeatureMatrix x = FeatureMatrix::Zero(4, kFeatureCount);
  Eigen::VectorXi same = Eigen::VectorXi::Ones(4);
  try {
    gbdt::train(x, same, Hyperparams{});
    FAIL("expected SingleClassDataset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingleClassDataset);
  }
  try {
    gbdt::train(FeatureMatrix(0, kFeatureCount), Eigen::VectorXi(0), Hyperparams{});
    FAIL("expected EmptyDataset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyDataset);
  }
}

TEST_CASE("training loss never increases and trees respect max depth") {
  const auto d = testing::sign_dataset(12, 1000, 2, 0.1);
  gbdt::TrainingTrace trace;
  Hyperparams hp;
  hp.max_depth = 4;
  const Ensemble m = gbdt::train(d.x, d.y, hp, 0, &trace);
  REQUIRE(trace.loss.size() == 201);
  for (std::size_t k = 1; k < trace.loss.size(); ++k) CHECK(trace.loss[k] <= trace.loss[k - 1] + 1e-12);
  for (const auto& t : m.trees) CHECK(t.depth() <= 4);
}

TEST_CASE("training is deterministic") {
  const auto d = testing::sign_dataset(13, 500, 7, 0.2);
  Hyperparams hp;
  hp.n_estimators = 40;
  const Ensemble a = gbdt::train(d.x, d.y, hp, 42);
  const Ensemble b = gbdt::train(d.x, d.y, hp, 42);
  CHECK(a == b);
  CHECK(gbdt::to_json(a) == gbdt::to_json(b));
}

TEST_CASE("hyperparameters are validated") {
  Hyperparams hp;
  hp.max_depth = 0;
  CHECK_THROWS_AS(hp.validate(), Error);
  hp = {};
  hp.learning_rate = 0.0;
  CHECK_THROWS_AS(hp.validate(), Error);
}
