#include "alphaforge/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"

namespace alphaforge::gbdt {

using nlohmann::json;

void Hyperparams::validate() const {
  const auto bad = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (n_estimators < 1) bad("n_estimators must be >= 1");
  if (max_depth < 1) bad("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) bad("learning_rate must lie in (0, 1]");
  if (!(l2_lambda >= 0.0)) bad("l2_lambda must be >= 0");
  if (!(min_child_weight >= 0.0)) bad("min_child_weight must be >= 0");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) bad("decision_threshold must lie in (0, 1)");
}

int Tree::depth() const {
  if (nodes_.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

int Tree::leaf_count() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

double sigmoid(double margin) noexcept {
  const double p = 1.0 / (1.0 + std::exp(-margin));
  // Keep the probability strictly inside (0, 1) even for saturated margins.
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double logistic_loss(const Eigen::VectorXd& margins, const Eigen::VectorXi& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double m = margins(i);
    // log(1 + e^m) - y*m, evaluated without overflow.
    const double softplus = m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    total += softplus - labels(i) * m;
  }
  return total / static_cast<double>(margins.size());
}

namespace {

struct SplitCandidate {
  int feature = -1;
  double value = 0.0;
  double gain = 0.0;
};

/// Grows one tree depth-first. Each node carries, per feature, its rows in
/// ascending feature order; children inherit that order by stable partition.
class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& x, const Eigen::VectorXd& grad, const Eigen::VectorXd& hess, const Hyperparams& hp)
      : x_(x), grad_(grad), hess_(hess), hp_(hp), goes_left_(static_cast<std::size_t>(x.rows()), 0) {}

  Tree grow(std::array<std::vector<int>, kFeatureCount> sorted, std::vector<std::pair<int, double>>& leaf_of_row) {
    nodes_.clear();
    leaf_assignments_ = &leaf_of_row;
    build(std::move(sorted), 0);
    return Tree(std::move(nodes_));
  }

 private:
  int build(std::array<std::vector<int>, kFeatureCount> sorted, int depth) {
    const std::vector<int>& rows = sorted[0];
    double g = 0.0;
    double h = 0.0;
    // Sum in ascending row index order so totals do not depend on which
    // feature's ordering a node happened to receive.
    std::vector<int> by_index(rows);
    std::sort(by_index.begin(), by_index.end());
    for (const int r : by_index) {
      g += grad_(r);
      h += hess_(r);
    }

    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    const SplitCandidate best = depth < hp_.max_depth ? find_split(sorted, g, h) : SplitCandidate{};
    if (best.feature < 0) {
      const double denom = h + hp_.l2_lambda;
      const double w = denom > 0 ? -g / denom : 0.0;
      nodes_[static_cast<std::size_t>(id)].weight = w;
      for (const int r : by_index) (*leaf_assignments_)[static_cast<std::size_t>(r)] = {id, w};
      return id;
    }

    for (const int r : rows) goes_left_[static_cast<std::size_t>(r)] = x_(r, best.feature) < best.value ? 1 : 0;
    std::array<std::vector<int>, kFeatureCount> left, right;
    for (int f = 0; f < kFeatureCount; ++f) {
      auto& src = sorted[static_cast<std::size_t>(f)];
      auto& l = left[static_cast<std::size_t>(f)];
      auto& rr = right[static_cast<std::size_t>(f)];
      l.reserve(src.size());
      rr.reserve(src.size());
      for (const int r : src) (goes_left_[static_cast<std::size_t>(r)] ? l : rr).push_back(r);
      std::vector<int>().swap(src);
    }

    const int left_id = build(std::move(left), depth + 1);
    const int right_id = build(std::move(right), depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.split = best.value;
    node.left = left_id;
    node.right = right_id;
    node.default_left = true;
    return id;
  }

  SplitCandidate find_split(const std::array<std::vector<int>, kFeatureCount>& sorted, double g, double h) const {
    const double lambda = hp_.l2_lambda;
    const double parent = h + lambda > 0 ? g * g / (h + lambda) : 0.0;
    SplitCandidate best;
    for (int f = 0; f < kFeatureCount; ++f) {
      const auto& rows = sorted[static_cast<std::size_t>(f)];
      double gl = 0.0;
      double hl = 0.0;
      for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const int r = rows[k];
        gl += grad_(r);
        hl += hess_(r);
        const double a = x_(r, f);
        const double b = x_(rows[k + 1], f);
        if (!(a < b)) continue;
        const double gr = g - gl;
        const double hr = h - hl;
        if (hl < hp_.min_child_weight || hr < hp_.min_child_weight) continue;
        if (hl + lambda <= 0 || hr + lambda <= 0) continue;
        const double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
        if (gain > best.gain) {
          double mid = a + (b - a) / 2.0;
          if (!(mid > a)) mid = b;
          best = {f, mid, gain};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  const Eigen::VectorXd& grad_;
  const Eigen::VectorXd& hess_;
  const Hyperparams& hp_;
  std::vector<char> goes_left_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<int, double>>* leaf_assignments_ = nullptr;
};

}  // namespace

Ensemble train(const FeatureMatrix& features, const Eigen::VectorXi& labels, const Hyperparams& hp,
               [[maybe_unused]] std::uint64_t seed, TrainingTrace* trace) {
  hp.validate();
  const Eigen::Index n = features.rows();
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "no training rows");
  if (labels.size() != n) throw Error(ErrorCode::InvalidArgument, "label count does not match rows");
  if (!features.allFinite()) throw Error(ErrorCode::InvalidArgument, "training features must be finite");
  const auto positives = (labels.array() == 1).count();
  if ((labels.array() != 0 && labels.array() != 1).any()) throw Error(ErrorCode::InvalidArgument, "labels must be 0/1");
  if (positives == 0 || positives == n) throw Error(ErrorCode::SingleClassDataset, "both classes must be present");

  Ensemble model;
  model.hyperparams = hp;
  model.learning_rate = hp.learning_rate;
  const double rate = static_cast<double>(positives) / static_cast<double>(n);
  model.base_score_logit = std::log(rate / (1.0 - rate));

  std::array<std::vector<int>, kFeatureCount> presorted;
  for (int f = 0; f < kFeatureCount; ++f) {
    auto& order = presorted[static_cast<std::size_t>(f)];
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return features(a, f) < features(b, f); });
  }

  Eigen::VectorXd margin = Eigen::VectorXd::Constant(n, model.base_score_logit);
  Eigen::VectorXd grad(n), hess(n);
  std::vector<std::pair<int, double>> leaf_of_row(static_cast<std::size_t>(n));
  if (trace) trace->loss = {logistic_loss(margin, labels)};

  TreeGrower grower(features, grad, hess, hp);
  for (int round = 0; round < hp.n_estimators; ++round) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(margin(i));
      grad(i) = p - labels(i);
      hess(i) = p * (1.0 - p);
    }
    model.trees.push_back(grower.grow(presorted, leaf_of_row));
    for (Eigen::Index i = 0; i < n; ++i) margin(i) += model.learning_rate * leaf_of_row[static_cast<std::size_t>(i)].second;
    if (trace) trace->loss.push_back(logistic_loss(margin, labels));
  }
  return model;
}

Ensemble fit(const Dataset& data, const Hyperparams& hp, std::uint64_t seed, TrainingTrace* trace) {
  if (data.empty()) throw Error(ErrorCode::EmptyDataset, "no training rows");
  const ScalerParams scaler = fit_scaler(data.features);
  Ensemble model = train(transform(scaler, data.features), data.labels, hp, seed, trace);
  model.scaler = scaler;
  return model;
}

double predict_proba(const Ensemble& model, const FeatureVector& x) { return sigmoid(model.margin(x)); }

int predict(const Ensemble& model, const FeatureVector& x) {
  return predict_proba(model, x) >= model.hyperparams.decision_threshold ? 1 : 0;
}

double accuracy(const Ensemble& model, const Dataset& data) {
  if (data.empty()) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    const FeatureVector z = model.scaler.transform(data.features.row(r).transpose());
    hits += predict(model, z) == data.labels(r) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

// --- serialization ---------------------------------------------------------

namespace {

json node_to_json(const std::vector<TreeNode>& nodes, int i) {
  const TreeNode& n = nodes[static_cast<std::size_t>(i)];
  if (n.is_leaf()) return json{{"w", n.weight}};
  return json{{"f", n.feature},
              {"v", n.split},
              {"d", n.default_left ? "left" : "right"},
              {"l", node_to_json(nodes, n.left)},
              {"r", node_to_json(nodes, n.right)}};
}

int node_from_json(const json& j, std::vector<TreeNode>& out, int depth) {
  if (depth > 64) throw Error(ErrorCode::CorruptModelFile, "tree nesting too deep");
  const int id = static_cast<int>(out.size());
  out.emplace_back();
  if (j.contains("w")) {
    out[static_cast<std::size_t>(id)].weight = j.at("w").get<double>();
    return id;
  }
  const int f = j.at("f").get<int>();
  if (f < 0 || f >= kFeatureCount) throw Error(ErrorCode::CorruptModelFile, "feature index out of range");
  const double v = j.at("v").get<double>();
  const bool default_left = j.value("d", std::string("left")) == "left";
  const int l = node_from_json(j.at("l"), out, depth + 1);
  const int r = node_from_json(j.at("r"), out, depth + 1);
  TreeNode& n = out[static_cast<std::size_t>(id)];
  n.feature = f;
  n.split = v;
  n.default_left = default_left;
  n.left = l;
  n.right = r;
  return id;
}

}  // namespace

std::string to_json(const Ensemble& model) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  const auto& hp = model.hyperparams;
  j["hyperparams"] = {{"n_estimators", hp.n_estimators},   {"max_depth", hp.max_depth},
                      {"learning_rate", hp.learning_rate}, {"l2_lambda", hp.l2_lambda},
                      {"min_child_weight", hp.min_child_weight}, {"decision_threshold", hp.decision_threshold}};
  j["learning_rate"] = model.learning_rate;
  j["base_score_logit"] = model.base_score_logit;
  j["feature_names"] = model.feature_names;
  j["scaler"] = json::parse(scaler_to_json(model.scaler));
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(t.nodes(), 0));
  j["trees"] = std::move(trees);
  return j.dump(1) + "\n";
}

Ensemble from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModelFile, e.what());
  }
  try {
    if (!j.is_object() || !j.contains("schema_version")) throw Error(ErrorCode::CorruptModelFile, "no schema_version");
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw Error(ErrorCode::SchemaVersionMismatch,
                  "model schema " + std::to_string(version) + ", expected " + std::to_string(kModelSchemaVersion));
    }
    Ensemble m;
    const auto& hp = j.at("hyperparams");
    m.hyperparams.n_estimators = hp.at("n_estimators").get<int>();
    m.hyperparams.max_depth = hp.at("max_depth").get<int>();
    m.hyperparams.learning_rate = hp.at("learning_rate").get<double>();
    m.hyperparams.l2_lambda = hp.at("l2_lambda").get<double>();
    m.hyperparams.min_child_weight = hp.at("min_child_weight").get<double>();
    m.hyperparams.decision_threshold = hp.at("decision_threshold").get<double>();
    m.hyperparams.validate();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.base_score_logit = j.at("base_score_logit").get<double>();
    m.feature_names = j.at("feature_names").get<std::array<std::string, kFeatureCount>>();
    if (m.feature_names != feature_names()) throw Error(ErrorCode::CorruptModelFile, "feature names do not match");
    m.scaler = scaler_from_json(j.at("scaler").dump());
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from_json(t, nodes, 0);
      m.trees.emplace_back(std::move(nodes));
    }
    if (static_cast<int>(m.trees.size()) > m.hyperparams.n_estimators) {
      throw Error(ErrorCode::CorruptModelFile, "more trees than n_estimators");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModelFile, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaVersionMismatch || e.code() == ErrorCode::CorruptModelFile) throw;
    throw Error(ErrorCode::CorruptModelFile, e.what());
  }
}

void save_model(const Ensemble& model, const std::filesystem::path& path) { csv::write_text(path, to_json(model)); }

Ensemble load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingArtifact, "model file " + path.string());
  return from_json(csv::read_text(path));
}

}  // namespace alphaforge::gbdt
