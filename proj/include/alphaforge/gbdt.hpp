#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "alphaforge/features.hpp"

namespace alphaforge::gbdt {

struct Hyperparams {
  int n_estimators = 200;
  int max_depth = 6;
  double learning_rate = 0.05;
  double l2_lambda = 1.0;
  double min_child_weight = 1.0;
  double decision_threshold = 0.5;

  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Flat tree node. Internal nodes route x[feature] < split left, otherwise
/// right; NaN follows the default direction (always left).
struct TreeNode {
  int feature = -1;
  double split = 0.0;
  int left = -1;
  int right = -1;
  bool default_left = true;
  double weight = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  /// Leaf weight reached by `x`.
  template <typename Derived>
  double evaluate(const Eigen::MatrixBase<Derived>& x) const {
    int i = 0;
    while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
      const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
      const double v = x(n.feature);
      const bool go_left = std::isnan(v) ? n.default_left : v < n.split;
      i = go_left ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(i)].weight;
  }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  /// Number of split levels on the longest root-to-leaf path.
  int depth() const;
  int leaf_count() const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Trained direction classifier: trees over standardized features plus the
/// scaler fitted on the same training rows.
struct Ensemble {
  std::vector<Tree> trees;
  Hyperparams hyperparams;
  double learning_rate = 0.05;
  double base_score_logit = 0.0;
  std::array<std::string, kFeatureCount> feature_names = alphaforge::feature_names();
  ScalerParams scaler;

  /// base_score_logit + lr * sum of tree outputs for a standardized vector.
  template <typename Derived>
  double margin(const Eigen::MatrixBase<Derived>& x) const {
    double m = base_score_logit;
    for (const auto& t : trees) m += learning_rate * t.evaluate(x);
    return m;
  }

  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

double sigmoid(double margin) noexcept;
/// Mean negative log-likelihood of labels under the given margins.
double logistic_loss(const Eigen::VectorXd& margins, const Eigen::VectorXi& labels);

/// Per-round training diagnostics; loss[0] is the base-score loss and
/// loss[k] the loss after k trees.
struct TrainingTrace {
  std::vector<double> loss;
};

/// Newton boosting on logistic loss with exact greedy splits over
/// midpoints of consecutive distinct values. `features` must already be
/// standardized. Gain ties go to the lowest feature index, then the lowest
/// split value. `seed` is accepted for interface stability; the exact
/// algorithm draws no random numbers.
Ensemble train(const FeatureMatrix& features, const Eigen::VectorXi& labels, const Hyperparams& hp,
               std::uint64_t seed = 0, TrainingTrace* trace = nullptr);

/// Fits the scaler on `data`, trains on the standardized rows and embeds the
/// scaler in the returned model.
Ensemble fit(const Dataset& data, const Hyperparams& hp, std::uint64_t seed = 0, TrainingTrace* trace = nullptr);

/// Probability of an up move for a standardized feature vector, in (0, 1).
double predict_proba(const Ensemble& model, const FeatureVector& x);
/// 1 iff predict_proba >= decision_threshold.
int predict(const Ensemble& model, const FeatureVector& x);

/// Accuracy of `predict` over raw rows (the embedded scaler is applied).
double accuracy(const Ensemble& model, const Dataset& data);

inline constexpr int kModelSchemaVersion = 1;

std::string to_json(const Ensemble& model);
/// Throws CorruptModelFile on malformed input, SchemaVersionMismatch on a
/// different schema version.
Ensemble from_json(std::string_view text);
void save_model(const Ensemble& model, const std::filesystem::path& path);
Ensemble load_model(const std::filesystem::path& path);

}  // namespace alphaforge::gbdt
