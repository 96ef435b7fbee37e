#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "alphaforge/date.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/indicators.hpp"
#include "alphaforge/market_data.hpp"

namespace alphaforge {

inline constexpr int kFeatureCount = 10;

using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>;

/// Model input order: ema50, ema200, ema_ratio, macd, macd_signal,
/// macd_hist, rsi14, bb_width, atr14, vol20.
const std::array<Field, kFeatureCount>& feature_fields();
std::array<std::string, kFeatureCount> feature_names();

/// Raw feature vector at `row`, or nullopt while any feature is in warm-up.
std::optional<FeatureVector> feature_vector(const IndicatorFrame& frame, Eigen::Index row);

struct LabeledDate {
  Date date;
  int label = 0;
};

/// label(t) = 1 iff close(t+1) > close(t); the last date gets no label.
std::vector<LabeledDate> make_labels(const BarSeries& series);

/// Per-feature z-score statistics fitted on training rows.
struct ScalerParams {
  FeatureVector mean = FeatureVector::Zero();
  FeatureVector std = FeatureVector::Ones();
  std::array<bool, kFeatureCount> constant{};
  std::size_t fitted_rows = 0;

  FeatureVector transform(const FeatureVector& x) const { return (x - mean).cwiseQuotient(std); }
  FeatureVector inverse(const FeatureVector& z) const { return mean + std.cwiseProduct(z); }
  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

/// Standard deviations at or below this fraction of max(1, |mean|) are
/// treated as zero variance: std is clamped to 1 and the feature flagged.
inline constexpr double kConstantFeatureTolerance = 1e-12;

/// Mean and population standard deviation per column. Throws TooFewRows
/// for fewer than two rows.
template <typename Derived>
ScalerParams fit_scaler(const Eigen::MatrixBase<Derived>& rows) {
  static_assert(Derived::ColsAtCompileTime == kFeatureCount || Derived::ColsAtCompileTime == Eigen::Dynamic);
  if (rows.rows() < 2) throw Error(ErrorCode::TooFewRows, "scaler needs at least two rows");
  if (rows.cols() != kFeatureCount) throw Error(ErrorCode::InvalidArgument, "scaler expects 10 feature columns");
  ScalerParams p;
  p.fitted_rows = static_cast<std::size_t>(rows.rows());
  for (int j = 0; j < kFeatureCount; ++j) {
    const auto col = rows.col(j).array();
    const double mean = col.mean();
    const double sd = std::sqrt((col - mean).square().mean());
    p.mean(j) = mean;
    if (sd <= kConstantFeatureTolerance * std::max(1.0, std::abs(mean))) {
      p.std(j) = 1.0;
      p.constant[static_cast<std::size_t>(j)] = true;
    } else {
      p.std(j) = sd;
    }
  }
  return p;
}

inline FeatureVector transform(const ScalerParams& scaler, const FeatureVector& x) { return scaler.transform(x); }
FeatureMatrix transform(const ScalerParams& scaler, const FeatureMatrix& rows);

std::string scaler_to_json(const ScalerParams& scaler);
ScalerParams scaler_from_json(std::string_view text);

struct RowKey {
  std::string ticker;
  Date date;
  friend bool operator==(const RowKey&, const RowKey&) = default;
};

/// Pooled multi-ticker rows: raw (unscaled) features and next-day labels.
struct Dataset {
  std::vector<RowKey> keys;
  FeatureMatrix features;
  Eigen::VectorXi labels;

  Eigen::Index size() const noexcept { return features.rows(); }
  bool empty() const noexcept { return features.rows() == 0; }
  /// Rows at `indices`, in the given order.
  Dataset subset(const std::vector<Eigen::Index>& indices) const;
};

/// Rows for every ticker (alphabetical) and date (ascending) such that the
/// date and the following bar both lie in `range` and all ten features are
/// defined. Throws EmptyDataset when no row qualifies.
Dataset build_dataset(const Universe& universe, const FrameMap& frames, DateRange range);

/// Chronological split of a pooled dataset: rows dated up to the date that
/// completes ceil(fraction * n) rows go first, everything later second.
/// Throws DegenerateSplit if either side would be empty.
std::pair<Dataset, Dataset> chronological_split(const Dataset& data, double train_fraction);

}  // namespace alphaforge
