#include "alphaforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace alphaforge {

const std::array<Field, kFeatureCount>& feature_fields() {
  static constexpr std::array<Field, kFeatureCount> fields{Field::Ema50, Field::Ema200,  Field::EmaRatio, Field::Macd,
                                                           Field::MacdSignal, Field::MacdHist, Field::Rsi14,
                                                           Field::BbWidth, Field::Atr14, Field::Vol20};
  return fields;
}

std::array<std::string, kFeatureCount> feature_names() {
  std::array<std::string, kFeatureCount> names;
  for (int i = 0; i < kFeatureCount; ++i) names[static_cast<std::size_t>(i)] = field_name(feature_fields()[static_cast<std::size_t>(i)]);
  return names;
}

std::optional<FeatureVector> feature_vector(const IndicatorFrame& frame, Eigen::Index row) {
  FeatureVector x;
  for (int i = 0; i < kFeatureCount; ++i) {
    const Field f = feature_fields()[static_cast<std::size_t>(i)];
    if (!frame.defined(row, f)) return std::nullopt;
    x(i) = frame(row, f);
    if (!std::isfinite(x(i))) return std::nullopt;
  }
  return x;
}

std::vector<LabeledDate> make_labels(const BarSeries& series) {
  if (series.size() < 2) throw Error(ErrorCode::SeriesTooShort, "labels need at least two bars");
  std::vector<LabeledDate> out;
  out.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    out.push_back({series[i].date, series[i + 1].close - series[i].close > 0 ? 1 : 0});
  }
  return out;
}

FeatureMatrix transform(const ScalerParams& scaler, const FeatureMatrix& rows) {
  FeatureMatrix out(rows.rows(), kFeatureCount);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out.row(r) = scaler.transform(rows.row(r).transpose()).transpose();
  }
  return out;
}

std::string scaler_to_json(const ScalerParams& s) {
  nlohmann::json j;
  j["features"] = feature_names();
  j["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + kFeatureCount);
  j["std"] = std::vector<double>(s.std.data(), s.std.data() + kFeatureCount);
  j["constant_flags"] = s.constant;
  j["fitted_rows"] = s.fitted_rows;
  return j.dump();
}

ScalerParams scaler_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("features").get<std::array<std::string, kFeatureCount>>() != feature_names()) {
    throw Error(ErrorCode::InvalidArgument, "scaler feature names do not match the pipeline order");
  }
  ScalerParams s;
  const auto mean = j.at("mean").get<std::array<double, kFeatureCount>>();
  const auto std = j.at("std").get<std::array<double, kFeatureCount>>();
  for (int i = 0; i < kFeatureCount; ++i) {
    s.mean(i) = mean[static_cast<std::size_t>(i)];
    s.std(i) = std[static_cast<std::size_t>(i)];
    if (!(s.std(i) > 0)) throw Error(ErrorCode::InvalidArgument, "scaler std must be positive");
  }
  s.constant = j.at("constant_flags").get<std::array<bool, kFeatureCount>>();
  s.fitted_rows = j.value("fitted_rows", std::size_t{0});
  return s;
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& indices) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), kFeatureCount);
  out.labels.resize(static_cast<Eigen::Index>(indices.size()));
  out.keys.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = indices[k];
    const auto r = static_cast<Eigen::Index>(k);
    out.keys.push_back(keys[static_cast<std::size_t>(i)]);
    out.features.row(r) = features.row(i);
    out.labels(r) = labels(i);
  }
  return out;
}

Dataset build_dataset(const Universe& universe, const FrameMap& frames, DateRange range) {
  std::vector<RowKey> keys;
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  for (const auto& [ticker, series] : universe.series()) {
    const auto it = frames.find(ticker);
    if (it == frames.end()) continue;
    const IndicatorFrame& frame = it->second;
    if (frame.rows() != static_cast<Eigen::Index>(series.size())) {
      throw Error(ErrorCode::InvalidArgument, ticker + ": frame does not match its series");
    }
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
      if (!range.contains(series[i].date) || !range.contains(series[i + 1].date)) continue;
      const auto x = feature_vector(frame, static_cast<Eigen::Index>(i));
      if (!x) continue;
      keys.push_back({ticker, series[i].date});
      rows.push_back(*x);
      labels.push_back(series[i + 1].close - series[i].close > 0 ? 1 : 0);
    }
  }
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyDataset,
                "no labelable rows in [" + format_date(range.start) + ", " + format_date(range.end) + ")");
  }
  Dataset d;
  d.keys = std::move(keys);
  d.features.resize(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  d.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.features.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    d.labels(static_cast<Eigen::Index>(i)) = labels[i];
  }
  return d;
}

std::pair<Dataset, Dataset> chronological_split(const Dataset& data, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  const auto n = static_cast<std::size_t>(data.size());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return data.keys[static_cast<std::size_t>(a)].date < data.keys[static_cast<std::size_t>(b)].date;
  });
  const auto target = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));
  if (n < 2 || target == 0) throw Error(ErrorCode::DegenerateSplit, "dataset too small to split");
  const Date cut = data.keys[static_cast<std::size_t>(order[target - 1])].date;

  std::vector<Eigen::Index> train, test;
  for (std::size_t i = 0; i < n; ++i) {
    (data.keys[i].date <= cut ? train : test).push_back(static_cast<Eigen::Index>(i));
  }
  if (train.empty() || test.empty()) throw Error(ErrorCode::DegenerateSplit, "chronological split left a side empty");
  return {data.subset(train), data.subset(test)};
}

}  // namespace alphaforge
