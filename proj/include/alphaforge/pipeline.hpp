#pragma once

#include <cstdint>
#include <filesystem>

#include "alphaforge/backtester.hpp"
#include "alphaforge/features.hpp"
#include "alphaforge/gbdt.hpp"
#include "alphaforge/indicators.hpp"
#include "alphaforge/metrics.hpp"
#include "alphaforge/sentiment.hpp"
#include "alphaforge/strategy.hpp"

namespace alphaforge {

struct TrainOutcome {
  gbdt::Ensemble model;
  double train_accuracy = 0.0;
  double heldout_accuracy = 0.0;
  Eigen::Index train_rows = 0;
  Eigen::Index heldout_rows = 0;
};

/// Pools rows inside `train_range`, splits them chronologically, fits the
/// scaler and the classifier on the earlier part and scores both parts.
TrainOutcome train_direction_model(const Universe& universe, const FrameMap& frames, DateRange train_range,
                                   double train_fraction, const gbdt::Hyperparams& hp, std::uint64_t seed);

struct StrategyRun {
  BacktestResult result;
  MetricsReport report;
};

/// Backtest one strategy mode and summarize it. `model` may be null in
/// baseline mode.
StrategyRun run_strategy(const Universe& universe, const FrameMap& frames, const SentimentBook& sentiment,
                         const gbdt::Ensemble* model, const StrategyConfig& strategy, const BacktestConfig& config);

/// trades.csv, equity.csv and portfolio_log.txt under `dir`.
void write_run_outputs(const StrategyRun& run, const std::filesystem::path& dir);

}  // namespace alphaforge
