#include "alphaforge/pipeline.hpp"

namespace alphaforge {

TrainOutcome train_direction_model(const Universe& universe, const FrameMap& frames, DateRange train_range,
                                   double train_fraction, const gbdt::Hyperparams& hp, std::uint64_t seed) {
  const Dataset pooled = build_dataset(universe, frames, train_range);
  const auto [train, heldout] = chronological_split(pooled, train_fraction);
  TrainOutcome out;
  out.model = gbdt::fit(train, hp, seed);
  out.train_accuracy = gbdt::accuracy(out.model, train);
  out.heldout_accuracy = gbdt::accuracy(out.model, heldout);
  out.train_rows = train.size();
  out.heldout_rows = heldout.size();
  return out;
}

StrategyRun run_strategy(const Universe& universe, const FrameMap& frames, const SentimentBook& sentiment,
                         const gbdt::Ensemble* model, const StrategyConfig& strategy, const BacktestConfig& config) {
  StrategyRun run;
  run.result = run_backtest(universe, frames, sentiment, make_decider(strategy, model), config);
  if (run.result.equity_curve().empty()) {
    throw Error(ErrorCode::MissingRangeData, "no trading days inside the backtest range");
  }
  run.report = compute_report(run.result.equity_curve(), run.result.trades(), config.initial_cash, config.range.years());
  return run;
}

void write_run_outputs(const StrategyRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_trade_log_csv(run.result.trades(), dir / "trades.csv");
  write_equity_csv(run.result.equity_curve(), dir / "equity.csv");
  write_portfolio_log(run.report, dir / "portfolio_log.txt");
}

}  // namespace alphaforge
