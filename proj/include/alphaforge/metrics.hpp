#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "alphaforge/backtester.hpp"
#include "alphaforge/date.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/market_data.hpp"

namespace alphaforge {

inline constexpr double kTradingDaysPerYear = 252.0;
/// Return standard deviations at or below this are treated as zero.
inline constexpr double kZeroVolatility = 1e-12;

/// (final/initial - 1) * 100.
double total_return(double initial, double final_value);
/// ((final/initial)^(1/years) - 1) * 100.
double cagr(double initial, double final_value, double years);

/// Worst peak-to-trough decline in percent (<= 0).
template <typename Derived>
typename Derived::Scalar max_drawdown(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  if (values.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty equity curve");
  Scalar peak = values(0);
  Scalar worst = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values(i) > 0)) throw Error(ErrorCode::InvalidArgument, "equity values must be positive");
    peak = std::max(peak, values(i));
    worst = std::min(worst, (values(i) / peak - Scalar(1)) * Scalar(100));
  }
  return worst;
}

/// Daily simple returns of an equity series (length n - 1).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> simple_returns(const Eigen::MatrixBase<Derived>& values) {
  const Eigen::Index n = values.size();
  if (n < 2) return {};
  return values.tail(n - 1).cwiseQuotient(values.head(n - 1)).array() - typename Derived::Scalar(1);
}

/// Annualized Sharpe ratio of daily simple returns: mean / sample std *
/// sqrt(252), risk-free rate 0. Zero when the returns have no spread.
template <typename Derived>
typename Derived::Scalar sharpe(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  if (values.size() < 3) throw Error(ErrorCode::InvalidArgument, "sharpe needs at least three equity points");
  const auto r = simple_returns(values);
  const Scalar mean = r.mean();
  const Scalar sd = std::sqrt((r.array() - mean).square().sum() / Scalar(r.size() - 1));
  if (!(sd > kZeroVolatility)) return Scalar(0);
  return mean / sd * std::sqrt(Scalar(kTradingDaysPerYear));
}

struct TradeStats {
  double win_ratio_pct = 0.0;
  double avg_holding_days = 0.0;
  int n_round_trips = 0;
};

/// Round trips are BUY...full SELL cycles per ticker; adds merge into the
/// open trip. A trip wins iff sell proceeds exceed total buy cost. Holding
/// time is in calendar days from the first buy to the sell. Throws
/// UnmatchedSell on a sell with no open trip or a partial sell.
TradeStats trade_stats(std::span<const TradeRecord> trades);

struct MetricsReport {
  double final_value = 0.0;
  double remaining_cash = 0.0;
  double positions_value = 0.0;
  double total_return_pct = 0.0;
  double cagr_pct = 0.0;
  double max_drawdown_pct = 0.0;
  double sharpe = 0.0;
  double win_ratio_pct = 0.0;
  double avg_holding_days = 0.0;
  int n_round_trips = 0;
};

/// `years` is the CAGR horizon; callers pass the backtest range length.
MetricsReport compute_report(std::span<const EquityPoint> equity, std::span<const TradeRecord> trades,
                             double initial_cash, double years);

std::string format_portfolio_log(const MetricsReport& r);
void write_portfolio_log(const MetricsReport& r, const std::filesystem::path& path);
std::string report_to_json(const MetricsReport& r);

struct BenchmarkRow {
  std::string name;
  double final_value = 0.0;
  double return_pct = 0.0;
  double cagr_pct = 0.0;
};

/// Buy-and-hold of each index over `range`, normalized to `initial`; rows
/// sorted by return, best first. Throws MissingRangeData when an index has
/// fewer than two bars in the range.
std::vector<BenchmarkRow> benchmark_compare(const std::map<std::string, BarSeries>& indices, double initial,
                                            DateRange range);
void write_benchmark_csv(std::span<const BenchmarkRow> rows, const std::filesystem::path& path);

/// date, strategy_value, then one normalized column per index (the latest
/// close on or before each date; empty before an index's first bar).
void write_plot_data_csv(std::span<const EquityPoint> equity, const std::map<std::string, BarSeries>& indices,
                         double initial, DateRange range, const std::filesystem::path& path);

}  // namespace alphaforge
