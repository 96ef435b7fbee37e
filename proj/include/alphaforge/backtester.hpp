#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "alphaforge/date.hpp"
#include "alphaforge/indicators.hpp"
#include "alphaforge/market_data.hpp"
#include "alphaforge/sentiment.hpp"
#include "alphaforge/strategy.hpp"

namespace alphaforge {

enum class Side { Buy, Sell };

std::string_view to_string(Side side);
Side parse_side(std::string_view text);

struct Position {
  std::int64_t shares = 0;
  double avg_cost = 0.0;
  Date entry_date;
};

struct TradeRecord {
  Date date;
  std::string symbol;
  Side action = Side::Buy;
  std::int64_t size = 0;
  double fill_price = 0.0;
  double portfolio_value = 0.0;

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

struct EquityPoint {
  Date date;
  double cash = 0.0;
  double positions_value = 0.0;
  double total_value = 0.0;

  friend bool operator==(const EquityPoint&, const EquityPoint&) = default;
};

/// Cash ledger, open positions and the append-only trade log.
struct PortfolioState {
  double cash = 0.0;
  std::map<std::string, Position> positions;
  /// Latest observed price per ticker, used to value positions.
  std::map<std::string, double> marks;
  double realized_pnl = 0.0;  // net of commissions
  double commissions = 0.0;
  std::vector<TradeRecord> trades;
  std::vector<EquityPoint> equity_curve;

  double positions_value() const;
  double total_value() const { return cash + positions_value(); }
};

struct Order {
  std::string ticker;
  Side side = Side::Buy;
  std::int64_t shares = 0;
  Date decided_on;
};

/// Fills `order` at `fill_price` on `fill_date`, updating cash, the position
/// (weighted average cost on adds) and the trade log. Throws
/// OverdraftRejected when a buy costs more than the available cash, and
/// InvalidArgument when selling more than is held.
void execute_order(PortfolioState& state, const Order& order, double fill_price, Date fill_date,
                   double commission = 0.0);

struct BacktestConfig {
  double initial_cash = 100000.0;
  DateRange range{make_date(2023, 1, 1), make_date(2025, 1, 1)};
  double commission = 0.0;    // flat, per order
  double slippage_bps = 0.0;  // added to buys, subtracted from sells

  void validate() const;
};

/// One non-hold decision, with the inputs used to size it.
struct DecisionRecord {
  Date date;
  std::string ticker;
  TradeAction action;
  double price = 0.0;
  double atr = 0.0;
  double cash = 0.0;
};

struct BacktestResult {
  PortfolioState state;
  std::vector<DecisionRecord> decisions;
  int overdrafts_rejected = 0;
  int orders_unfilled = 0;
  std::vector<std::string> warmup_skipped;  // tickers not ready at range start

  const std::vector<TradeRecord>& trades() const { return state.trades; }
  const std::vector<EquityPoint>& equity_curve() const { return state.equity_curve; }
};

/// Daily event loop over the trading calendar within config.range. For each
/// day: fill queued orders at the open, mark at the close, then ask
/// `decider` about every ready ticker in alphabetical order and queue the
/// resulting orders for the next available open. Buys are sized against
/// cash net of buys already queued that day. Orders still queued when the
/// range ends are dropped.
BacktestResult run_backtest(const Universe& universe, const FrameMap& frames, const SentimentBook& sentiment,
                            const Decider& decider, const BacktestConfig& config);

void write_trade_log_csv(std::span<const TradeRecord> trades, const std::filesystem::path& path);
std::vector<TradeRecord> load_trade_log_csv(const std::filesystem::path& path);
void write_equity_csv(std::span<const EquityPoint> curve, const std::filesystem::path& path);
std::vector<EquityPoint> load_equity_csv(const std::filesystem::path& path);

}  // namespace alphaforge
