#include "alphaforge/backtester.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/log.hpp"

namespace alphaforge {

std::string_view to_string(Side side) { return side == Side::Buy ? "BUY" : "SELL"; }

Side parse_side(std::string_view text) {
  if (text == "BUY") return Side::Buy;
  if (text == "SELL") return Side::Sell;
  throw Error(ErrorCode::MalformedRow, "unknown trade action '" + std::string(text) + "'");
}

double PortfolioState::positions_value() const {
  double v = 0.0;
  for (const auto& [ticker, p] : positions) v += static_cast<double>(p.shares) * marks.at(ticker);
  return v;
}

void execute_order(PortfolioState& state, const Order& order, double fill_price, Date fill_date, double commission) {
  if (!(fill_price > 0)) throw Error(ErrorCode::InvalidArgument, "fill price must be positive");
  if (order.shares <= 0) throw Error(ErrorCode::InvalidArgument, "order size must be positive");
  const double notional = static_cast<double>(order.shares) * fill_price;
  if (order.side == Side::Buy) {
    const double cost = notional + commission;
    if (cost > state.cash) {
      throw Error(ErrorCode::OverdraftRejected, order.ticker + " buy of " + std::to_string(order.shares) + " costs " +
                                                    csv::format_double(cost) + " > cash " +
                                                    csv::format_double(state.cash));
    }
    state.cash -= cost;
    auto [it, fresh] = state.positions.try_emplace(order.ticker, Position{0, 0.0, fill_date});
    Position& p = it->second;
    const auto total = p.shares + order.shares;
    p.avg_cost = (static_cast<double>(p.shares) * p.avg_cost + notional) / static_cast<double>(total);
    p.shares = total;
  } else {
    const auto it = state.positions.find(order.ticker);
    if (it == state.positions.end() || it->second.shares < order.shares) {
      throw Error(ErrorCode::InvalidArgument, "selling more " + order.ticker + " than held");
    }
    Position& p = it->second;
    state.cash += notional - commission;
    state.realized_pnl += static_cast<double>(order.shares) * (fill_price - p.avg_cost);
    p.shares -= order.shares;
    if (p.shares == 0) state.positions.erase(it);
  }
  state.realized_pnl -= commission;
  state.commissions += commission;
  state.marks[order.ticker] = fill_price;
  state.trades.push_back({fill_date, order.ticker, order.side, order.shares, fill_price, state.total_value()});
}

void BacktestConfig::validate() const {
  if (!(initial_cash > 0)) throw Error(ErrorCode::Config, "initial_cash must be positive");
  if (range.empty()) throw Error(ErrorCode::Config, "backtest range is empty");
  if (!(commission >= 0)) throw Error(ErrorCode::Config, "commission must be non-negative");
  if (!(slippage_bps >= 0)) throw Error(ErrorCode::Config, "slippage must be non-negative");
}

namespace {

DecisionInputs make_inputs(const std::string& ticker, const Bar& bar, const IndicatorFrame& frame, Eigen::Index row) {
  DecisionInputs in;
  in.ticker = ticker;
  in.date = bar.date;
  in.price = bar.close;
  in.features = *feature_vector(frame, row);
  in.ema50 = frame(row, Field::Ema50);
  in.ema200 = frame(row, Field::Ema200);
  in.macd = frame(row, Field::Macd);
  in.macd_signal = frame(row, Field::MacdSignal);
  in.rsi14 = frame(row, Field::Rsi14);
  in.atr14 = frame(row, Field::Atr14);
  in.sma50 = frame(row, Field::Sma50);
  in.sma200 = frame(row, Field::Sma200);
  in.regime = frame(row, Field::Regime) > 0 ? 1 : -1;
  return in;
}

}  // namespace

BacktestResult run_backtest(const Universe& universe, const FrameMap& frames, const SentimentBook& sentiment,
                            const Decider& decider, const BacktestConfig& config) {
  config.validate();
  BacktestResult result;
  PortfolioState& state = result.state;
  state.cash = config.initial_cash;

  std::vector<Date> calendar;
  for (const Date d : universe.trading_calendar()) {
    if (config.range.contains(d)) calendar.push_back(d);
  }

  std::map<std::string, Order> pending;
  std::set<std::string> warned;
  const double slip = config.slippage_bps * 1e-4;

  for (const Date today : calendar) {
    // Orders decided on an earlier session fill at this session's open.
    for (const auto& [ticker, series] : universe.series()) {
      const auto idx = series.index_of(today);
      if (idx < 0) continue;
      state.marks[ticker] = series[static_cast<std::size_t>(idx)].open;
    }
    for (auto it = pending.begin(); it != pending.end();) {
      const auto& series = universe.at(it->first);
      const auto idx = series.index_of(today);
      if (idx < 0) {
        ++it;
        continue;
      }
      const double open = series[static_cast<std::size_t>(idx)].open;
      const double price = it->second.side == Side::Buy ? open * (1.0 + slip) : open * (1.0 - slip);
      try {
        execute_order(state, it->second, price, today, config.commission);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OverdraftRejected) throw;
        log().warn("{}: order rejected: {}", format_date(today), e.what());
        ++result.overdrafts_rejected;
      }
      // Mark at the raw open so slippage shows up as a cost.
      state.marks[it->first] = open;
      it = pending.erase(it);
    }

    for (const auto& [ticker, series] : universe.series()) {
      const auto idx = series.index_of(today);
      if (idx >= 0) state.marks[ticker] = series[static_cast<std::size_t>(idx)].close;
    }

    double reserved = 0.0;
    for (const auto& [ticker, series] : universe.series()) {
      const auto idx = series.index_of(today);
      if (idx < 0) continue;
      const auto frame_it = frames.find(ticker);
      if (frame_it == frames.end() || idx < frame_it->second.ready_index()) {
        if (warned.insert(ticker).second) {
          log().info("{}: insufficient history on {}, skipped until ready", ticker, format_date(today));
          result.warmup_skipped.push_back(ticker);
        }
        continue;
      }
      const Bar& bar = series[static_cast<std::size_t>(idx)];
      DecisionInputs in = make_inputs(ticker, bar, frame_it->second, idx);
      in.sentiment = sentiment.score(ticker, today);
      in.cash = std::max(0.0, state.cash - reserved);
      in.has_open_position = state.positions.count(ticker) != 0;

      const TradeAction action = decider(in);
      if (action.kind == TradeAction::Kind::Hold) continue;
      result.decisions.push_back({today, ticker, action, in.price, in.atr14, in.cash});
      if (action.kind == TradeAction::Kind::Buy) {
        if (in.has_open_position || action.shares <= 0) {
          throw Error(ErrorCode::InvalidArgument, "decider emitted an invalid buy for " + ticker);
        }
        pending[ticker] = Order{ticker, Side::Buy, action.shares, today};
        reserved += static_cast<double>(action.shares) * in.price;
      } else {
        if (!in.has_open_position) throw Error(ErrorCode::InvalidArgument, "decider sold flat " + ticker);
        pending[ticker] = Order{ticker, Side::Sell, state.positions.at(ticker).shares, today};
      }
    }

    const double positions = state.positions_value();
    state.equity_curve.push_back({today, state.cash, positions, state.cash + positions});
  }

  result.orders_unfilled = static_cast<int>(pending.size());
  if (!pending.empty()) log().info("{} orders still queued at range end were dropped", pending.size());
  return result;
}

void write_trade_log_csv(std::span<const TradeRecord> trades, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "date,symbol,action,size,fill_price,portfolio_value\n";
  for (const auto& t : trades) {
    out << format_date(t.date) << ',' << t.symbol << ',' << to_string(t.action) << ',' << t.size << ','
        << csv::format_double(t.fill_price) << ',' << csv::format_double(t.portfolio_value) << '\n';
  }
  csv::write_text(path, out.str());
}

std::vector<TradeRecord> load_trade_log_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingArtifact, "trade log " + path.string());
  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines.front() != "date,symbol,action,size,fill_price,portfolio_value") {
    throw Error(ErrorCode::MalformedRow, path.string() + ": bad trade log header");
  }
  std::vector<TradeRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = csv::split(lines[i]);
    if (f.size() != 6) throw Error(ErrorCode::MalformedRow, path.string() + ":" + std::to_string(i + 1));
    out.push_back({parse_date(f[0]), std::string(f[1]), parse_side(f[2]), csv::parse_int(f[3]),
                   csv::parse_double(f[4]), csv::parse_double(f[5])});
  }
  return out;
}

void write_equity_csv(std::span<const EquityPoint> curve, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "date,cash,positions_value,total_value\n";
  for (const auto& p : curve) {
    out << format_date(p.date) << ',' << csv::format_double(p.cash) << ',' << csv::format_double(p.positions_value)
        << ',' << csv::format_double(p.total_value) << '\n';
  }
  csv::write_text(path, out.str());
}

std::vector<EquityPoint> load_equity_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingArtifact, "equity curve " + path.string());
  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines.front() != "date,cash,positions_value,total_value") {
    throw Error(ErrorCode::MalformedRow, path.string() + ": bad equity curve header");
  }
  std::vector<EquityPoint> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = csv::split(lines[i]);
    if (f.size() != 4) throw Error(ErrorCode::MalformedRow, path.string() + ":" + std::to_string(i + 1));
    out.push_back({parse_date(f[0]), csv::parse_double(f[1]), csv::parse_double(f[2]), csv::parse_double(f[3])});
  }
  return out;
}

}  // namespace alphaforge
