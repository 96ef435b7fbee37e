#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "alphaforge/date.hpp"
#include "alphaforge/features.hpp"
#include "alphaforge/gbdt.hpp"

namespace alphaforge {

enum class StrategyMode { Hybrid, Baseline };

std::string_view to_string(StrategyMode mode);
StrategyMode parse_strategy_mode(std::string_view text);

struct StrategyConfig {
  StrategyMode mode = StrategyMode::Hybrid;
  int score_min = 2;
  double rsi_entry = 30.0;
  double rsi_exit = 70.0;
  double sentiment_gate = kSentimentGateDefault;
  double risk_frac = 0.01;
  double notional_cap_frac = 0.1;

  static constexpr double kSentimentGateDefault = -0.70;

  void validate() const;
  std::string to_json() const;
  static StrategyConfig from_json(std::string_view text);
};

/// Everything one decision may look at for (ticker, date). Values come only
/// from data dated on or before `date`.
struct DecisionInputs {
  std::string ticker;
  Date date;
  double price = 0.0;  // close P_t
  FeatureVector features = FeatureVector::Zero();  // raw X_t
  double ema50 = 0.0;
  double ema200 = 0.0;
  double macd = 0.0;
  double macd_signal = 0.0;
  double rsi14 = 0.0;
  double atr14 = 0.0;
  double sma50 = 0.0;
  double sma200 = 0.0;
  int regime = -1;  // +1 bullish, -1 bearish
  std::optional<double> sentiment;
  double cash = 0.0;
  bool has_open_position = false;
};

struct TradeAction {
  enum class Kind { Hold, Buy, SellAll };
  Kind kind = Kind::Hold;
  std::int64_t shares = 0;

  static TradeAction hold() { return {}; }
  static TradeAction buy(std::int64_t shares) { return {Kind::Buy, shares}; }
  static TradeAction sell_all() { return {Kind::SellAll, 0}; }

  friend bool operator==(const TradeAction&, const TradeAction&) = default;
};

std::string_view to_string(TradeAction::Kind kind);

struct HybridScore {
  int ml_component = 0;
  int trend_bonus = 0;
  int meanrev_bonus = 0;
  int total = 0;
};

/// score = y_hat; +1 if price > ema50 and macd > signal; +1 if rsi < rsi_entry.
HybridScore hybrid_score(int y_hat, double price, double ema50, double macd, double macd_signal, double rsi14,
                         double rsi_entry = 30.0);

/// min(floor(risk_frac*cash/atr), floor(cap_frac*cash/price)). Throws ZeroAtr
/// when atr <= 0.
std::int64_t size_position(double cash, double atr, double price, double risk_frac = 0.01,
                           double notional_cap_frac = 0.1);

/// Hybrid rule: standardize, predict, score, then entry (no position) or
/// exit (open position). A sentiment breach blocks entries and forces exits.
TradeAction decide(const DecisionInputs& in, const gbdt::Ensemble& model, const StrategyConfig& cfg = {});

/// SMA-50/200 crossover with RSI(14) entries; no model, sentiment or regime.
TradeAction decide_baseline(const DecisionInputs& in, const StrategyConfig& cfg = {});

using Decider = std::function<TradeAction(const DecisionInputs&)>;

/// Binds the configured mode. `model` must outlive the returned decider and
/// is required for the hybrid mode.
Decider make_decider(const StrategyConfig& cfg, const gbdt::Ensemble* model);

}  // namespace alphaforge
