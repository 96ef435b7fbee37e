#include "alphaforge/strategy.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "alphaforge/error.hpp"
#include "alphaforge/log.hpp"
#include "alphaforge/sentiment.hpp"

namespace alphaforge {

std::string_view to_string(StrategyMode mode) { return mode == StrategyMode::Hybrid ? "hybrid" : "baseline"; }

StrategyMode parse_strategy_mode(std::string_view text) {
  if (text == "hybrid") return StrategyMode::Hybrid;
  if (text == "baseline") return StrategyMode::Baseline;
  throw Error(ErrorCode::Config, "unknown strategy mode '" + std::string(text) + "'");
}

std::string_view to_string(TradeAction::Kind kind) {
  switch (kind) {
    case TradeAction::Kind::Hold: return "HOLD";
    case TradeAction::Kind::Buy: return "BUY";
    case TradeAction::Kind::SellAll: return "SELL";
  }
  return "?";
}

void StrategyConfig::validate() const {
  if (score_min < 0 || score_min > 3) throw Error(ErrorCode::Config, "score_min must lie in [0, 3]");
  if (!(risk_frac > 0 && risk_frac <= 1)) throw Error(ErrorCode::Config, "risk_frac must lie in (0, 1]");
  if (!(notional_cap_frac > 0 && notional_cap_frac <= 1)) {
    throw Error(ErrorCode::Config, "notional_cap_frac must lie in (0, 1]");
  }
  if (!(sentiment_gate >= -1 && sentiment_gate <= 1)) throw Error(ErrorCode::Config, "sentiment_gate must lie in [-1, 1]");
}

std::string StrategyConfig::to_json() const {
  nlohmann::json j{{"mode", to_string(mode)},
                   {"thresholds",
                    {{"score_min", score_min},
                     {"rsi_entry", rsi_entry},
                     {"rsi_exit", rsi_exit},
                     {"sentiment_gate", sentiment_gate},
                     {"risk_frac", risk_frac},
                     {"notional_cap_frac", notional_cap_frac}}}};
  return j.dump(2);
}

StrategyConfig StrategyConfig::from_json(std::string_view text) {
  StrategyConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("mode")) c.mode = parse_strategy_mode(j.at("mode").get<std::string>());
    const auto& t = j.contains("thresholds") ? j.at("thresholds") : j;
    c.score_min = t.value("score_min", c.score_min);
    c.rsi_entry = t.value("rsi_entry", c.rsi_entry);
    c.rsi_exit = t.value("rsi_exit", c.rsi_exit);
    c.sentiment_gate = t.value("sentiment_gate", c.sentiment_gate);
    c.risk_frac = t.value("risk_frac", c.risk_frac);
    c.notional_cap_frac = t.value("notional_cap_frac", c.notional_cap_frac);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  c.validate();
  return c;
}

HybridScore hybrid_score(int y_hat, double price, double ema50, double macd, double macd_signal, double rsi14,
                         double rsi_entry) {
  HybridScore s;
  s.ml_component = y_hat != 0 ? 1 : 0;
  s.trend_bonus = price > ema50 && macd > macd_signal ? 1 : 0;
  s.meanrev_bonus = rsi14 < rsi_entry ? 1 : 0;
  s.total = s.ml_component + s.trend_bonus + s.meanrev_bonus;
  return s;
}

std::int64_t size_position(double cash, double atr, double price, double risk_frac, double notional_cap_frac) {
  if (!(atr > 0)) throw Error(ErrorCode::ZeroAtr, "ATR must be positive");
  if (!(price > 0)) throw Error(ErrorCode::InvalidArgument, "price must be positive");
  if (!(cash > 0)) return 0;
  const double by_risk = std::floor(risk_frac * cash / atr);
  const double by_cap = std::floor(notional_cap_frac * cash / price);
  return static_cast<std::int64_t>(std::min(by_risk, by_cap));
}

namespace {

TradeAction sized_buy(const DecisionInputs& in, const StrategyConfig& cfg) {
  try {
    const auto shares = size_position(in.cash, in.atr14, in.price, cfg.risk_frac, cfg.notional_cap_frac);
    return shares > 0 ? TradeAction::buy(shares) : TradeAction::hold();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroAtr) throw;
    log().warn("{} {}: zero ATR, holding", in.ticker, format_date(in.date));
    return TradeAction::hold();
  }
}

}  // namespace

TradeAction decide(const DecisionInputs& in, const gbdt::Ensemble& model, const StrategyConfig& cfg) {
  const FeatureVector scaled = model.scaler.transform(in.features);
  const int y_hat = gbdt::predict(model, scaled);
  const HybridScore score = hybrid_score(y_hat, in.price, in.ema50, in.macd, in.macd_signal, in.rsi14, cfg.rsi_entry);
  const bool bullish = in.regime > 0;
  const bool gated = gate_blocks_entry(in.sentiment, cfg.sentiment_gate);

  if (!in.has_open_position) {
    if (bullish && in.price > in.ema200 && score.total >= cfg.score_min && !gated) return sized_buy(in, cfg);
    return TradeAction::hold();
  }
  if (y_hat == 0 || !bullish || in.rsi14 > cfg.rsi_exit || gated) return TradeAction::sell_all();
  return TradeAction::hold();
}

TradeAction decide_baseline(const DecisionInputs& in, const StrategyConfig& cfg) {
  if (!in.has_open_position) {
    if (in.sma50 > in.sma200 && in.rsi14 < cfg.rsi_entry) return sized_buy(in, cfg);
    return TradeAction::hold();
  }
  if (in.sma50 < in.sma200 || in.rsi14 > cfg.rsi_exit) return TradeAction::sell_all();
  return TradeAction::hold();
}

Decider make_decider(const StrategyConfig& cfg, const gbdt::Ensemble* model) {
  cfg.validate();
  if (cfg.mode == StrategyMode::Baseline) {
    return [cfg](const DecisionInputs& in) { return decide_baseline(in, cfg); };
  }
  if (!model) throw Error(ErrorCode::Config, "hybrid mode needs a trained model");
  return [cfg, model](const DecisionInputs& in) { return decide(in, *model, cfg); };
}

}  // namespace alphaforge
