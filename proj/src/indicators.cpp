#include "alphaforge/indicators.hpp"

#include <sstream>

#include "alphaforge/csv.hpp"
#include "alphaforge/log.hpp"

namespace alphaforge {

std::string_view field_name(Field f) {
  static constexpr std::array<std::string_view, kFieldCount> names{
      "ema50",   "ema200", "ema_ratio", "macd",      "macd_signal", "macd_hist", "rsi14",  "bb_upper",
      "bb_mid",  "bb_lower", "bb_width", "atr14",    "vol20",       "regime",    "sma50",  "sma200"};
  return names[static_cast<std::size_t>(f)];
}

Eigen::Index IndicatorParams::longest() const {
  return std::max({ema_fast, ema_slow, macd_fast, macd_slow, macd_slow + macd_signal - 1, rsi + 1, bollinger, atr,
                   volatility + 1, regime + 1, sma_fast, sma_slow});
}

void IndicatorParams::validate() const {
  for (const Eigen::Index p : {ema_fast, ema_slow, macd_fast, macd_slow, macd_signal, rsi, bollinger, atr, volatility,
                               regime, sma_fast, sma_slow}) {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "indicator periods must be positive");
  }
  if (!(bollinger_k > 0)) throw Error(ErrorCode::InvalidArgument, "bollinger multiplier must be positive");
}

Eigen::Index IndicatorFrame::ready_index() const {
  Eigen::Index r = 0;
  for (const auto w : warmup) r = std::max(r, w);
  return r;
}

IndicatorFrame compute_indicators(const BarSeries& series, const IndicatorParams& params) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(series.size());
  if (n < params.longest()) {
    throw Error(ErrorCode::SeriesTooShort, series.ticker() + " has " + std::to_string(n) + " bars, needs " +
                                               std::to_string(params.longest()));
  }
  const Eigen::VectorXd close = series.closes();
  const Eigen::VectorXd high = series.highs();
  const Eigen::VectorXd low = series.lows();

  IndicatorFrame f;
  f.ticker = series.ticker();
  f.dates = series.dates();
  f.values.resize(n, kFieldCount);

  const auto set = [&](Field field, const Eigen::VectorXd& v, Eigen::Index warm) {
    f.values.col(static_cast<int>(field)) = v;
    f.warmup[static_cast<std::size_t>(field)] = warm;
  };

  const Eigen::VectorXd ema_fast = ema(close, params.ema_fast);
  const Eigen::VectorXd ema_slow = ema(close, params.ema_slow);
  set(Field::Ema50, ema_fast, params.ema_fast - 1);
  set(Field::Ema200, ema_slow, params.ema_slow - 1);
  set(Field::EmaRatio, ema_fast.cwiseQuotient(ema_slow), std::max(params.ema_fast, params.ema_slow) - 1);

  const auto m = macd(close, params.macd_fast, params.macd_slow, params.macd_signal);
  Eigen::VectorXd line = m.line;
  line.head(m.line_warmup).setConstant(undefined_v<double>);
  set(Field::Macd, line, m.line_warmup);
  set(Field::MacdSignal, m.signal, m.signal_warmup);
  set(Field::MacdHist, m.histogram, m.signal_warmup);

  set(Field::Rsi14, rsi(close, params.rsi), params.rsi);

  const auto bb = bollinger(close, params.bollinger, params.bollinger_k);
  set(Field::BbUpper, bb.upper, params.bollinger - 1);
  set(Field::BbMid, bb.mid, params.bollinger - 1);
  set(Field::BbLower, bb.lower, params.bollinger - 1);
  set(Field::BbWidth, bb.width, params.bollinger - 1);

  set(Field::Atr14, atr(high, low, close, params.atr), params.atr - 1);
  set(Field::Vol20, rolling_stddev(pct_change(close), params.volatility, 1), params.volatility);
  set(Field::Regime, detect_regime(close, params.regime), params.regime);
  set(Field::Sma50, sma(close, params.sma_fast), params.sma_fast - 1);
  set(Field::Sma200, sma(close, params.sma_slow), params.sma_slow - 1);
  return f;
}

FrameMap compute_frames(const Universe& universe, const IndicatorParams& params, std::vector<std::string>* skipped) {
  FrameMap frames;
  for (const auto& [ticker, series] : universe.series()) {
    try {
      frames.emplace(ticker, compute_indicators(series, params));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SeriesTooShort) throw;
      log().warn("skipping {}: {}", ticker, e.what());
      if (skipped) skipped->push_back(ticker);
    }
  }
  return frames;
}

void write_indicator_csv(const IndicatorFrame& frame, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "date";
  for (int c = 0; c < kDumpFieldCount; ++c) out << ',' << field_name(static_cast<Field>(c));
  out << '\n';
  for (Eigen::Index r = 0; r < frame.rows(); ++r) {
    out << format_date(frame.dates[static_cast<std::size_t>(r)]);
    for (int c = 0; c < kDumpFieldCount; ++c) {
      out << ',';
      const auto field = static_cast<Field>(c);
      if (!frame.defined(r, field)) continue;
      if (field == Field::Regime) {
        out << static_cast<int>(frame(r, field));
      } else {
        out << csv::format_double(frame(r, field));
      }
    }
    out << '\n';
  }
  csv::write_text(path, out.str());
}

}  // namespace alphaforge
