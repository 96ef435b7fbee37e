#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "alphaforge/date.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/market_data.hpp"

namespace alphaforge {

// Indicator primitives operate on any dense Eigen column expression and
// return a plain vector of the same scalar. Positions before an
// indicator's warm-up index hold NaN; nothing is zero-filled.

template <typename Scalar>
using Series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
inline constexpr Scalar undefined_v = std::numeric_limits<Scalar>::quiet_NaN();

namespace detail {

inline void require_period(Eigen::Index period) {
  if (period < 1) throw Error(ErrorCode::InvalidArgument, "indicator period must be positive");
}

}  // namespace detail

/// Exponential moving average with multiplier 2/(n+1), seeded with x[start].
/// Defined from start + period - 1 onward.
template <typename Derived>
Series<typename Derived::Scalar> ema(const Eigen::MatrixBase<Derived>& x, Eigen::Index period,
                                     Eigen::Index start = 0) {
  using Scalar = typename Derived::Scalar;
  detail::require_period(period);
  const Eigen::Index n = x.size();
  Series<Scalar> out = Series<Scalar>::Constant(n, undefined_v<Scalar>);
  if (start >= n) return out;
  const Scalar alpha = Scalar(2) / Scalar(period + 1);
  Scalar value = x(start);
  for (Eigen::Index i = start; i < n; ++i) {
    if (i > start) value += alpha * (x(i) - value);
    if (i >= start + period - 1) out(i) = value;
  }
  return out;
}

/// Simple moving average over a trailing window.
template <typename Derived>
Series<typename Derived::Scalar> sma(const Eigen::MatrixBase<Derived>& x, Eigen::Index period,
                                     Eigen::Index start = 0) {
  using Scalar = typename Derived::Scalar;
  detail::require_period(period);
  const Eigen::Index n = x.size();
  Series<Scalar> out = Series<Scalar>::Constant(n, undefined_v<Scalar>);
  for (Eigen::Index i = start + period - 1; i < n; ++i) out(i) = x.segment(i - period + 1, period).mean();
  return out;
}

/// Trailing-window population standard deviation (two-pass per window).
template <typename Derived>
Series<typename Derived::Scalar> rolling_stddev(const Eigen::MatrixBase<Derived>& x, Eigen::Index period,
                                                Eigen::Index start = 0) {
  using Scalar = typename Derived::Scalar;
  detail::require_period(period);
  const Eigen::Index n = x.size();
  Series<Scalar> out = Series<Scalar>::Constant(n, undefined_v<Scalar>);
  for (Eigen::Index i = start + period - 1; i < n; ++i) {
    const auto window = x.segment(i - period + 1, period).array();
    const Scalar mean = window.mean();
    out(i) = std::sqrt((window - mean).square().mean());
  }
  return out;
}

/// One-period simple return x[i]/x[i-1] - 1; undefined at 0.
template <typename Derived>
Series<typename Derived::Scalar> pct_change(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  Series<Scalar> out = Series<Scalar>::Constant(n, undefined_v<Scalar>);
  for (Eigen::Index i = 1; i < n; ++i) out(i) = x(i) / x(i - 1) - Scalar(1);
  return out;
}

/// Wilder RSI. Averages are seeded with the plain mean of the first
/// `period` changes and then smoothed as avg = (avg*(n-1) + v)/n. Zero
/// average loss gives 100, zero average gain gives 0, and a window with no
/// movement at all gives 50. Defined from index `period`.
template <typename Derived>
Series<typename Derived::Scalar> rsi(const Eigen::MatrixBase<Derived>& close, Eigen::Index period = 14) {
  using Scalar = typename Derived::Scalar;
  detail::require_period(period);
  const Eigen::Index n = close.size();
  Series<Scalar> out = Series<Scalar>::Constant(n, undefined_v<Scalar>);
  if (n <= period) return out;
  const auto value = [](Scalar gain, Scalar loss) -> Scalar {
    if (loss == Scalar(0)) return gain == Scalar(0) ? Scalar(50) : Scalar(100);
    if (gain == Scalar(0)) return Scalar(0);
    return Scalar(100) - Scalar(100) / (Scalar(1) + gain / loss);
  };
  Scalar gain = 0;
  Scalar loss = 0;
  for (Eigen::Index i = 1; i <= period; ++i) {
    const Scalar d = close(i) - close(i - 1);
    if (d > 0) gain += d; else loss -= d;
  }
  gain /= Scalar(period);
  loss /= Scalar(period);
  out(period) = value(gain, loss);
  for (Eigen::Index i = period + 1; i < n; ++i) {
    const Scalar d = close(i) - close(i - 1);
    gain = (gain * Scalar(period - 1) + (d > 0 ? d : Scalar(0))) / Scalar(period);
    loss = (loss * Scalar(period - 1) + (d < 0 ? -d : Scalar(0))) / Scalar(period);
    out(i) = value(gain, loss);
  }
  return out;
}

/// True range; the first entry is high - low.
template <typename DH, typename DL, typename DC>
Series<typename DH::Scalar> true_range(const Eigen::MatrixBase<DH>& high, const Eigen::MatrixBase<DL>& low,
                                       const Eigen::MatrixBase<DC>& close) {
  using Scalar = typename DH::Scalar;
  const Eigen::Index n = high.size();
  Series<Scalar> tr(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    tr(i) = high(i) - low(i);
    if (i > 0) {
      tr(i) = std::max({tr(i), std::abs(high(i) - close(i - 1)), std::abs(low(i) - close(i - 1))});
    }
  }
  return tr;
}

/// Wilder ATR: mean of the first `period` true ranges, then
/// atr = (atr*(n-1) + tr)/n. Defined from index period - 1.
template <typename DH, typename DL, typename DC>
Series<typename DH::Scalar> atr(const Eigen::MatrixBase<DH>& high, const Eigen::MatrixBase<DL>& low,
                                const Eigen::MatrixBase<DC>& close, Eigen::Index period = 14) {
  using Scalar = typename DH::Scalar;
  detail::require_period(period);
  const Series<Scalar> tr = true_range(high, low, close);
  const Eigen::Index n = tr.size();
  Series<Scalar> out = Series<Scalar>::Constant(n, undefined_v<Scalar>);
  if (n < period) return out;
  Scalar value = tr.head(period).mean();
  out(period - 1) = value;
  for (Eigen::Index i = period; i < n; ++i) {
    value = (value * Scalar(period - 1) + tr(i)) / Scalar(period);
    out(i) = value;
  }
  return out;
}

template <typename Scalar>
struct BollingerBands {
  Series<Scalar> upper, mid, lower, width;
};

/// SMA mid-band +/- k population standard deviations; width = (upper - lower)/mid.
template <typename Derived>
BollingerBands<typename Derived::Scalar> bollinger(const Eigen::MatrixBase<Derived>& close, Eigen::Index period = 20,
                                                   typename Derived::Scalar k = 2) {
  BollingerBands<typename Derived::Scalar> b;
  b.mid = sma(close, period);
  const auto sd = rolling_stddev(close, period);
  b.upper = b.mid + k * sd;
  b.lower = b.mid - k * sd;
  b.width = (b.upper - b.lower).cwiseQuotient(b.mid);
  return b;
}

template <typename Scalar>
struct MacdLines {
  Series<Scalar> line, signal, histogram;
  Eigen::Index line_warmup = 0;
  Eigen::Index signal_warmup = 0;
};

/// MACD = EMA(fast) - EMA(slow); signal = EMA(signal) of MACD seeded at the
/// first defined MACD value; histogram = MACD - signal.
template <typename Derived>
MacdLines<typename Derived::Scalar> macd(const Eigen::MatrixBase<Derived>& close, Eigen::Index fast = 12,
                                         Eigen::Index slow = 26, Eigen::Index signal = 9) {
  using Scalar = typename Derived::Scalar;
  MacdLines<Scalar> m;
  m.line_warmup = std::max(fast, slow) - 1;
  m.signal_warmup = m.line_warmup + signal - 1;
  m.line = ema(close, fast) - ema(close, slow);
  m.signal = ema(m.line, signal, std::min(m.line_warmup, close.size()));
  m.histogram = m.line - m.signal;
  return m;
}

/// Mean of the trailing `window` one-day returns (R_t). Defined from `window`.
template <typename Derived>
Series<typename Derived::Scalar> rolling_mean_return(const Eigen::MatrixBase<Derived>& close, Eigen::Index window = 20) {
  return sma(pct_change(close), window, 1);
}

/// Regime label: +1 when the trailing mean return is strictly positive,
/// -1 otherwise; NaN during warm-up. Throws SeriesTooShort unless
/// close.size() > window.
template <typename Derived>
Series<typename Derived::Scalar> detect_regime(const Eigen::MatrixBase<Derived>& close, Eigen::Index window = 20) {
  using Scalar = typename Derived::Scalar;
  if (close.size() <= window) {
    throw Error(ErrorCode::SeriesTooShort, "regime needs more than " + std::to_string(window) + " bars");
  }
  const Series<Scalar> r = rolling_mean_return(close, window);
  return r.unaryExpr([](Scalar v) {
    if (std::isnan(v)) return v;
    return v > Scalar(0) ? Scalar(1) : Scalar(-1);
  });
}

// ---------------------------------------------------------------------------

enum class Field : int {
  Ema50,
  Ema200,
  EmaRatio,
  Macd,
  MacdSignal,
  MacdHist,
  Rsi14,
  BbUpper,
  BbMid,
  BbLower,
  BbWidth,
  Atr14,
  Vol20,
  Regime,
  Sma50,
  Sma200,
};

inline constexpr int kFieldCount = 16;
/// Fields written by the indicator dump, in column order.
inline constexpr int kDumpFieldCount = 14;

std::string_view field_name(Field f);

struct IndicatorParams {
  Eigen::Index ema_fast = 50;
  Eigen::Index ema_slow = 200;
  Eigen::Index macd_fast = 12;
  Eigen::Index macd_slow = 26;
  Eigen::Index macd_signal = 9;
  Eigen::Index rsi = 14;
  Eigen::Index bollinger = 20;
  double bollinger_k = 2.0;
  Eigen::Index atr = 14;
  Eigen::Index volatility = 20;
  Eigen::Index regime = 20;
  Eigen::Index sma_fast = 50;
  Eigen::Index sma_slow = 200;

  /// Longest window; compute_indicators needs at least this many bars.
  Eigen::Index longest() const;
  void validate() const;
};

/// Per-date indicator values for one ticker. One column per Field; NaN
/// before each field's warm-up index.
struct IndicatorFrame {
  std::string ticker;
  std::vector<Date> dates;
  Eigen::Matrix<double, Eigen::Dynamic, kFieldCount> values;
  std::array<Eigen::Index, kFieldCount> warmup{};

  Eigen::Index rows() const noexcept { return values.rows(); }
  double operator()(Eigen::Index row, Field f) const { return values(row, static_cast<int>(f)); }
  auto column(Field f) const { return values.col(static_cast<int>(f)); }
  Eigen::Index warmup_of(Field f) const { return warmup[static_cast<std::size_t>(f)]; }
  bool defined(Eigen::Index row, Field f) const { return row >= warmup_of(f); }
  /// First row where every field is defined.
  Eigen::Index ready_index() const;
};

using FrameMap = std::map<std::string, IndicatorFrame>;

/// Throws SeriesTooShort when the series is shorter than params.longest().
IndicatorFrame compute_indicators(const BarSeries& series, const IndicatorParams& params = {});

/// Frames for every ticker long enough; shorter tickers are skipped with a
/// warning and listed in `skipped` when provided.
FrameMap compute_frames(const Universe& universe, const IndicatorParams& params = {},
                        std::vector<std::string>* skipped = nullptr);

void write_indicator_csv(const IndicatorFrame& frame, const std::filesystem::path& path);

}  // namespace alphaforge
