#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alphaforge/date.hpp"
#include "alphaforge/market_data.hpp"

namespace alphaforge {

/// UTC instant at second resolution.
using Instant = std::chrono::sys_seconds;

/// Parses ISO-8601 `YYYY-MM-DDTHH:MM[:SS]` followed by `Z` or a numeric
/// offset `+HH:MM` / `-HH:MM` (a space may replace the `T`).
Instant parse_timestamp(std::string_view text);
/// Formats `t` in local time at `offset` from UTC, e.g. 2024-03-11T08:00:00-04:00.
std::string format_timestamp(Instant t, std::chrono::minutes offset);

/// US Eastern UTC offset in effect on `local_date` after 02:00 local time
/// (-04:00 during daylight saving, -05:00 otherwise).
std::chrono::minutes us_eastern_offset(Date local_date);
/// The instant of `minutes_after_midnight` Eastern local time on `date`.
Instant eastern_time(Date date, int minutes_after_midnight);

inline constexpr int kMarketOpenMinutes = 9 * 60 + 30;
/// 09:30 US Eastern on `trading_date`.
inline Instant market_open_cutoff(Date trading_date) { return eastern_time(trading_date, kMarketOpenMinutes); }

struct ScoredArticle {
  std::string ticker;
  Instant published_at;
  double p_pos = 0.0;
  double p_neu = 0.0;
  double p_neg = 0.0;

  double polarity() const noexcept { return p_pos - p_neg; }
  friend bool operator==(const ScoredArticle&, const ScoredArticle&) = default;
};

/// Throws InvalidProbabilities unless every probability lies in [0, 1] and
/// they sum to 1 within 1e-6.
void validate_article(const ScoredArticle& a);

struct DailySentiment {
  std::string ticker;
  Date date;
  std::optional<double> score;  // absent when no article falls in the window
  int n_articles = 0;

  bool present() const noexcept { return score.has_value(); }
};

/// Mean polarity of `ticker`'s articles published in
/// [cutoff(previous_trading_date), cutoff(trading_date)). Without a previous
/// date the window has no lower bound.
DailySentiment aggregate_daily(std::span<const ScoredArticle> articles, std::string_view ticker, Date trading_date,
                               std::optional<Date> previous_trading_date);

inline constexpr double kSentimentGate = -0.70;

/// True iff a score is present and strictly below `threshold`.
bool gate_blocks_entry(const std::optional<double>& score, double threshold = kSentimentGate);
inline bool gate_blocks_entry(const DailySentiment& s, double threshold = kSentimentGate) {
  return gate_blocks_entry(s.score, threshold);
}

std::vector<ScoredArticle> load_articles_csv(const std::filesystem::path& path);
void write_articles_csv(std::span<const ScoredArticle> articles, const std::filesystem::path& path);

/// Daily scores keyed by ticker and trading date. Each ticker's window
/// boundaries follow that ticker's own trading dates, so every article is
/// attributed to exactly one session (or none if it postdates the last).
class SentimentBook {
 public:
  SentimentBook() = default;
  static SentimentBook build(std::span<const ScoredArticle> articles, const Universe& universe);

  /// nullptr when no article maps to (ticker, date).
  const DailySentiment* find(const std::string& ticker, Date date) const;
  std::optional<double> score(const std::string& ticker, Date date) const;
  std::size_t size() const;

  void write_csv(const std::filesystem::path& path) const;

 private:
  std::map<std::string, std::map<Date, DailySentiment>> days_;
};

}  // namespace alphaforge
