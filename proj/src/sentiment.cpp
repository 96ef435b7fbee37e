#include "alphaforge/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"

namespace alphaforge {

using namespace std::chrono;

namespace {

int digits(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(text) + "'");
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(text) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

/// n-th (1-based) `wd` of month, or the last one when n == 0.
Date nth_weekday(int y, unsigned m, weekday wd, unsigned n) {
  const year_month ym{year{y}, month{m}};
  if (n == 0) return sys_days{ym / wd[last]};
  return sys_days{ym / wd[n]};
}

}  // namespace

Instant parse_timestamp(std::string_view text) {
  const Date d = parse_date(text.substr(0, std::min<std::size_t>(10, text.size())));
  if (text.size() < 16 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
    throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(text) + "'");
  }
  const int hh = digits(text, 11, 2);
  const int mm = digits(text, 14, 2);
  std::size_t pos = 16;
  int ss = 0;
  if (pos < text.size() && text[pos] == ':') {
    ss = digits(text, pos + 1, 2);
    pos += 3;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  if (hh > 23 || mm > 59 || ss > 60) throw Error(ErrorCode::MalformedRow, "bad time in '" + std::string(text) + "'");
  minutes offset{0};
  if (pos < text.size() && text[pos] == 'Z') {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = digits(text, pos + 1, 2);
    std::size_t next = pos + 3;
    if (next < text.size() && text[next] == ':') ++next;
    const int om = digits(text, next, 2);
    offset = minutes{sign * (oh * 60 + om)};
    pos = next + 2;
  } else {
    throw Error(ErrorCode::MalformedRow, "timestamp without UTC offset '" + std::string(text) + "'");
  }
  if (pos != text.size()) throw Error(ErrorCode::MalformedRow, "trailing text in '" + std::string(text) + "'");
  const auto local = sys_seconds{d} + hours{hh} + minutes{mm} + seconds{ss};
  return local - offset;
}

std::string format_timestamp(Instant t, minutes offset) {
  const auto local = t + offset;
  const auto day = floor<days>(local);
  const hh_mm_ss tod{local - day};
  const long off = offset.count();
  char buf[48];
  std::snprintf(buf, sizeof buf, "%sT%02ld:%02ld:%02ld%c%02ld:%02ld", format_date(day).c_str(),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()), off < 0 ? '-' : '+', std::labs(off) / 60, std::labs(off) % 60);
  return buf;
}

minutes us_eastern_offset(Date local_date) {
  const int y = static_cast<int>(year_month_day{local_date}.year());
  Date start, end;
  if (y >= 2007) {
    start = nth_weekday(y, 3, Sunday, 2);
    end = nth_weekday(y, 11, Sunday, 1);
  } else {
    start = nth_weekday(y, 4, Sunday, 1);
    end = nth_weekday(y, 10, Sunday, 0);
  }
  const bool dst = local_date >= start && local_date < end;
  return dst ? minutes{-240} : minutes{-300};
}

Instant eastern_time(Date date, int minutes_after_midnight) {
  return sys_seconds{date} + minutes{minutes_after_midnight} - us_eastern_offset(date);
}

void validate_article(const ScoredArticle& a) {
  const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(a.p_pos) || !in_unit(a.p_neu) || !in_unit(a.p_neg) ||
      std::abs(a.p_pos + a.p_neu + a.p_neg - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidProbabilities, a.ticker + " at " + format_timestamp(a.published_at, minutes{0}));
  }
}

DailySentiment aggregate_daily(std::span<const ScoredArticle> articles, std::string_view ticker, Date trading_date,
                               std::optional<Date> previous_trading_date) {
  const Instant upper = market_open_cutoff(trading_date);
  const bool bounded = previous_trading_date.has_value();
  const Instant lower = bounded ? market_open_cutoff(*previous_trading_date) : Instant{};
  DailySentiment out{std::string(ticker), trading_date, std::nullopt, 0};
  double sum = 0.0;
  for (const auto& a : articles) {
    if (a.ticker != ticker) continue;
    if (!(a.published_at < upper)) continue;
    if (bounded && a.published_at < lower) continue;
    validate_article(a);
    sum += a.polarity();
    ++out.n_articles;
  }
  if (out.n_articles > 0) out.score = sum / out.n_articles;
  return out;
}

bool gate_blocks_entry(const std::optional<double>& score, double threshold) {
  return score.has_value() && *score < threshold;
}

std::vector<ScoredArticle> load_articles_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, path.string());
  if (lines.front() != "ticker,published_at,p_pos,p_neu,p_neg") {
    throw Error(ErrorCode::MalformedRow, path.string() + ": expected header 'ticker,published_at,p_pos,p_neu,p_neg'");
  }
  std::vector<ScoredArticle> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = csv::split(lines[i]);
    const auto where = path.string() + ":" + std::to_string(i + 1);
    if (f.size() != 5 || f[0].empty()) throw Error(ErrorCode::MalformedRow, where + ": expected 5 fields");
    try {
      ScoredArticle a{std::string(f[0]), parse_timestamp(f[1]), csv::parse_double(f[2]), csv::parse_double(f[3]),
                      csv::parse_double(f[4])};
      validate_article(a);
      out.push_back(std::move(a));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return out;
}

void write_articles_csv(std::span<const ScoredArticle> articles, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "ticker,published_at,p_pos,p_neu,p_neg\n";
  for (const auto& a : articles) {
    const Date local_day = floor<days>(a.published_at + us_eastern_offset(floor<days>(a.published_at)));
    out << a.ticker << ',' << format_timestamp(a.published_at, us_eastern_offset(local_day)) << ','
        << csv::format_double(a.p_pos) << ',' << csv::format_double(a.p_neu) << ',' << csv::format_double(a.p_neg)
        << '\n';
  }
  csv::write_text(path, out.str());
}

SentimentBook SentimentBook::build(std::span<const ScoredArticle> articles, const Universe& universe) {
  SentimentBook book;
  std::map<std::string, std::vector<Instant>> cutoffs;
  for (const auto& [ticker, series] : universe.series()) {
    auto& c = cutoffs[ticker];
    c.reserve(series.size());
    for (const auto& b : series.bars()) c.push_back(market_open_cutoff(b.date));
  }
  // Sums accumulate in input order so results match a filter-then-mean pass.
  std::map<std::string, std::map<Date, std::pair<double, int>>> acc;
  for (const auto& a : articles) {
    validate_article(a);
    const auto it = cutoffs.find(a.ticker);
    if (it == cutoffs.end()) continue;
    const auto& c = it->second;
    const auto pos = std::upper_bound(c.begin(), c.end(), a.published_at);
    if (pos == c.end()) continue;
    const Date d = universe.at(a.ticker)[static_cast<std::size_t>(pos - c.begin())].date;
    auto& slot = acc[a.ticker][d];
    slot.first += a.polarity();
    ++slot.second;
  }
  for (const auto& [ticker, byday] : acc) {
    for (const auto& [d, s] : byday) {
      book.days_[ticker][d] = DailySentiment{ticker, d, s.first / s.second, s.second};
    }
  }
  return book;
}

const DailySentiment* SentimentBook::find(const std::string& ticker, Date date) const {
  const auto t = days_.find(ticker);
  if (t == days_.end()) return nullptr;
  const auto d = t->second.find(date);
  return d == t->second.end() ? nullptr : &d->second;
}

std::optional<double> SentimentBook::score(const std::string& ticker, Date date) const {
  const auto* s = find(ticker, date);
  return s ? s->score : std::nullopt;
}

std::size_t SentimentBook::size() const {
  std::size_t n = 0;
  for (const auto& [t, m] : days_) n += m.size();
  return n;
}

void SentimentBook::write_csv(const std::filesystem::path& path) const {
  std::ostringstream out;
  out << "ticker,date,score,n_articles\n";
  for (const auto& [t, m] : days_) {
    for (const auto& [d, s] : m) {
      out << t << ',' << format_date(d) << ',' << csv::format_double(*s.score) << ',' << s.n_articles << '\n';
    }
  }
  csv::write_text(path, out.str());
}

}  // namespace alphaforge
