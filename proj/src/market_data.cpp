#include "alphaforge/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"

namespace alphaforge {

namespace {

constexpr std::string_view kHeader = "date,open,high,low,close,volume";

Eigen::VectorXd column(const std::vector<Bar>& bars, double Bar::*field) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(bars.size()));
  for (std::size_t i = 0; i < bars.size(); ++i) out[static_cast<Eigen::Index>(i)] = bars[i].*field;
  return out;
}

}  // namespace

void validate_bar(const Bar& bar) {
  const auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvariantViolation, format_date(bar.date) + ": " + why);
  };
  if (!(bar.open > 0 && bar.high > 0 && bar.low > 0 && bar.close > 0)) fail("non-positive price");
  if (bar.volume < 0) fail("negative volume");
  if (bar.high < bar.low) fail("high < low");
  if (bar.low > std::min(bar.open, bar.close)) fail("low above open/close");
  if (bar.high < std::max(bar.open, bar.close)) fail("high below open/close");
}

BarSeries::BarSeries(std::string ticker, std::vector<Bar> bars) : ticker_(std::move(ticker)), bars_(std::move(bars)) {
  std::stable_sort(bars_.begin(), bars_.end(), [](const Bar& a, const Bar& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < bars_.size(); ++i) {
    validate_bar(bars_[i]);
    if (i > 0 && bars_[i].date == bars_[i - 1].date) {
      throw Error(ErrorCode::DuplicateDate, ticker_ + " " + format_date(bars_[i].date));
    }
  }
}

std::vector<Date> BarSeries::dates() const {
  std::vector<Date> out;
  out.reserve(bars_.size());
  for (const auto& b : bars_) out.push_back(b.date);
  return out;
}

Eigen::VectorXd BarSeries::opens() const { return column(bars_, &Bar::open); }
Eigen::VectorXd BarSeries::highs() const { return column(bars_, &Bar::high); }
Eigen::VectorXd BarSeries::lows() const { return column(bars_, &Bar::low); }
Eigen::VectorXd BarSeries::closes() const { return column(bars_, &Bar::close); }

std::ptrdiff_t BarSeries::index_of(Date d) const {
  const auto it = std::lower_bound(bars_.begin(), bars_.end(), d, [](const Bar& b, Date x) { return b.date < x; });
  if (it == bars_.end() || it->date != d) return -1;
  return it - bars_.begin();
}

BarSeries BarSeries::slice(DateRange range) const {
  BarSeries out;
  out.ticker_ = ticker_;
  for (const auto& b : bars_) {
    if (range.contains(b.date)) out.bars_.push_back(b);
  }
  return out;
}

Universe::Universe(std::map<std::string, BarSeries> series) : series_(std::move(series)) {
  std::set<Date> all;
  for (const auto& [ticker, s] : series_) {
    if (s.empty()) throw Error(ErrorCode::InvariantViolation, "empty series for " + ticker);
    for (const auto& b : s.bars()) all.insert(b.date);
  }
  calendar_.assign(all.begin(), all.end());
}

const BarSeries& Universe::at(const std::string& ticker) const {
  const auto it = series_.find(ticker);
  if (it == series_.end()) throw Error(ErrorCode::InvalidArgument, "unknown ticker " + ticker);
  return it->second;
}

std::vector<std::string> Universe::tickers() const {
  std::vector<std::string> out;
  for (const auto& [t, s] : series_) out.push_back(t);
  return out;
}

BarSeries load_ohlcv_csv(const std::filesystem::path& path, std::string ticker) {
  if (ticker.empty()) ticker = path.stem().string();
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, path.string());
  if (lines.front() != kHeader) {
    throw Error(ErrorCode::MalformedRow, path.string() + ": expected header '" + std::string(kHeader) + "'");
  }
  std::vector<Bar> bars;
  bars.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv::split(lines[i]);
    const auto where = [&] { return path.string() + ":" + std::to_string(i + 1); };
    if (fields.size() != 6) throw Error(ErrorCode::MalformedRow, where() + ": expected 6 fields");
    try {
      Bar bar;
      bar.date = parse_date(fields[0]);
      bar.open = csv::parse_double(fields[1]);
      bar.high = csv::parse_double(fields[2]);
      bar.low = csv::parse_double(fields[3]);
      bar.close = csv::parse_double(fields[4]);
      bar.volume = csv::parse_int(fields[5]);
      bars.push_back(bar);
    } catch (const Error& e) {
      throw Error(e.code(), where() + ": " + e.what());
    }
  }
  if (bars.empty()) throw Error(ErrorCode::EmptyFile, path.string() + ": no data rows");
  return BarSeries(std::move(ticker), std::move(bars));
}

void write_ohlcv_csv(const BarSeries& series, const std::filesystem::path& path) {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& b : series.bars()) {
    out << format_date(b.date) << ',' << csv::format_double(b.open) << ',' << csv::format_double(b.high) << ','
        << csv::format_double(b.low) << ',' << csv::format_double(b.close) << ',' << b.volume << '\n';
  }
  csv::write_text(path, out.str());
}

Universe load_universe(const std::filesystem::path& dir, std::span<const std::string> tickers) {
  std::map<std::string, BarSeries> series;
  if (!tickers.empty()) {
    for (const auto& t : tickers) {
      const auto path = dir / (t + ".csv");
      if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "missing data file " + path.string());
      series.emplace(t, load_ohlcv_csv(path, t));
    }
  } else {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() != ".csv") continue;
      const auto t = entry.path().stem().string();
      series.emplace(t, load_ohlcv_csv(entry.path(), t));
    }
  }
  if (series.empty()) throw Error(ErrorCode::EmptyUniverse, "no series under " + dir.string());
  return Universe(std::move(series));
}

std::pair<BarSeries, BarSeries> train_test_split(const BarSeries& series, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  const std::size_t n = series.size();
  const auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));
  if (n < 2 || n_train == 0 || n_train >= n) {
    throw Error(ErrorCode::DegenerateSplit, series.ticker() + ": split of " + std::to_string(n) + " bars");
  }
  const auto& bars = series.bars();
  return {BarSeries(series.ticker(), {bars.begin(), bars.begin() + static_cast<std::ptrdiff_t>(n_train)}),
          BarSeries(series.ticker(), {bars.begin() + static_cast<std::ptrdiff_t>(n_train), bars.end()})};
}

AlignedUniverse align_to_calendar(const Universe& universe, DateRange range) {
  AlignedUniverse out;
  std::map<std::string, BarSeries> kept;
  for (const auto& [ticker, s] : universe.series()) {
    auto sliced = s.slice(range);
    if (sliced.empty()) {
      out.dropped.push_back(ticker);
    } else {
      kept.emplace(ticker, std::move(sliced));
    }
  }
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyUniverse,
                "no bars within [" + format_date(range.start) + ", " + format_date(range.end) + ")");
  }
  out.universe = Universe(std::move(kept));
  return out;
}

Universe truncate_after(const Universe& universe, Date last) {
  std::map<std::string, BarSeries> kept;
  for (const auto& [ticker, s] : universe.series()) {
    auto sliced = s.slice({Date::min(), last + std::chrono::days{1}});
    if (!sliced.empty()) kept.emplace(ticker, std::move(sliced));
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyUniverse, "nothing on or before " + format_date(last));
  return Universe(std::move(kept));
}

}  // namespace alphaforge
