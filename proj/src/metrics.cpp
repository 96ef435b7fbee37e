#include "alphaforge/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "alphaforge/csv.hpp"

namespace alphaforge {

double total_return(double initial, double final_value) {
  if (!(initial > 0)) throw Error(ErrorCode::InvalidArgument, "initial capital must be positive");
  return (final_value / initial - 1.0) * 100.0;
}

double cagr(double initial, double final_value, double years) {
  if (!(initial > 0)) throw Error(ErrorCode::InvalidArgument, "initial capital must be positive");
  if (!(years > 0)) throw Error(ErrorCode::InvalidArgument, "CAGR horizon must be positive");
  return (std::pow(final_value / initial, 1.0 / years) - 1.0) * 100.0;
}

TradeStats trade_stats(std::span<const TradeRecord> trades) {
  struct Trip {
    std::int64_t shares = 0;
    double cost = 0.0;
    Date opened;
  };
  std::map<std::string, Trip> open;
  int wins = 0;
  int trips = 0;
  double holding = 0.0;
  for (const auto& t : trades) {
    if (t.action == Side::Buy) {
      auto [it, fresh] = open.try_emplace(t.symbol, Trip{0, 0.0, t.date});
      it->second.shares += t.size;
      it->second.cost += static_cast<double>(t.size) * t.fill_price;
      continue;
    }
    const auto it = open.find(t.symbol);
    if (it == open.end()) throw Error(ErrorCode::UnmatchedSell, t.symbol + " on " + format_date(t.date));
    if (it->second.shares != t.size) {
      throw Error(ErrorCode::UnmatchedSell, t.symbol + " partial exit on " + format_date(t.date));
    }
    const double proceeds = static_cast<double>(t.size) * t.fill_price;
    wins += proceeds > it->second.cost ? 1 : 0;
    holding += static_cast<double>((t.date - it->second.opened).count());
    ++trips;
    open.erase(it);
  }
  TradeStats s;
  s.n_round_trips = trips;
  if (trips > 0) {
    s.win_ratio_pct = 100.0 * wins / trips;
    s.avg_holding_days = holding / trips;
  }
  return s;
}

MetricsReport compute_report(std::span<const EquityPoint> equity, std::span<const TradeRecord> trades,
                             double initial_cash, double years) {
  if (equity.empty()) throw Error(ErrorCode::InvalidArgument, "empty equity curve");
  MetricsReport r;
  const EquityPoint& last = equity.back();
  r.remaining_cash = last.cash;
  r.positions_value = last.positions_value;
  r.final_value = last.total_value;
  r.total_return_pct = total_return(initial_cash, r.final_value);
  r.cagr_pct = cagr(initial_cash, r.final_value, years);

  Eigen::VectorXd values(static_cast<Eigen::Index>(equity.size()));
  for (std::size_t i = 0; i < equity.size(); ++i) values(static_cast<Eigen::Index>(i)) = equity[i].total_value;
  r.max_drawdown_pct = max_drawdown(values);
  r.sharpe = values.size() >= 3 ? sharpe(values) : 0.0;

  const TradeStats s = trade_stats(trades);
  r.win_ratio_pct = s.win_ratio_pct;
  r.avg_holding_days = s.avg_holding_days;
  r.n_round_trips = s.n_round_trips;
  return r;
}

std::string format_portfolio_log(const MetricsReport& r) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "Final Portfolio Value: %.2f\n"
                "Market Value of Positions: %.2f\n"
                "Cash Balance: %.2f\n"
                "Total Return (%%): %.2f\n"
                "CAGR (%%): %.2f\n"
                "Max Drawdown (%%): %.2f\n"
                "Sharpe Ratio: %.2f\n"
                "Win Ratio (%%): %.2f\n"
                "Avg Holding Period (days): %.2f\n",
                r.final_value, r.positions_value, r.remaining_cash, r.total_return_pct, r.cagr_pct,
                r.max_drawdown_pct, r.sharpe, r.win_ratio_pct, r.avg_holding_days);
  return buf;
}

void write_portfolio_log(const MetricsReport& r, const std::filesystem::path& path) {
  csv::write_text(path, format_portfolio_log(r));
}

std::string report_to_json(const MetricsReport& r) {
  const nlohmann::json j{{"final_value", r.final_value},
                         {"remaining_cash", r.remaining_cash},
                         {"positions_value", r.positions_value},
                         {"total_return_pct", r.total_return_pct},
                         {"cagr_pct", r.cagr_pct},
                         {"max_drawdown_pct", r.max_drawdown_pct},
                         {"sharpe", r.sharpe},
                         {"win_ratio_pct", r.win_ratio_pct},
                         {"avg_holding_days", r.avg_holding_days},
                         {"n_round_trips", r.n_round_trips}};
  return j.dump(2) + "\n";
}

std::vector<BenchmarkRow> benchmark_compare(const std::map<std::string, BarSeries>& indices, double initial,
                                            DateRange range) {
  if (!(initial > 0)) throw Error(ErrorCode::InvalidArgument, "initial capital must be positive");
  std::vector<BenchmarkRow> rows;
  for (const auto& [name, series] : indices) {
    const BarSeries window = series.slice(range);
    if (window.size() < 2) throw Error(ErrorCode::MissingRangeData, name + " does not cover the range");
    BenchmarkRow row;
    row.name = name;
    row.final_value = initial * window.back().close / window.front().close;
    row.return_pct = total_return(initial, row.final_value);
    row.cagr_pct = cagr(initial, row.final_value, range.years());
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const BenchmarkRow& a, const BenchmarkRow& b) { return a.return_pct > b.return_pct; });
  return rows;
}

void write_benchmark_csv(std::span<const BenchmarkRow> rows, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "name,final_value,return_pct,cagr_pct\n";
  for (const auto& r : rows) {
    out << r.name << ',' << csv::format_double(r.final_value) << ',' << csv::format_double(r.return_pct) << ','
        << csv::format_double(r.cagr_pct) << '\n';
  }
  csv::write_text(path, out.str());
}

void write_plot_data_csv(std::span<const EquityPoint> equity, const std::map<std::string, BarSeries>& indices,
                         double initial, DateRange range, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "date,strategy_value";
  std::vector<BarSeries> windows;
  for (const auto& [name, series] : indices) {
    out << ',' << name;
    windows.push_back(series.slice(range));
  }
  out << '\n';
  std::vector<std::size_t> cursor(windows.size(), 0);
  for (const auto& p : equity) {
    out << format_date(p.date) << ',' << csv::format_double(p.total_value);
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const auto& bars = windows[k].bars();
      while (cursor[k] < bars.size() && bars[cursor[k]].date <= p.date) ++cursor[k];
      out << ',';
      if (cursor[k] > 0) out << csv::format_double(initial * bars[cursor[k] - 1].close / bars.front().close);
    }
    out << '\n';
  }
  csv::write_text(path, out.str());
}

}  // namespace alphaforge
