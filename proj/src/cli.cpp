#include "alphaforge/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "alphaforge/csv.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/fixtures.hpp"
#include "alphaforge/log.hpp"
#include "alphaforge/pipeline.hpp"

namespace alphaforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

DateRange parse_range(const json& j) {
  return {parse_date(j.at("start").get<std::string>()), parse_date(j.at("end").get<std::string>())};
}

json range_json(DateRange r) { return {{"start", format_date(r.start)}, {"end", format_date(r.end)}}; }

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

struct Inputs {
  Universe universe;
  FrameMap frames;
  SentimentBook sentiment;
};

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in;
  in.universe = load_universe(cfg.data_dir, cfg.tickers);
  in.frames = compute_frames(in.universe);
  if (!cfg.sentiment_file.empty()) {
    in.sentiment = SentimentBook::build(load_articles_csv(cfg.sentiment_file), in.universe);
  }
  return in;
}

std::map<std::string, BarSeries> load_indices(const RunConfig& cfg) {
  std::map<std::string, BarSeries> out;
  if (cfg.index_dir.empty()) return out;
  for (const auto& [name, s] : load_universe(cfg.index_dir).series()) out.emplace(name, s);
  return out;
}

void print_report(std::ostream& out, const MetricsReport& r) { out << format_portfolio_log(r); }

}  // namespace

void RunConfig::validate() const {
  if (train_range.empty()) throw Error(ErrorCode::Config, "train range is empty");
  backtest.validate();
  if (train_range.end > backtest.range.start) {
    throw Error(ErrorCode::Config, "train range must end on or before the backtest start (" +
                                       format_date(train_range.end) + " > " + format_date(backtest.range.start) + ")");
  }
  if (!(train_fraction > 0 && train_fraction < 1)) throw Error(ErrorCode::Config, "train_fraction must lie in (0, 1)");
  gbdt.validate();
  strategy.validate();
  if (!fs::is_directory(data_dir)) throw Error(ErrorCode::Config, "data_dir not found: " + data_dir.string());
  if (!sentiment_file.empty() && !fs::exists(sentiment_file)) {
    throw Error(ErrorCode::Config, "sentiment_file not found: " + sentiment_file.string());
  }
  if (!index_dir.empty() && !fs::is_directory(index_dir)) {
    throw Error(ErrorCode::Config, "index_dir not found: " + index_dir.string());
  }
  if (model_file.empty()) throw Error(ErrorCode::Config, "model_file is required");
  if (output_dir.empty()) throw Error(ErrorCode::Config, "output_dir is required");
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::Config, "config not found: " + path.string());
  const fs::path base = path.parent_path();
  RunConfig c;
  try {
    const json j = json::parse(csv::read_text(path));
    c.data_dir = resolve(base, j.at("data_dir").get<std::string>());
    c.sentiment_file = resolve(base, j.value("sentiment_file", std::string{}));
    c.model_file = resolve(base, j.value("model_file", std::string{"model.json"}));
    c.output_dir = resolve(base, j.value("output_dir", std::string{"out"}));
    c.index_dir = resolve(base, j.value("index_dir", std::string{}));
    c.tickers = j.value("tickers", std::vector<std::string>{});
    if (j.contains("train_range")) c.train_range = parse_range(j.at("train_range"));
    if (j.contains("backtest_range")) c.backtest.range = parse_range(j.at("backtest_range"));
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.seed = j.value("seed", c.seed);
    if (j.contains("gbdt")) {
      const auto& g = j.at("gbdt");
      c.gbdt.n_estimators = g.value("n_estimators", c.gbdt.n_estimators);
      c.gbdt.max_depth = g.value("max_depth", c.gbdt.max_depth);
      c.gbdt.learning_rate = g.value("learning_rate", c.gbdt.learning_rate);
      c.gbdt.l2_lambda = g.value("l2_lambda", c.gbdt.l2_lambda);
      c.gbdt.min_child_weight = g.value("min_child_weight", c.gbdt.min_child_weight);
      c.gbdt.decision_threshold = g.value("decision_threshold", c.gbdt.decision_threshold);
    }
    if (j.contains("strategy")) c.strategy = StrategyConfig::from_json(j.at("strategy").dump());
    if (j.contains("backtest")) {
      const auto& b = j.at("backtest");
      c.backtest.initial_cash = b.value("initial_cash", c.backtest.initial_cash);
      c.backtest.commission = b.value("commission", c.backtest.commission);
      c.backtest.slippage_bps = b.value("slippage_bps", c.backtest.slippage_bps);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  }
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  const json j{{"data_dir", c.data_dir.string()},
               {"sentiment_file", c.sentiment_file.string()},
               {"model_file", c.model_file.string()},
               {"output_dir", c.output_dir.string()},
               {"index_dir", c.index_dir.string()},
               {"tickers", c.tickers},
               {"train_range", range_json(c.train_range)},
               {"backtest_range", range_json(c.backtest.range)},
               {"train_fraction", c.train_fraction},
               {"seed", c.seed},
               {"gbdt",
                {{"n_estimators", c.gbdt.n_estimators},
                 {"max_depth", c.gbdt.max_depth},
                 {"learning_rate", c.gbdt.learning_rate},
                 {"l2_lambda", c.gbdt.l2_lambda},
                 {"min_child_weight", c.gbdt.min_child_weight},
                 {"decision_threshold", c.gbdt.decision_threshold}}},
               {"strategy", json::parse(c.strategy.to_json())},
               {"backtest",
                {{"initial_cash", c.backtest.initial_cash},
                 {"commission", c.backtest.commission},
                 {"slippage_bps", c.backtest.slippage_bps}}}};
  return j.dump(2) + "\n";
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
  std::vector<fs::path> files;
  if (!cfg.tickers.empty()) {
    for (const auto& t : cfg.tickers) files.push_back(cfg.data_dir / (t + ".csv"));
  } else {
    for (const auto& e : fs::directory_iterator(cfg.data_dir)) {
      if (e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  }
  int failures = 0;
  int loaded = 0;
  out << "ticker,status,bars,first_date,last_date,detail\n";
  for (const auto& f : files) {
    const std::string ticker = f.stem().string();
    try {
      if (!fs::exists(f)) throw Error(ErrorCode::Io, "missing file " + f.string());
      const BarSeries s = load_ohlcv_csv(f, ticker);
      out << ticker << ",ok," << s.size() << ',' << format_date(s.front().date) << ',' << format_date(s.back().date)
          << ",\n";
      ++loaded;
    } catch (const Error& e) {
      out << ticker << ",invalid,0,,," << e.what() << '\n';
      ++failures;
    }
  }
  out << "tickers: " << files.size() << ", valid: " << loaded << ", invalid: " << failures << '\n';
  return failures == 0 && loaded > 0 ? kOk : kValidationError;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg);
  const TrainOutcome t =
      train_direction_model(in.universe, in.frames, cfg.train_range, cfg.train_fraction, cfg.gbdt, cfg.seed);
  gbdt::save_model(t.model, cfg.model_file);
  char buf[256];
  std::snprintf(buf, sizeof buf, "train rows: %ld, held-out rows: %ld\ntrain accuracy: %.4f\nheld-out accuracy: %.4f\n",
                static_cast<long>(t.train_rows), static_cast<long>(t.heldout_rows), t.train_accuracy,
                t.heldout_accuracy);
  out << buf << "model written to " << cfg.model_file.string() << '\n';
  return kOk;
}

int cmd_backtest(const RunConfig& cfg, std::ostream& out) {
  std::optional<gbdt::Ensemble> model;
  if (cfg.strategy.mode == StrategyMode::Hybrid) model = gbdt::load_model(cfg.model_file);
  const Inputs in = load_inputs(cfg);
  const StrategyRun run =
      run_strategy(in.universe, in.frames, in.sentiment, model ? &*model : nullptr, cfg.strategy, cfg.backtest);
  write_run_outputs(run, cfg.output_dir);
  out << "mode: " << to_string(cfg.strategy.mode) << ", trades: " << run.result.trades().size()
      << ", rejected: " << run.result.overdrafts_rejected << '\n';
  print_report(out, run.report);
  return kOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const auto equity = load_equity_csv(cfg.output_dir / "equity.csv");
  const auto trades = load_trade_log_csv(cfg.output_dir / "trades.csv");
  if (equity.empty()) throw Error(ErrorCode::MissingArtifact, "equity curve has no rows");
  const MetricsReport report = compute_report(equity, trades, cfg.backtest.initial_cash, cfg.backtest.range.years());
  csv::write_text(cfg.output_dir / "report.json", report_to_json(report));
  write_portfolio_log(report, cfg.output_dir / "portfolio_log.txt");
  const auto indices = load_indices(cfg);
  if (!indices.empty()) {
    const auto rows = benchmark_compare(indices, cfg.backtest.initial_cash, cfg.backtest.range);
    write_benchmark_csv(rows, cfg.output_dir / "benchmarks.csv");
  }
  write_plot_data_csv(equity, indices, cfg.backtest.initial_cash, cfg.backtest.range, cfg.output_dir / "plot_data.csv");
  print_report(out, report);
  return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const gbdt::Ensemble model = gbdt::load_model(cfg.model_file);
  const Inputs in = load_inputs(cfg);
  StrategyConfig hybrid = cfg.strategy;
  hybrid.mode = StrategyMode::Hybrid;
  StrategyConfig baseline = cfg.strategy;
  baseline.mode = StrategyMode::Baseline;
  const StrategyRun h = run_strategy(in.universe, in.frames, in.sentiment, &model, hybrid, cfg.backtest);
  const StrategyRun b = run_strategy(in.universe, in.frames, in.sentiment, nullptr, baseline, cfg.backtest);
  write_run_outputs(h, cfg.output_dir / "hybrid");
  write_run_outputs(b, cfg.output_dir / "baseline");

  std::ostringstream table;
  table << "metric,hybrid,baseline\n";
  const auto row = [&](const char* name, double hv, double bv) {
    table << name << ',' << csv::format_double(hv) << ',' << csv::format_double(bv) << '\n';
  };
  row("final_value", h.report.final_value, b.report.final_value);
  row("positions_value", h.report.positions_value, b.report.positions_value);
  row("remaining_cash", h.report.remaining_cash, b.report.remaining_cash);
  row("total_return_pct", h.report.total_return_pct, b.report.total_return_pct);
  row("cagr_pct", h.report.cagr_pct, b.report.cagr_pct);
  row("max_drawdown_pct", h.report.max_drawdown_pct, b.report.max_drawdown_pct);
  row("sharpe", h.report.sharpe, b.report.sharpe);
  row("win_ratio_pct", h.report.win_ratio_pct, b.report.win_ratio_pct);
  row("avg_holding_days", h.report.avg_holding_days, b.report.avg_holding_days);
  row("n_round_trips", h.report.n_round_trips, b.report.n_round_trips);
  csv::write_text(cfg.output_dir / "comparison.csv", table.str());
  out << table.str();

  const auto indices = load_indices(cfg);
  if (!indices.empty()) {
    auto rows = benchmark_compare(indices, cfg.backtest.initial_cash, cfg.backtest.range);
    rows.push_back({"Hybrid Strategy", h.report.final_value, h.report.total_return_pct, h.report.cagr_pct});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const BenchmarkRow& x, const BenchmarkRow& y) { return x.return_pct > y.return_pct; });
    write_benchmark_csv(rows, cfg.output_dir / "benchmarks.csv");
    write_plot_data_csv(h.result.equity_curve(), indices, cfg.backtest.initial_cash, cfg.backtest.range,
                        cfg.output_dir / "plot_data.csv");
  }
  return kOk;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::Config:
      case ErrorCode::InvalidArgument:
      case ErrorCode::MalformedRow:
      case ErrorCode::InvariantViolation:
      case ErrorCode::DuplicateDate:
      case ErrorCode::EmptyFile:
      case ErrorCode::EmptyUniverse:
      case ErrorCode::EmptyDataset:
      case ErrorCode::SingleClassDataset:
      case ErrorCode::DegenerateSplit:
      case ErrorCode::MissingArtifact:
      case ErrorCode::InvalidSpec:
      case ErrorCode::InvalidProbabilities:
        return kValidationError;
      default:
        return kRuntimeError;
    }
  }
  return kRuntimeError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"alphaforge: hybrid ML/sentiment/regime daily backtesting engine"};
  app.require_subcommand(1);

  fs::path config_path;
  std::optional<std::string> mode;
  std::optional<std::string> out_dir;
  std::optional<std::string> tickers;
  std::optional<std::uint64_t> seed;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--mode", mode, "Strategy mode: hybrid | baseline");
    sub->add_option("--out", out_dir, "Output directory override");
    sub->add_option("--tickers", tickers, "Comma-separated ticker subset");
    sub->add_option("--seed", seed, "Training seed");
  };
  CLI::App* ingest = app.add_subcommand("ingest", "Load and validate the OHLCV universe");
  CLI::App* train = app.add_subcommand("train", "Fit the scaler and direction classifier");
  CLI::App* backtest = app.add_subcommand("backtest", "Run the daily simulation");
  CLI::App* report = app.add_subcommand("report", "Compute metrics from backtest artifacts");
  CLI::App* compare = app.add_subcommand("compare", "Hybrid vs baseline (and benchmarks)");
  for (auto* sub : {ingest, train, backtest, report, compare}) add_common(sub);

  CLI::App* fixture = app.add_subcommand("fixture", "Write a synthetic fixture and a matching config");
  std::string fixture_kind = "standard";
  fs::path fixture_dir;
  std::uint64_t fixture_seed = 0;
  bool fixture_seed_set = false;
  fixture->add_option("--kind", fixture_kind, "standard | crash")->check(CLI::IsMember({"standard", "crash"}));
  fixture->add_option("--dir", fixture_dir, "Destination directory")->required();
  fixture->add_option("--seed", fixture_seed, "Generator seed")->each([&](const std::string&) { fixture_seed_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (fixture->parsed()) {
      Date bull{}, crash{};
      fixtures::FixtureSpec spec;
      if (fixture_kind == "crash") {
        spec = fixture_seed_set ? fixtures::crash_fixture_spec(&bull, &crash, fixture_seed)
                                : fixtures::crash_fixture_spec(&bull, &crash);
      } else {
        spec = fixture_seed_set ? fixtures::standard_fixture_spec(fixture_seed) : fixtures::standard_fixture_spec();
      }
      fixtures::write_fixture(fixtures::generate_fixture(spec), spec, fixture_dir);
      RunConfig c;
      c.data_dir = "data";
      c.sentiment_file = "news.csv";
      c.model_file = "model.json";
      c.output_dir = "out";
      if (fixture_kind == "crash") {
        const Date last = fixtures::business_days(spec.start, spec.days).back();
        c.train_range = {spec.start, bull};
        c.backtest.range = {bull, last + std::chrono::days{1}};
      }
      csv::write_text(fixture_dir / "config.json", run_config_to_json(c));
      out << "fixture written to " << fixture_dir.string() << '\n';
      return kOk;
    }

    RunConfig cfg = load_run_config(config_path);
    if (mode) cfg.strategy.mode = parse_strategy_mode(*mode);
    if (out_dir) cfg.output_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    if (tickers) {
      cfg.tickers.clear();
      std::stringstream ss(*tickers);
      std::string t;
      while (std::getline(ss, t, ',')) {
        if (!t.empty()) cfg.tickers.push_back(t);
      }
    }
    cfg.validate();

    if (ingest->parsed()) return cmd_ingest(cfg, out);
    if (train->parsed()) return cmd_train(cfg, out);
    if (backtest->parsed()) return cmd_backtest(cfg, out);
    if (report->parsed()) return cmd_report(cfg, out);
    if (compare->parsed()) return cmd_compare(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kValidationError;
}

}  // namespace alphaforge::cli
