#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "alphaforge/backtester.hpp"
#include "alphaforge/gbdt.hpp"
#include "alphaforge/strategy.hpp"

namespace alphaforge::cli {

enum ExitCode : int { kOk = 0, kValidationError = 2, kRuntimeError = 3 };

/// Everything a command needs. Relative paths in the config file resolve
/// against the file's directory.
struct RunConfig {
  std::filesystem::path data_dir;
  std::filesystem::path sentiment_file;  // optional
  std::filesystem::path model_file;
  std::filesystem::path output_dir;
  std::filesystem::path index_dir;  // optional, <NAME>.csv benchmark series
  std::vector<std::string> tickers;  // empty = every CSV in data_dir
  DateRange train_range{make_date(2019, 1, 1), make_date(2023, 1, 1)};
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  gbdt::Hyperparams gbdt;
  StrategyConfig strategy;
  BacktestConfig backtest;

  /// Throws Error(Config) when the train range does not end on or before
  /// the backtest start or a referenced input path is missing.
  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& cfg);

int cmd_ingest(const RunConfig& cfg, std::ostream& out);
int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_backtest(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);
/// Hybrid and baseline side by side (plus benchmarks when configured).
int cmd_compare(const RunConfig& cfg, std::ostream& out);

/// Maps an error to the process exit code.
int exit_code_for(const std::exception& e);

/// Full command line entry point (argv[0] included).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace alphaforge::cli
