#include <doctest.h>

#include <sstream>

#include "alphaforge/cli.hpp"
#include "alphaforge/csv.hpp"
#include "alphaforge/fixtures.hpp"
#include "helpers.hpp"

using namespace alphaforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "alphaforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write_config(const fs::path& dir, const cli::RunConfig& c) {
  csv::write_text(dir / "config.json", cli::run_config_to_json(c));
}

cli::RunConfig relative_config() {
  cli::RunConfig c;
  c.data_dir = "data";
  c.model_file = "model.json";
  c.output_dir = "out";
  return c;
}

// Writes `tickers` random-walk series of `bars` bars under dir/data.
void write_walks(const fs::path& dir, int tickers, int bars) {
  for (int t = 0; t < tickers; ++t) {
    const std::string name(3, static_cast<char>('A' + t));
    write_ohlcv_csv(testing::random_walk(100 + static_cast<std::uint64_t>(t), bars, name), dir / "data" / (name + ".csv"));
  }
}

}  // namespace

TEST_CASE("ingest lists valid tickers") {
  const auto dir = testing::scratch_dir("cli_ingest");
  write_walks(dir, 3, 30);
  write_config(dir, relative_config());
  const auto r = run({"ingest", "--config", (dir / "config.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("AAA,ok,30") != std::string::npos);
  CHECK(r.out.find("CCC,ok,30") != std::string::npos);
  CHECK(r.out.find("tickers: 3, valid: 3, invalid: 0") != std::string::npos);
}

TEST_CASE("ingest names a corrupt file and exits 2") {
  const auto dir = testing::scratch_dir("cli_corrupt");
  write_walks(dir, 3, 30);
  csv::write_text(dir / "data" / "BAD.csv", "date,open,high,low,close,volume\n2024-01-02,10,9,11,10,5\n");
  write_config(dir, relative_config());
  const auto r = run({"ingest", "--config", (dir / "config.json").string()});
  CHECK(r.code == 2);
  CHECK(r.out.find("BAD,invalid") != std::string::npos);
  const auto subset = run({"ingest", "--config", (dir / "config.json").string(), "--tickers", "AAA,BBB"});
  CHECK(subset.code == 0);
}

TEST_CASE("overlapping train and backtest ranges are refused") {
  const auto dir = testing::scratch_dir("cli_overlap");
  write_walks(dir, 1, 30);
  auto c = relative_config();
  c.train_range = {make_date(2019, 1, 1), make_date(2023, 6, 1)};
  write_config(dir, c);
  const auto r = run({"backtest", "--config", (dir / "config.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("train range") != std::string::npos);
}

TEST_CASE("bad arguments and configs exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"ingest"}).code == 2);
  CHECK(run({"ingest", "--config", "/nonexistent/config.json"}).code == 2);
  const auto dir = testing::scratch_dir("cli_badjson");
  csv::write_text(dir / "config.json", "{not json");
  CHECK(run({"ingest", "--config", (dir / "config.json").string()}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("report handles missing and hand-built artifacts") {
  const auto dir = testing::scratch_dir("cli_report");
  write_walks(dir, 1, 30);
  write_config(dir, relative_config());
  const auto cfg = (dir / "config.json").string();
  CHECK(run({"report", "--config", cfg}).code == 2);

  csv::write_text(dir / "out" / "equity.csv",
                  "date,cash,positions_value,total_value\n"
                  "2023-01-03,100000,0,100000\n2023-01-04,120000,0,120000\n"
                  "2023-01-05,90000,0,90000\n2023-01-06,130000,0,130000\n");
  csv::write_text(dir / "out" / "trades.csv", "date,symbol,action,size,fill_price,portfolio_value\n");
  const auto r = run({"report", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(r.out.find("Max Drawdown (%): -25.00") != std::string::npos);
  CHECK(csv::read_text(dir / "out" / "portfolio_log.txt").find("Total Return (%): 30.00") != std::string::npos);
}

TEST_CASE("train with no labelable rows exits 2") {
  const auto dir = testing::scratch_dir("cli_notrain");
  write_walks(dir, 2, 260);
  auto c = relative_config();
  c.train_range = {make_date(2010, 1, 1), make_date(2011, 1, 1)};
  write_config(dir, c);
  CHECK(run({"train", "--config", (dir / "config.json").string()}).code == 2);
}

TEST_CASE("zig-zag prices are learned and printed") {
  const auto dir = testing::scratch_dir("cli_zigzag");
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.004);
  for (const std::string t : {"UP", "ZIG"}) {
    std::vector<double> closes;
    double base = 100.0;
    for (int i = 0; i < 900; ++i) {
      base *= std::exp(n(rng));
      closes.push_back(base * (i % 2 == 0 ? 1.02 : 0.98));
    }
    write_ohlcv_csv(testing::series_from_closes(t, closes, 0.3, make_date(2019, 1, 1)), dir / "data" / (t + ".csv"));
  }
  auto c = relative_config();
  c.train_range = {make_date(2019, 1, 1), make_date(2022, 6, 1)};
  c.backtest.range = {make_date(2022, 6, 1), make_date(2023, 6, 1)};
  c.gbdt.n_estimators = 50;
  write_config(dir, c);
  const auto r = run({"train", "--config", (dir / "config.json").string()});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("held-out accuracy: ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 19)) >= 0.90);
}

TEST_CASE("fixture end to end: determinism and both modes") {
  const auto dir = testing::scratch_dir("cli_e2e");
  REQUIRE(run({"fixture", "--dir", dir.string()}).code == 0);
  const auto cfg = (dir / "config.json").string();
  fixtures::FixtureSpec spec = fixtures::standard_fixture_spec();
  CHECK(fs::exists(dir / "fixture.json"));

  const auto once = [&](const std::string& out) {
    REQUIRE(run({"train", "--config", cfg}).code == 0);
    REQUIRE(run({"backtest", "--config", cfg, "--out", (dir / out).string()}).code == 0);
    REQUIRE(run({"report", "--config", cfg, "--out", (dir / out).string()}).code == 0);
    fs::copy_file(dir / "model.json", dir / out / "model.json", fs::copy_options::overwrite_existing);
  };
  once("run1");
  once("run2");
  for (const auto* f : {"model.json", "trades.csv", "equity.csv", "portfolio_log.txt", "report.json"}) {
    CHECK_MESSAGE(csv::read_text(dir / "run1" / f) == csv::read_text(dir / "run2" / f), f);
  }

  REQUIRE(run({"backtest", "--config", cfg, "--mode", "baseline", "--out", (dir / "base").string()}).code == 0);
  const auto hybrid = csv::read_lines(dir / "run1" / "trades.csv");
  const auto baseline = csv::read_lines(dir / "base" / "trades.csv");
  CHECK(hybrid.front() == baseline.front());
  CHECK(hybrid != baseline);

  const auto cmp = run({"compare", "--config", cfg, "--out", (dir / "cmp").string()});
  CHECK(cmp.code == 0);
  CHECK(fs::exists(dir / "cmp" / "comparison.csv"));
  CHECK(csv::read_text(dir / "cmp" / "hybrid" / "trades.csv") == csv::read_text(dir / "run1" / "trades.csv"));
  CHECK(csv::read_text(dir / "cmp" / "baseline" / "trades.csv") == csv::read_text(dir / "base" / "trades.csv"));
}

TEST_CASE("hybrid backtest without a model file exits 2") {
  const auto dir = testing::scratch_dir("cli_nomodel");
  REQUIRE(run({"fixture", "--dir", dir.string()}).code == 0);
  CHECK(run({"backtest", "--config", (dir / "config.json").string()}).code == 2);
}
