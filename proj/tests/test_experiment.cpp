#include "mqhelm/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mqhelm;

namespace {

namespace fs = std::filesystem;

std::string fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// CSV line with the cpu_seconds column blanked.
std::string strip_cpu(const std::string& line) {
  const auto pos = line.rfind(',');
  return line.substr(0, pos);
}

const char* kSmallConfig = R"({
  "geometry": "cube",
  "distribution": {"kind": "uniform"},
  "n_target": 27,
  "epsilon": [1.0, 2.0],
  "wavenumber": 3.0,
  "methods": ["tikh_rg", "hkt"],
  "ell": 20,
  "rule": "gcv",
  "seed": 5
})";

}  // namespace

TEST_CASE("parse_config_json accepts a full document") {
  const ExperimentConfig cfg = parse_config_json(kSmallConfig, "inline");
  CHECK(cfg.geometry == ExperimentConfig::Geometry::Cube);
  CHECK(cfg.distribution.kind == Distribution::Kind::Uniform);
  CHECK(cfg.n_target == 27);
  CHECK(cfg.epsilon == std::vector<double>{1.0, 2.0});
  CHECK(cfg.methods.size() == 2);
  CHECK(cfg.ell == 20);
  CHECK(!cfg.k_trunc.has_value());
  CHECK(cfg.rule == SelectionRule::Gcv);
}

TEST_CASE("parse_config_json validation") {
  SUBCASE("single epsilon value accepted") {
    const auto cfg = parse_config_json(
        R"({"geometry":"cube","epsilon":0.5})", "inline");
    CHECK(cfg.epsilon == std::vector<double>{0.5});
  }
  SUBCASE("missing epsilon reported") {
    CHECK_THROWS_AS(parse_config_json(R"({"geometry":"cube"})", "inline"),
                    ConfigError);
  }
  SUBCASE("all problems listed at once") {
    try {
      parse_config_json(
          R"({"geometry":"nowhere","epsilon":-1,"methods":["magic"]})",
          "inline");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("unknown geometry") != std::string::npos);
      CHECK(msg.find("epsilon entries must be > 0") != std::string::npos);
      CHECK(msg.find("unknown method") != std::string::npos);
    }
  }
  SUBCASE("imported geometry requires a path") {
    CHECK_THROWS_AS(
        parse_config_json(R"({"geometry":"imported","epsilon":1})", "inline"),
        ConfigError);
  }
  SUBCASE("ell defaults to 3 k_trunc") {
    const auto cfg = parse_config_json(
        R"({"geometry":"cube","epsilon":1,"k_trunc":15,"n_target":125})",
        "inline");
    CHECK(cfg.ell == 45);
    CHECK(cfg.k_trunc == 15);
  }
  SUBCASE("ell clamps to n_target") {
    const auto cfg = parse_config_json(
        R"({"geometry":"cube","epsilon":1,"n_target":27})", "inline");
    CHECK(cfg.ell == 27);
  }
  SUBCASE("k_trunc auto keyword") {
    const auto cfg = parse_config_json(
        R"({"geometry":"cube","epsilon":1,"k_trunc":"auto"})", "inline");
    CHECK(!cfg.k_trunc.has_value());
  }
  SUBCASE("bad JSON is a parse error") {
    CHECK_THROWS_AS(parse_config_json("{not json", "inline"), ParseError);
  }
  SUBCASE("ell=0 via n_target guard") {
    CHECK_THROWS_AS(
        parse_config_json(R"({"geometry":"cube","epsilon":1,"n_target":5})",
                          "inline"),
        ConfigError);
  }
}

TEST_CASE("run_experiment writes the documented CSV") {
  ExperimentConfig cfg = parse_config_json(kSmallConfig, "inline");
  cfg.output_dir = fresh_dir("mqhelm_run1");
  const RunSummary summary = run_experiment(cfg);
  CHECK(summary.failures == 0);
  REQUIRE(summary.rows.size() == 4);  // 2 eps x 2 methods

  const auto lines = read_lines(summary.csv_path);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == kCsvHeader);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string field;
    int count = 0;
    while (std::getline(ss, field, ',')) ++count;
    CHECK(count == 13);
  }
  // GCV traces are dropped alongside the CSV
  CHECK(fs::exists(fs::path(cfg.output_dir) / "gcv_tikh_rg_eps0.csv"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "gcv_hkt_eps1.csv"));
  // every successful row carries a finite relative error
  for (const auto& row : summary.rows) {
    CHECK(row.error.empty());
    CHECK(std::isfinite(row.re_nodes));
    CHECK(std::isfinite(row.re_offnodes));
    CHECK(row.n == 27);
  }
}

TEST_CASE("reproducibility: identical configs give identical rows modulo "
          "cpu_seconds") {
  ExperimentConfig cfg = parse_config_json(kSmallConfig, "inline");
  cfg.output_dir = fresh_dir("mqhelm_rep_a");
  const RunSummary a = run_experiment(cfg);
  cfg.output_dir = fresh_dir("mqhelm_rep_b");
  const RunSummary b = run_experiment(cfg);

  const auto la = read_lines(a.csv_path);
  const auto lb = read_lines(b.csv_path);
  REQUIRE(la.size() == lb.size());
  for (std::size_t i = 0; i < la.size(); ++i)
    CHECK(strip_cpu(la[i]) == strip_cpu(lb[i]));
}

TEST_CASE("per-row failures do not contaminate the sweep") {
  ExperimentConfig cfg = parse_config_json(kSmallConfig, "inline");
  cfg.epsilon = {1.0, 1e200};  // second epsilon overflows the kernel
  cfg.output_dir = fresh_dir("mqhelm_isolation");
  const RunSummary summary = run_experiment(cfg);
  REQUIRE(summary.rows.size() == 4);
  CHECK(summary.failures == 2);
  for (const auto& row : summary.rows) {
    if (row.epsilon == 1.0) {
      CHECK(row.error.empty());
      CHECK(std::isfinite(row.re_nodes));
    } else {
      CHECK(!row.error.empty());
    }
  }
  // failed rows still appear in the CSV with nan fields
  const auto lines = read_lines(summary.csv_path);
  CHECK(lines.size() == 5);
}

TEST_CASE("solve_once") {
  SUBCASE("single pipeline pass populates the report") {
    ExperimentConfig cfg = parse_config_json(
        R"({"geometry":"cube","distribution":"uniform","n_target":27,
            "epsilon":1.0,"methods":["tikh_rg"],"ell":20})",
        "inline");
    cfg.output_dir = fresh_dir("mqhelm_solve1");
    const SolveOutcome outcome = solve_once(cfg);
    CHECK(outcome.row.method == "tikh_rg");
    CHECK(outcome.row.param > 0.0);
    CHECK(std::isfinite(outcome.row.re_nodes));
    CHECK(outcome.report.alpha.size() == 27);
  }
  SUBCASE("dump flags write the documented files") {
    ExperimentConfig cfg = parse_config_json(
        R"({"geometry":"cube","distribution":"uniform","n_target":27,
            "epsilon":1.0,"methods":["tikh_rg"],"ell":20})",
        "inline");
    cfg.output_dir = fresh_dir("mqhelm_solve2");
    SolveOnceOptions opts;
    opts.dump_matrix = true;
    opts.dump_gcv = true;
    solve_once(cfg, opts);
    CHECK(fs::exists(fs::path(cfg.output_dir) / "A.txt"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "f.txt"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "alpha.txt"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "gcv.csv"));
  }
  SUBCASE("requires exactly one method and epsilon") {
    ExperimentConfig cfg = parse_config_json(kSmallConfig, "inline");
    CHECK_THROWS_AS(solve_once(cfg), ConfigError);
  }
  SUBCASE("missing imported file names the path") {
    ExperimentConfig cfg = parse_config_json(
        R"({"geometry":"imported","geometry_path":"/missing/cloud.txt",
            "epsilon":1.0,"methods":["hkt"],"ell":10,"n_target":27})",
        "inline");
    try {
      solve_once(cfg);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("/missing/cloud.txt") !=
            std::string::npos);
    }
  }
}

TEST_CASE("csv_line renders nan for failed fields") {
  ExperimentRow row;
  row.geometry = "cube";
  row.distribution = "random";
  row.n = 10;
  row.epsilon = 1.0;
  row.kappa = row.param = row.re_nodes = row.re_offnodes = row.rho = row.eta =
      row.cpu_seconds = std::numeric_limits<double>::quiet_NaN();
  row.method = "hkt";
  const std::string line = csv_line(row);
  CHECK(line.find("nan") != std::string::npos);
  CHECK(line.find("cube,random,10,") == 0);
}
