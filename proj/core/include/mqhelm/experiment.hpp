#pragma once

#include "mqhelm/assembly.hpp"
#include "mqhelm/evaluate.hpp"
#include "mqhelm/point_set.hpp"
#include "mqhelm/regularize.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mqhelm {

// Configuration problems (unknown fields, out-of-range values). The message
// lists every problem found, not just the first.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  enum class Geometry { Cube, Sphere, Imported };

  Geometry geometry = Geometry::Cube;
  std::string geometry_path;  // Imported only
  Distribution distribution = Distribution::uniform();
  Eigen::Index n_target = 125;
  std::vector<double> epsilon;  // required: single value or sweep
  double wavenumber = 3.0;
  std::vector<Method> methods;
  Eigen::Index ell = 0;  // 0 = default (3 k_trunc when given, else 140), clamped to N
  std::optional<Eigen::Index> k_trunc;  // nullopt = Auto
  SelectionRule rule = SelectionRule::Gcv;
  LambdaGrid lambda_grid;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
};

const char* geometry_name(ExperimentConfig::Geometry g);

// Reads a JSON document mirroring ExperimentConfig field names. Throws
// ParseError for unreadable/invalid JSON, ConfigError for semantic issues.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text,
                                   const std::string& origin);

// One CSV row of a sweep; `error` is set (and numeric fields NaN) when the
// solver for this row failed.
struct ExperimentRow {
  std::string geometry;
  std::string distribution;
  Eigen::Index n = 0;
  double epsilon = 0.0;
  double kappa = 0.0;
  std::string method;
  double param = 0.0;
  double re_nodes = 0.0;
  double re_offnodes = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  Eigen::Index iterations = 0;
  double cpu_seconds = 0.0;
  std::string error;
};

inline constexpr const char* kCsvHeader =
    "geometry,distribution,N,epsilon,kappa_A,method,param,Re_nodes,"
    "Re_offnodes,rho,eta,iterations,cpu_seconds";

std::string csv_line(const ExperimentRow& row);

struct RunSummary {
  std::string csv_path;
  std::vector<ExperimentRow> rows;
  Eigen::Index failures = 0;
};

// Full sweep: for each (epsilon, method) assemble, solve, evaluate, append
// one CSV row; GCV traces are written next to the CSV when the rule is GCV.
// Per-row solver failures are recorded without aborting the sweep.
RunSummary run_experiment(const ExperimentConfig& cfg,
                          std::ostream* log = nullptr);

struct SolveOnceOptions {
  bool dump_matrix = false;
  bool dump_gcv = false;
};

struct SolveOutcome {
  SolveReport report;
  ExperimentRow row;
};

// Single pipeline pass (one method, one epsilon); dump flags write A.txt,
// f.txt, alpha.txt and gcv.csv into output_dir.
SolveOutcome solve_once(const ExperimentConfig& cfg,
                        const SolveOnceOptions& opts = {});

}  // namespace mqhelm
