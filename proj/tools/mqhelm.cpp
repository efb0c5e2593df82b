// Command-line driver: experiment sweeps, single solves, invariant
// validation and point-set generation for the MQ-RBF Helmholtz solver.

#include "mqhelm/experiment.hpp"
#include "mqhelm/selfcheck.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

int cmd_run(const std::string& config_path) {
  const mqhelm::ExperimentConfig cfg = mqhelm::load_config(config_path);
  const mqhelm::RunSummary summary = mqhelm::run_experiment(cfg, &std::cerr);
  std::cout << "wrote " << summary.rows.size() << " rows to "
            << summary.csv_path << "\n";
  if (summary.failures > 0)
    std::cerr << summary.failures << " row(s) failed; see CSV for details\n";
  return kExitOk;
}

int cmd_solve(const std::string& config_path, bool dump_matrix,
              bool dump_gcv) {
  const mqhelm::ExperimentConfig cfg = mqhelm::load_config(config_path);
  mqhelm::SolveOnceOptions opts;
  opts.dump_matrix = dump_matrix;
  opts.dump_gcv = dump_gcv;
  const mqhelm::SolveOutcome outcome = mqhelm::solve_once(cfg, opts);
  std::cout << mqhelm::kCsvHeader << "\n"
            << mqhelm::csv_line(outcome.row) << "\n";
  return kExitOk;
}

int cmd_validate(bool full) {
  const auto report = mqhelm::selfcheck::run_selfchecks(full);
  for (const auto& check : report.checks)
    std::cout << (check.passed ? "PASS" : "FAIL") << "  " << check.name
              << "  (" << check.detail << ")\n";
  if (!report.all_passed()) {
    std::cerr << "validation failed\n";
    return kExitValidationFailure;
  }
  return kExitOk;
}

int cmd_gen_points(const std::string& geometry, Eigen::Index n,
                   const std::string& dist_spec, const std::string& out_path) {
  mqhelm::Distribution dist = mqhelm::Distribution::uniform();
  if (dist_spec.rfind("random", 0) == 0) {
    std::uint64_t seed = 0;
    if (auto pos = dist_spec.find(':'); pos != std::string::npos)
      seed = std::stoull(dist_spec.substr(pos + 1));
    dist = mqhelm::Distribution::random(seed);
  } else if (dist_spec.rfind("halton", 0) == 0) {
    std::uint64_t start = 1;
    if (auto pos = dist_spec.find(':'); pos != std::string::npos)
      start = std::stoull(dist_spec.substr(pos + 1));
    dist = mqhelm::Distribution::halton(start);
  } else if (dist_spec != "uniform") {
    throw mqhelm::ConfigError(
        "distribution must be uniform, random[:seed] or halton[:start]");
  }

  mqhelm::PointSet points = [&] {
    if (geometry == "cube") return mqhelm::generate_cube(n, dist);
    if (geometry == "sphere") return mqhelm::generate_sphere(n, dist);
    throw mqhelm::ConfigError("geometry must be cube or sphere");
  }();
  mqhelm::write_point_cloud(points, out_path);
  std::cout << "wrote " << points.total_count() << " points (N_I="
            << points.interior_count() << ", N_B=" << points.boundary_count()
            << ") to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meshless MQ-RBF Helmholtz solver with regularized Krylov "
               "methods"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment sweep from JSON");
  run->add_option("config", config_path, "JSON config file")->required();

  std::string solve_config;
  bool dump_matrix = false, dump_gcv = false;
  auto* solve = app.add_subcommand("solve", "Single solve from JSON");
  solve->add_option("config", solve_config, "JSON config file")->required();
  solve->add_flag("--dump-matrix", dump_matrix, "Write A.txt, f.txt, alpha.txt");
  solve->add_flag("--dump-gcv", dump_gcv, "Write gcv.csv");

  bool full = false;
  auto* validate = app.add_subcommand("validate", "Run invariant suites");
  validate->add_flag("--full", full, "Acceptance-scale sizes");

  std::string geometry, dist_spec = "uniform", out_path;
  Eigen::Index n_points = 0;
  auto* gen = app.add_subcommand("gen-points", "Generate a point cloud");
  gen->add_option("geometry", geometry, "cube or sphere")->required();
  gen->add_option("n", n_points, "target node count")->required();
  gen->add_option("distribution", dist_spec,
                  "uniform | random[:seed] | halton[:start]");
  gen->add_option("-o,--output", out_path, "output file")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path);
    if (solve->parsed()) return cmd_solve(solve_config, dump_matrix, dump_gcv);
    if (validate->parsed()) return cmd_validate(full);
    if (gen->parsed())
      return cmd_gen_points(geometry, n_points, dist_spec, out_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const mqhelm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const mqhelm::ParseError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const mqhelm::ValidationError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationFailure;
  }
  return kExitOk;
}
