#include "mqhelm/experiment.hpp"

#include "mqhelm/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mqhelm {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Method method_from_string(const std::string& s, std::vector<std::string>* bad) {
  if (s == "tikh_rg") return Method::TikhRg;
  if (s == "ine_tsvd") return Method::IneTsvd;
  if (s == "hkt") return Method::Hkt;
  if (s == "reg_gmres") return Method::RegGmres;
  if (bad) bad->push_back("unknown method '" + s + "'");
  return Method::TikhRg;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* geometry_name(ExperimentConfig::Geometry g) {
  switch (g) {
    case ExperimentConfig::Geometry::Cube: return "cube";
    case ExperimentConfig::Geometry::Sphere: return "sphere";
    case ExperimentConfig::Geometry::Imported: return "imported";
  }
  return "?";
}

ExperimentConfig parse_config_json(const std::string& text,
                                   const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }

  ExperimentConfig cfg;
  std::vector<std::string> problems;

  try {
    if (!doc.contains("geometry")) {
      problems.push_back("missing 'geometry'");
    } else {
      const std::string g = doc["geometry"].get<std::string>();
      if (g == "cube") cfg.geometry = ExperimentConfig::Geometry::Cube;
      else if (g == "sphere") cfg.geometry = ExperimentConfig::Geometry::Sphere;
      else if (g == "imported") {
        cfg.geometry = ExperimentConfig::Geometry::Imported;
        if (!doc.contains("geometry_path"))
          problems.push_back("imported geometry requires 'geometry_path'");
        else
          cfg.geometry_path = doc["geometry_path"].get<std::string>();
      } else {
        problems.push_back("unknown geometry '" + g + "'");
      }
    }

    if (doc.contains("distribution")) {
      const auto& d = doc["distribution"];
      std::string kind = d.is_string() ? d.get<std::string>()
                                       : d.value("kind", std::string{});
      if (kind == "uniform") {
        cfg.distribution = Distribution::uniform();
      } else if (kind == "random") {
        cfg.distribution =
            Distribution::random(d.is_object() ? d.value("seed", 0ULL) : 0ULL);
      } else if (kind == "halton") {
        cfg.distribution = Distribution::halton(
            d.is_object() ? d.value("start_index", 1ULL) : 1ULL);
        if (cfg.distribution.start_index < 1)
          problems.push_back("halton start_index must be >= 1");
      } else {
        problems.push_back("unknown distribution kind '" + kind + "'");
      }
    }

    cfg.n_target = doc.value("n_target", 125);
    if (cfg.n_target < 27) problems.push_back("n_target must be >= 27");

    if (!doc.contains("epsilon")) {
      problems.push_back("missing 'epsilon' (single value or sweep list)");
    } else if (doc["epsilon"].is_array()) {
      for (const auto& e : doc["epsilon"])
        cfg.epsilon.push_back(e.get<double>());
    } else {
      cfg.epsilon.push_back(doc["epsilon"].get<double>());
    }
    for (double e : cfg.epsilon)
      if (!(e > 0.0)) problems.push_back("epsilon entries must be > 0");
    if (cfg.epsilon.empty() && doc.contains("epsilon"))
      problems.push_back("epsilon sweep is empty");

    cfg.wavenumber = doc.value("wavenumber", 3.0);
    if (cfg.wavenumber < 0.0) problems.push_back("wavenumber must be >= 0");

    if (doc.contains("methods")) {
      for (const auto& m : doc["methods"])
        cfg.methods.push_back(
            method_from_string(m.get<std::string>(), &problems));
    } else {
      cfg.methods = {Method::TikhRg, Method::IneTsvd, Method::Hkt,
                     Method::RegGmres};
    }
    if (cfg.methods.empty()) problems.push_back("methods list is empty");

    if (doc.contains("k_trunc")) {
      const auto& k = doc["k_trunc"];
      if (k.is_string()) {
        if (k.get<std::string>() != "auto")
          problems.push_back("k_trunc must be an integer or \"auto\"");
      } else {
        cfg.k_trunc = k.get<Eigen::Index>();
        if (*cfg.k_trunc < 1) problems.push_back("k_trunc must be >= 1");
      }
    }

    cfg.ell = doc.value("ell", 0);
    if (cfg.ell == 0)
      cfg.ell = cfg.k_trunc ? 3 * *cfg.k_trunc : 140;
    cfg.ell = std::min<Eigen::Index>(cfg.ell, cfg.n_target);
    if (cfg.ell < 1) problems.push_back("ell must be >= 1");
    if (cfg.k_trunc && *cfg.k_trunc > cfg.ell)
      problems.push_back("k_trunc must not exceed ell");

    const std::string rule = doc.value("rule", std::string("gcv"));
    if (rule == "gcv") cfg.rule = SelectionRule::Gcv;
    else if (rule == "lcurve") cfg.rule = SelectionRule::Lcurve;
    else problems.push_back("rule must be 'gcv' or 'lcurve'");

    if (doc.contains("lambda_grid")) {
      const auto& g = doc["lambda_grid"];
      cfg.lambda_grid.min_factor = g.value("min_factor", 1e-14);
      cfg.lambda_grid.max_factor = g.value("max_factor", 1.0);
      cfg.lambda_grid.count = g.value("count", 60);
      if (!(cfg.lambda_grid.min_factor > 0.0) ||
          !(cfg.lambda_grid.max_factor >= cfg.lambda_grid.min_factor) ||
          cfg.lambda_grid.count < 1)
        problems.push_back("invalid lambda_grid");
    }

    cfg.seed = doc.value("seed", 0ULL);
    cfg.output_dir = doc.value("output_dir", std::string("."));
  } catch (const json::exception& e) {
    problems.push_back(std::string("malformed field: ") + e.what());
  }

  if (!problems.empty()) {
    std::ostringstream os;
    os << origin << ": invalid configuration:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ConfigError(os.str());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str(), path);
}

std::string csv_line(const ExperimentRow& row) {
  std::ostringstream os;
  os << row.geometry << ',' << row.distribution << ',' << row.n << ','
     << format_double(row.epsilon) << ',' << format_double(row.kappa) << ','
     << row.method << ',' << format_double(row.param) << ','
     << format_double(row.re_nodes) << ',' << format_double(row.re_offnodes)
     << ',' << format_double(row.rho) << ',' << format_double(row.eta) << ','
     << row.iterations << ',' << format_double(row.cpu_seconds);
  return os.str();
}

namespace {

PointSet build_points(const ExperimentConfig& cfg) {
  switch (cfg.geometry) {
    case ExperimentConfig::Geometry::Cube:
      return generate_cube(cfg.n_target, cfg.distribution);
    case ExperimentConfig::Geometry::Sphere:
      return generate_sphere(cfg.n_target, cfg.distribution);
    case ExperimentConfig::Geometry::Imported:
      return import_point_cloud(cfg.geometry_path);
  }
  throw std::logic_error("unreachable");
}

ManufacturedCase case_for(const ExperimentConfig& cfg) {
  switch (cfg.geometry) {
    case ExperimentConfig::Geometry::Cube: return cube_case(cfg.wavenumber);
    case ExperimentConfig::Geometry::Sphere:
      return sphere_case(cfg.wavenumber);
    case ExperimentConfig::Geometry::Imported:
      return pump_case(cfg.wavenumber);
  }
  throw std::logic_error("unreachable");
}

ProblemSpec problem_for(const ExperimentConfig& cfg, double epsilon) {
  const ManufacturedCase mc = case_for(cfg);
  ProblemSpec spec{cfg.wavenumber, KernelParams(epsilon),
                   BoundarySpec::dirichlet(),
                   [mc](const Vec3& x) { return manufactured_source(mc, x); },
                   [mc](const Vec3& x) { return exact_u(mc, x); }};
  return spec;
}

// Independent evaluation targets strictly inside the domain. Imported
// geometries have no membership oracle, so targets are drawn near segment
// midpoints between an interior node and its nearest interior neighbour.
std::vector<Vec3> offnode_targets(const ExperimentConfig& cfg,
                                  const PointSet& points, std::size_t count) {
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Vec3> out;
  out.reserve(count);
  switch (cfg.geometry) {
    case ExperimentConfig::Geometry::Cube:
      for (std::size_t i = 0; i < count; ++i)
        out.emplace_back(rng.uniform_open(), rng.uniform_open(),
                         rng.uniform_open());
      break;
    case ExperimentConfig::Geometry::Sphere:
      while (out.size() < count) {
        const Vec3 p{rng.uniform_open(-1.0, 1.0), rng.uniform_open(-1.0, 1.0),
                     rng.uniform_open(-1.0, 1.0)};
        if (p.squaredNorm() < 1.0) out.push_back(p);
      }
      break;
    case ExperimentConfig::Geometry::Imported: {
      const auto& interior = points.interior();
      const std::size_t ni = interior.size();
      for (std::size_t i = 0; i < count; ++i) {
        const auto a = static_cast<std::size_t>(rng.uniform() *
                                                static_cast<double>(ni)) % ni;
        Vec3 other = points.boundary().front().position;
        double best = (interior[a] - other).squaredNorm();
        for (std::size_t b = 0; b < ni; ++b) {
          if (b == a) continue;
          const double d = (interior[a] - interior[b]).squaredNorm();
          if (d < best) {
            best = d;
            other = interior[b];
          }
        }
        const double u = rng.uniform_open(0.35, 0.65);
        out.emplace_back(u * interior[a] + (1.0 - u) * other);
      }
      break;
    }
  }
  return out;
}

struct SharedEpsState {
  CollocationSystem system;
  double assemble_seconds = 0.0;
  double kappa = kNaN;
  double svd_seconds = 0.0;
  std::optional<SvdFactors> factors;
};

SharedEpsState prepare_eps(const ExperimentConfig& cfg, const PointSet& points,
                           double epsilon, bool need_svd) {
  const double t0 = now_seconds();
  CollocationSystem system = assemble(points, problem_for(cfg, epsilon));
  const double t1 = now_seconds();
  SharedEpsState state{std::move(system), t1 - t0, kNaN, 0.0, std::nullopt};
  if (need_svd) {
    const double t2 = now_seconds();
    try {
      state.factors = svd(state.system.A);
      const auto& sig = state.factors->sigma;
      if (sig.size() > 0) state.kappa = sig(0) / sig(sig.size() - 1);
    } catch (const std::exception&) {
      state.factors.reset();  // rows needing the SVD fail individually
    }
    state.svd_seconds = now_seconds() - t2;
  }
  return state;
}

SolveReport dispatch_solver(const ExperimentConfig& cfg, Method method,
                            const SharedEpsState& state) {
  const Matrix& A = state.system.A;
  const Vector& f = state.system.rhs;
  const Eigen::Index ell = std::min<Eigen::Index>(cfg.ell, A.rows());
  switch (method) {
    case Method::TikhRg: {
      if (!state.factors)
        throw std::runtime_error("full SVD unavailable for this system");
      if (cfg.rule == SelectionRule::Gcv) {
        GcvSelection sel =
            select_lambda_gcv(*state.factors, f,
                              cfg.lambda_grid.points(state.factors->sigma(0)));
        SolveReport rep = tikhonov_filter_solve(*state.factors, f, sel.lambda);
        rep.gcv_trace = std::move(sel.trace);
        return rep;
      }
      const Vector grid = cfg.lambda_grid.points(state.factors->sigma(0));
      std::vector<LcurveSample> samples;
      std::vector<std::array<double, 3>> trace;
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        SolveReport probe = tikhonov_filter_solve(*state.factors, f, grid(i));
        if (probe.rho > 0.0 && probe.eta > 0.0) {
          samples.push_back({grid(i), probe.rho, probe.eta});
          trace.push_back(
              {grid(i), std::log(probe.rho), std::log(probe.eta)});
        }
      }
      const LcurveCorner corner = lcurve_corner(samples);
      SolveReport rep = tikhonov_filter_solve(*state.factors, f, corner.lambda);
      rep.lcurve_trace = std::move(trace);
      return rep;
    }
    case Method::IneTsvd:
      return ine_tsvd(A, f, ell, cfg.k_trunc);
    case Method::Hkt:
      return hkt_solve(A, f, ell, cfg.rule, cfg.lambda_grid);
    case Method::RegGmres:
      return reg_gmres(A, f, ell, cfg.lambda_grid);
    case Method::Tsvd:
      break;
  }
  throw std::invalid_argument("unsupported method in experiment");
}

ExperimentRow make_row(const ExperimentConfig& cfg, const PointSet& points,
                       double epsilon, Method method,
                       const SharedEpsState& state,
                       const std::vector<Vec3>& targets,
                       SolveReport* report_out) {
  ExperimentRow row;
  row.geometry = geometry_name(cfg.geometry);
  row.distribution = cfg.distribution.name();
  row.n = points.total_count();
  row.epsilon = epsilon;
  row.kappa = state.kappa;
  row.method = method_name(method);
  row.param = row.re_nodes = row.re_offnodes = row.rho = row.eta = kNaN;
  row.cpu_seconds = kNaN;

  const ManufacturedCase mc = case_for(cfg);
  try {
    const double t0 = now_seconds();
    SolveReport rep = dispatch_solver(cfg, method, state);
    const double solve_seconds = now_seconds() - t0;

    const KernelParams kernel(epsilon);
    std::vector<Vec3> nodes;
    nodes.reserve(static_cast<std::size_t>(points.total_count()));
    for (Eigen::Index i = 0; i < points.total_count(); ++i)
      nodes.push_back(points.node(i));
    const std::vector<double> u_nodes =
        reconstruct(rep.alpha, points, kernel, nodes);
    std::vector<double> u_exact_nodes(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      u_exact_nodes[i] = exact_u(mc, nodes[i]);
    row.re_nodes = relative_error(u_exact_nodes, u_nodes);

    const std::vector<double> u_off =
        reconstruct(rep.alpha, points, kernel, targets);
    std::vector<double> u_exact_off(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
      u_exact_off[i] = exact_u(mc, targets[i]);
    row.re_offnodes = relative_error(u_exact_off, u_off);

    row.param = rep.param;
    row.rho = rep.rho;
    row.eta = rep.eta;
    row.iterations = rep.iterations;
    row.cpu_seconds = state.assemble_seconds + solve_seconds +
                      (method == Method::TikhRg ? state.svd_seconds : 0.0);
    if (report_out) *report_out = std::move(rep);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  const PointSet points = build_points(cfg);
  const std::vector<Vec3> targets = offnode_targets(cfg, points, 500);

  const bool need_svd = true;  // kappa_A column is part of the schema
  RunSummary summary;
  summary.csv_path = (fs::path(cfg.output_dir) / "results.csv").string();
  std::ofstream csv(summary.csv_path);
  if (!csv) throw ParseError("cannot open for writing: " + summary.csv_path);
  csv << kCsvHeader << "\n";

  for (std::size_t ei = 0; ei < cfg.epsilon.size(); ++ei) {
    const double eps = cfg.epsilon[ei];
    std::optional<SharedEpsState> maybe_state;
    std::string eps_error;
    try {
      maybe_state = prepare_eps(cfg, points, eps, need_svd);
    } catch (const std::exception& e) {
      eps_error = e.what();
    }
    if (!maybe_state) {
      for (Method method : cfg.methods) {
        ExperimentRow row;
        row.geometry = geometry_name(cfg.geometry);
        row.distribution = cfg.distribution.name();
        row.n = points.total_count();
        row.epsilon = eps;
        row.kappa = row.param = row.re_nodes = row.re_offnodes = row.rho =
            row.eta = row.cpu_seconds = kNaN;
        row.method = method_name(method);
        row.error = "assembly failed: " + eps_error;
        ++summary.failures;
        if (log)
          *log << "row failed (epsilon=" << eps << ", method="
               << method_name(method) << "): " << row.error << "\n";
        csv << csv_line(row) << "\n";
        summary.rows.push_back(std::move(row));
      }
      continue;
    }
    SharedEpsState& state = *maybe_state;
    for (Method method : cfg.methods) {
      SolveReport rep;
      ExperimentRow row =
          make_row(cfg, points, eps, method, state, targets, &rep);
      const bool ok = row.error.empty();
      if (!ok) {
        ++summary.failures;
        if (log)
          *log << "row failed (epsilon=" << eps << ", method="
               << method_name(method) << "): " << row.error << "\n";
      } else {
        if (cfg.rule == SelectionRule::Gcv && !rep.gcv_trace.empty()) {
          std::ostringstream name;
          name << "gcv_" << method_name(method) << "_eps" << ei << ".csv";
          write_gcv_trace_csv(rep.gcv_trace,
                              (fs::path(cfg.output_dir) / name.str()).string());
        }
        if (cfg.rule == SelectionRule::Lcurve && !rep.lcurve_trace.empty()) {
          std::ostringstream name;
          name << "lcurve_" << method_name(method) << "_eps" << ei << ".csv";
          write_lcurve_trace_csv(
              rep.lcurve_trace,
              (fs::path(cfg.output_dir) / name.str()).string());
        }
        if (log)
          *log << "epsilon=" << eps << " method=" << method_name(method)
               << " Re_nodes=" << row.re_nodes << "\n";
      }
      csv << csv_line(row) << "\n";
      csv.flush();
      summary.rows.push_back(std::move(row));
    }
  }
  return summary;
}

SolveOutcome solve_once(const ExperimentConfig& cfg,
                        const SolveOnceOptions& opts) {
  if (cfg.methods.size() != 1)
    throw ConfigError("solve_once: exactly one method required");
  if (cfg.epsilon.size() != 1)
    throw ConfigError("solve_once: exactly one epsilon required");

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  const PointSet points = build_points(cfg);
  const std::vector<Vec3> targets = offnode_targets(cfg, points, 500);
  SharedEpsState state = prepare_eps(cfg, points, cfg.epsilon[0], true);

  SolveOutcome outcome;
  outcome.row = make_row(cfg, points, cfg.epsilon[0], cfg.methods[0], state,
                         targets, &outcome.report);
  if (!outcome.row.error.empty())
    throw std::runtime_error("solve failed: " + outcome.row.error);

  if (opts.dump_matrix) {
    write_matrix(state.system.A,
                 (fs::path(cfg.output_dir) / "A.txt").string());
    std::ofstream fout((fs::path(cfg.output_dir) / "f.txt").string());
    fout.precision(17);
    for (Eigen::Index i = 0; i < state.system.rhs.size(); ++i)
      fout << state.system.rhs(i) << "\n";
    std::ofstream aout((fs::path(cfg.output_dir) / "alpha.txt").string());
    aout.precision(17);
    for (Eigen::Index i = 0; i < outcome.report.alpha.size(); ++i)
      aout << outcome.report.alpha(i) << "\n";
  }
  if (opts.dump_gcv && !outcome.report.gcv_trace.empty())
    write_gcv_trace_csv(outcome.report.gcv_trace,
                        (fs::path(cfg.output_dir) / "gcv.csv").string());
  return outcome;
}

}  // namespace mqhelm
