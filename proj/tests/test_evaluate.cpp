#include "mqhelm/evaluate.hpp"

#include "mqhelm/assembly.hpp"
#include "mqhelm/regularize.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <cmath>

using namespace mqhelm;

TEST_CASE("exact_u values") {
  const ManufacturedCase cube = cube_case(3.0);
  CHECK(exact_u(cube, Vec3::Zero()) == 1.0);
  CHECK(exact_u(cube, Vec3{1, 1, 1}) ==
        doctest::Approx(std::exp(-3.0 / 20.0)).epsilon(1e-12));
  CHECK(exact_u(cube, Vec3{1, 1, 1}) == doctest::Approx(0.860708).epsilon(1e-6));

  const ManufacturedCase sphere = sphere_case(3.0);
  CHECK(exact_u(sphere, Vec3{0.25, 0.25, 0.0}) == 1.0);

  const ManufacturedCase pump = pump_case(3.0);
  CHECK(pump.sigma == 10.0);
}

TEST_CASE("manufactured_source closed forms") {
  SUBCASE("at the center with k = 3") {
    const ManufacturedCase cube = cube_case(3.0);
    CHECK(manufactured_source(cube, Vec3::Zero()) ==
          doctest::Approx(8.7).epsilon(1e-12));
  }
  SUBCASE("at the center with k = 0") {
    const ManufacturedCase cube = cube_case(0.0);
    CHECK(manufactured_source(cube, Vec3::Zero()) ==
          doctest::Approx(-0.3).epsilon(1e-12));
  }
  SUBCASE("vanishes where the radial factor crosses zero") {
    // 4 r^2 / sigma^2 = 6 / sigma with k = 0 gives r^2 = 1.5 sigma
    const ManufacturedCase cube = cube_case(0.0);
    const double r = std::sqrt(1.5 * cube.sigma);
    CHECK(manufactured_source(cube, Vec3{r, 0, 0}) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("manufactured_source consistent with the finite-difference "
          "Helmholtz operator") {
  oracles::Rng rng(60);
  for (const auto& mc : {cube_case(3.0), sphere_case(3.0), pump_case(3.0)}) {
    const auto u = [&mc](const Vec3& x) { return exact_u(mc, x); };
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vec3 p{rng.uniform_open(-1.0, 1.0), rng.uniform_open(-1.0, 1.0),
                   rng.uniform_open(-1.0, 1.0)};
      const double fd = oracles::fd_laplacian(u, p, 1e-4) +
                        mc.wavenumber * mc.wavenumber * exact_u(mc, p);
      worst = std::max(worst, std::abs(fd - manufactured_source(mc, p)));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("manufactured_case registry") {
  CHECK(manufactured_case("cube").has_value());
  CHECK(manufactured_case("sphere")->center(0) == 0.25);
  CHECK(manufactured_case("pump")->sigma == 10.0);
  CHECK(!manufactured_case("torus").has_value());
}

TEST_CASE("reconstruct") {
  const PointSet ps = generate_cube(27, Distribution::uniform());
  const KernelParams p(2.0);

  SUBCASE("unit coefficient reproduces one basis function") {
    Vector alpha = Vector::Zero(ps.total_count());
    alpha(5) = 1.0;
    const std::vector<Vec3> targets{Vec3{0.1, 0.2, 0.3}, Vec3{0.9, 0.8, 0.7}};
    const auto values = reconstruct(alpha, ps, p, targets);
    for (std::size_t t = 0; t < targets.size(); ++t)
      CHECK(values[t] ==
            doctest::Approx(mq_value((targets[t] - ps.node(5)).norm(), p)));
  }
  SUBCASE("zero coefficients give zero field") {
    const Vector alpha = Vector::Zero(ps.total_count());
    const std::vector<Vec3> targets{Vec3{0.5, 0.5, 0.5}};
    CHECK(reconstruct(alpha, ps, p, targets)[0] == 0.0);
  }
  SUBCASE("length mismatch throws") {
    const Vector alpha = Vector::Zero(ps.total_count() - 1);
    const std::vector<Vec3> targets{Vec3{0.5, 0.5, 0.5}};
    CHECK_THROWS_AS(reconstruct(alpha, ps, p, targets),
                    std::invalid_argument);
  }
  SUBCASE("interpolation round trip on a tiny well-conditioned set") {
    // Solve B alpha = u_samples directly and reconstruct at the nodes.
    std::vector<Vec3> nodes;
    for (Eigen::Index i = 0; i < 10; ++i) nodes.push_back(ps.node(i * 2));
    const KernelParams sharp(5.0);
    const auto n = static_cast<Eigen::Index>(nodes.size());
    Matrix b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        b(i, j) =
            mq_value((nodes[size_t(i)] - nodes[size_t(j)]).norm(), sharp);
    const ManufacturedCase mc = cube_case(3.0);
    Vector samples(n);
    for (Eigen::Index i = 0; i < n; ++i)
      samples(i) = exact_u(mc, nodes[size_t(i)]);
    const Vector alpha = Eigen::PartialPivLU<Matrix>(b).solve(samples);

    // reconstruct() needs a PointSet; rebuild one holding exactly `nodes`
    std::vector<Vec3> interior(nodes.begin(), nodes.end() - 1);
    std::vector<BoundaryPoint> boundary{{nodes.back(), Vec3{0, 0, 1}}};
    const PointSet centers(interior, boundary, "roundtrip");
    const auto values = reconstruct(alpha, centers, sharp, nodes);
    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(values[size_t(i)] ==
            doctest::Approx(samples(i)).epsilon(1e-8));
  }
}

TEST_CASE("relative_error") {
  const std::vector<double> u{1.0, 2.0};
  CHECK(relative_error(u, u) == 0.0);
  CHECK(relative_error(u, std::vector<double>{1.0, 2.2}) ==
        doctest::Approx(0.1));
  CHECK(relative_error(std::vector<double>{0.5, -1.0},
                       std::vector<double>{0.5, -1.001}) ==
        doctest::Approx(0.001));
  CHECK_THROWS_AS(relative_error(u, std::vector<double>{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(relative_error(std::vector<double>{0.0, 0.0}, u),
                  std::invalid_argument);
}

TEST_CASE("node and off-node errors stay within an order of magnitude") {
  // Smoothness sanity check on a small regularized cube solve; a direct
  // solve would push the node error to roundoff level and the comparison
  // would say nothing about the reconstructed field.
  const PointSet ps = generate_cube(125, Distribution::uniform());
  const ManufacturedCase mc = cube_case(3.0);
  const KernelParams p(2.0);
  ProblemSpec spec{3.0, p, BoundarySpec::dirichlet(),
                   [&](const Vec3& x) { return manufactured_source(mc, x); },
                   [&](const Vec3& x) { return exact_u(mc, x); }};
  const CollocationSystem sys = assemble(ps, spec);
  const SvdFactors s = svd(sys.A);
  const GcvSelection sel =
      select_lambda_gcv(s, sys.rhs, LambdaGrid{}.points(s.sigma(0)));
  const Vector alpha =
      tikhonov_filter_solve(s, sys.rhs, sel.lambda).alpha;

  std::vector<Vec3> nodes;
  for (Eigen::Index i = 0; i < ps.total_count(); ++i)
    nodes.push_back(ps.node(i));
  oracles::Rng rng(61);
  std::vector<Vec3> off;
  for (int i = 0; i < 500; ++i)
    off.emplace_back(rng.uniform_open(), rng.uniform_open(),
                     rng.uniform_open());

  const auto evaluate_re = [&](const std::vector<Vec3>& pts) {
    const auto approx = reconstruct(alpha, ps, p, pts);
    std::vector<double> exact(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      exact[i] = exact_u(mc, pts[i]);
    return relative_error(exact, approx);
  };
  const double re_nodes = evaluate_re(nodes);
  const double re_off = evaluate_re(off);
  CHECK(re_off <= 10.0 * std::max(re_nodes, 1e-16));
  CHECK(re_nodes <= 10.0 * re_off + 1e-12);
}
