#include "mqhelm/assembly.hpp"
#include "mqhelm/bidiag.hpp"
#include "mqhelm/evaluate.hpp"
#include "mqhelm/point_set.hpp"
#include "mqhelm/regularize.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace mqhelm;

CollocationSystem cube_system(Eigen::Index n, double eps) {
  const PointSet points = generate_cube(n, Distribution::random(7));
  const ManufacturedCase mc = cube_case(3.0);
  ProblemSpec spec{3.0, KernelParams(eps), BoundarySpec::dirichlet(),
                   [mc](const Vec3& x) { return manufactured_source(mc, x); },
                   [mc](const Vec3& x) { return exact_u(mc, x); }};
  return assemble(points, spec);
}

void BM_Assemble(benchmark::State& state) {
  const PointSet points =
      generate_cube(state.range(0), Distribution::random(7));
  const ManufacturedCase mc = cube_case(3.0);
  ProblemSpec spec{3.0, KernelParams(1.0), BoundarySpec::dirichlet(),
                   [mc](const Vec3& x) { return manufactured_source(mc, x); },
                   [mc](const Vec3& x) { return exact_u(mc, x); }};
  for (auto _ : state) {
    CollocationSystem sys = assemble(points, spec);
    benchmark::DoNotOptimize(sys.A.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assemble)->Arg(125)->Arg(359)->Arg(729)->Complexity();

void BM_Gkb(benchmark::State& state) {
  const CollocationSystem sys = cube_system(359, 1.0);
  for (auto _ : state) {
    GkbFactorization fac =
        gkb(sys.A, sys.rhs, state.range(0), Reorth::Full);
    benchmark::DoNotOptimize(fac.C.data());
  }
}
BENCHMARK(BM_Gkb)->Arg(35)->Arg(70)->Arg(140);

void BM_FullSvd(benchmark::State& state) {
  const CollocationSystem sys = cube_system(state.range(0), 1.0);
  for (auto _ : state) {
    SvdFactors s = svd(sys.A);
    benchmark::DoNotOptimize(s.sigma.data());
  }
}
BENCHMARK(BM_FullSvd)->Arg(125)->Arg(359);

void BM_HktSolve(benchmark::State& state) {
  const CollocationSystem sys = cube_system(359, 1.0);
  for (auto _ : state) {
    SolveReport rep = hkt_solve(sys.A, sys.rhs, state.range(0));
    benchmark::DoNotOptimize(rep.alpha.data());
  }
}
BENCHMARK(BM_HktSolve)->Arg(70)->Arg(140);

void BM_TikhRgSolve(benchmark::State& state) {
  const CollocationSystem sys = cube_system(359, 1.0);
  for (auto _ : state) {
    SvdFactors s = svd(sys.A);
    GcvSelection sel = select_lambda_gcv(
        s, sys.rhs, LambdaGrid{}.points(s.sigma(0)));
    SolveReport rep = tikhonov_filter_solve(s, sys.rhs, sel.lambda);
    benchmark::DoNotOptimize(rep.alpha.data());
  }
}
BENCHMARK(BM_TikhRgSolve);

}  // namespace

BENCHMARK_MAIN();
