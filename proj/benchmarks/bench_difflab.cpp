#include <benchmark/benchmark.h>

#include <cmath>

#include "difflab/asymptotics.hpp"
#include "difflab/barrier_ode.hpp"
#include "difflab/geometry.hpp"
#include "difflab/grid.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"

using namespace difflab;

namespace {

void bench_big_phi_quadrature(benchmark::State& state) {
  const Nonlinearity sp = make_sin_perturbed();
  double s = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_big_phi(sp, s));
    s = s < 1e3 ? s * 1.7 : 1e-4;
  }
}
BENCHMARK(bench_big_phi_quadrature);

void bench_big_psi(benchmark::State& state) {
  const Nonlinearity sp = make_sin_perturbed();
  double y = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_big_psi(sp, y));
    y = y < 10.0 ? y + 0.37 : -10.0;
  }
}
BENCHMARK(bench_big_psi);

void bench_big_phi_from_log(benchmark::State& state) {
  const BigPhiEvaluator ev(make_sin_perturbed());
  double L = -3000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.from_log(L));
    L = L < 0.0 ? L + 11.0 : -3000.0;
  }
}
BENCHMARK(bench_big_phi_from_log);

void bench_fast_march(benchmark::State& state) {
  DomainSpec spec;
  spec.kind = DomainKind::exterior;
  spec.dimension = 2;
  spec.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 1.0});
  CartesianGrid2D grid;
  grid.origin = {-2.0, -2.0};
  grid.h = 0.02;
  grid.nx = 201;
  grid.ny = 201;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fast_march_distance(spec, grid));
  }
}
BENCHMARK(bench_fast_march)->Unit(benchmark::kMillisecond);

void bench_radial_step_halfline(benchmark::State& state) {
  RadialProblem p;
  p.grid.r = graded_nodes(0.0, 6.0, 5e-3, 1.1, 0.05, {0.0});
  p.grid.dim = 1;
  p.left = RadialEnd::dirichlet;
  p.left_value = 1.0;
  p.right = RadialEnd::far_field;
  p.initial.pointwise = [](double) { return 0.0; };
  p.set_distance = [](double r) { return r; };
  SolverOptions opt;
  opt.stepping.policy = TimeStepPolicy::proportional;
  opt.stepping.rho = 1e-2;
  opt.stepping.dt_min = 1e-6;
  const Nonlinearity sp = make_sin_perturbed();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_radial(p, sp, opt, {1e-2}));
  }
}
BENCHMARK(bench_radial_step_halfline)->Unit(benchmark::kMillisecond);

void bench_varadhan_transform(benchmark::State& state) {
  auto grid = std::make_shared<Grid>();
  RadialGrid rg;
  rg.r = graded_nodes(0.0, 6.0, 1e-3, 1.05, 0.03, {0.0});
  rg.dim = 1;
  grid->shape = rg;
  ScalarField f;
  f.grid = grid;
  const auto& r = grid->radial().r;
  std::vector<double> logs;
  for (double ri : r) logs.push_back(-ri * ri / 4e-3);
  f.log_values = logs;
  f.values.assign(r.size(), 0.0);
  f.mask.assign(r.size(), kMaskInside);
  const Nonlinearity sp = make_sin_perturbed();
  for (auto _ : state) {
    benchmark::DoNotOptimize(varadhan_field(f, 1e-3, sp));
  }
}
BENCHMARK(bench_varadhan_transform)->Unit(benchmark::kMillisecond);

void bench_barrier_profile(benchmark::State& state) {
  const Nonlinearity sp = make_sin_perturbed();
  const auto [h0, H0] = default_initial_data(sp.delta1, sp.delta2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_barrier_ode(sp, h0, H0, 12.0));
  }
}
BENCHMARK(bench_barrier_profile)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
