#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "difflab/barrier_ode.hpp"
#include "difflab/errors.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"

using namespace difflab;

namespace {

constexpr double kH0Linear = -0.28209479177387814;  // -1 / (2 sqrt(pi))

ScalarField field_on(const std::shared_ptr<const Grid>& grid,
                     const std::function<double(double)>& f) {
  ScalarField out;
  out.grid = grid;
  const auto& r = grid->radial().r;
  for (double ri : r) out.values.push_back(f(ri));
  out.mask.assign(r.size(), kMaskInside);
  return out;
}

}  // namespace

TEST_CASE("starting pair closed form") {
  const auto lin = default_initial_data(1.0, 1.0);
  CHECK(lin.first == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(lin.second == doctest::Approx(kH0Linear).epsilon(1e-14));

  const auto sp = default_initial_data(0.75, 1.25);
  CHECK(sp.first == doctest::Approx(0.158646).epsilon(1e-4));
  CHECK(sp.second == doctest::Approx(-0.258386).epsilon(1e-4));
  CHECK(sp.first > 0.0);
  CHECK(sp.first < 0.5);

  CHECK_THROWS_AS(default_initial_data(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(default_initial_data(1.25, 0.75), ConfigError);
}

TEST_CASE("identity-flux profile matches the error function") {
  const BarrierSolution bs =
      solve_barrier_ode(make_linear(), 0.25, kH0Linear, 12.0);
  REQUIRE(!bs.xi_nodes.empty());
  CHECK(bs.initial_data.first == 0.25);
  CHECK(bs.initial_data.second == kH0Linear);

  double worst = 0.0;
  for (std::size_t i = 0; i < bs.xi_nodes.size(); ++i) {
    const double ref = 0.25 - 0.5 * std::erf(0.5 * bs.xi_nodes[i]);
    worst = std::max(worst, std::abs(bs.h_values[i] - ref));
    CHECK(bs.H_values[i] < 0.0);
  }
  CHECK(worst <= 1e-8);
  for (std::size_t i = 1; i < bs.h_values.size(); ++i)
    CHECK(bs.h_values[i] < bs.h_values[i - 1]);

  CHECK(bs.limits.second == doctest::Approx(-0.25).epsilon(1e-6));
  CHECK(bs.limits.first == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(bs.tail_bound <= 1e-12);
  CHECK(bs.delta_shift == 0.125);
}

TEST_CASE("profile limits sit inside the two-sided displays") {
  const Nonlinearity sp = make_sin_perturbed();
  const auto [h0, H0] = default_initial_data(sp.delta1, sp.delta2);
  const BarrierSolution bs = solve_barrier_ode(sp, h0, H0, 12.0);

  const double slack = 1e-9 + bs.tail_bound;
  const double lo_plus = h0 + (H0 / sp.delta1) * std::sqrt(M_PI * sp.delta2);
  const double hi_plus = h0 + (H0 / sp.delta2) * std::sqrt(M_PI * sp.delta1);
  CHECK(bs.limits.second >= lo_plus - slack);
  CHECK(bs.limits.second <= hi_plus + slack);
  const double lo_minus = h0 - (H0 / sp.delta2) * std::sqrt(M_PI * sp.delta1);
  const double hi_minus = h0 - (H0 / sp.delta1) * std::sqrt(M_PI * sp.delta2);
  CHECK(bs.limits.first >= lo_minus - slack);
  CHECK(bs.limits.first <= hi_minus + slack);

  CHECK(bs.limits.first < 1.0);
  CHECK(bs.limits.first > h0);
  CHECK(h0 > 0.0);
  CHECK(0.0 > bs.limits.second);

  const double k = -std::log2(bs.delta_shift);
  CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
  CHECK(bs.delta_shift <= 0.5);

  CHECK_THROWS_AS(solve_barrier_ode(sp, h0, H0, 8.0), ConfigError);
  CHECK_THROWS_AS(solve_barrier_ode(sp, h0, 0.1, 12.0), ConfigError);
  CHECK_THROWS_AS(solve_barrier_ode(sp, 1.5, H0, 12.0), ConfigError);
  CHECK_THROWS_AS(solve_barrier_ode(sp, -0.1, H0, 12.0), ConfigError);
}

TEST_CASE("shifted profile evaluation") {
  const BarrierSolution bs =
      solve_barrier_ode(make_linear(), 0.25, kH0Linear, 12.0);
  CHECK(barrier_f(bs, 0.0) ==
        doctest::Approx(0.25 - 0.5 * std::erf(0.125)).epsilon(1e-6));
  CHECK(barrier_f(bs, 0.0) == doctest::Approx(0.1798424).epsilon(1e-5));
  CHECK(barrier_f(bs, 2.0) ==
        doctest::Approx(0.25 - 0.5 * std::erf(1.125)).epsilon(1e-5));
  CHECK(barrier_f(bs, 100.0) == doctest::Approx(bs.limits.second));
  CHECK(barrier_f(bs, -100.0) == doctest::Approx(bs.limits.first));
  CHECK(barrier_f(bs, 0.0) > barrier_f(bs, 1.0));
  CHECK(barrier_f(bs, 1.0) > barrier_f(bs, 2.0));
}

TEST_CASE("subsolution field maps distance through the profile") {
  const BarrierSolution bs =
      solve_barrier_ode(make_linear(), 0.25, kH0Linear, 12.0);
  auto grid = std::make_shared<Grid>();
  RadialGrid rg;
  rg.r = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  rg.dim = 2;
  grid->shape = rg;
  ScalarField dstar = field_on(grid, [](double r) { return r - 1.0; });

  const double t = 0.01;
  const ScalarField w = subsolution_field(bs, dstar, t);
  CHECK(w.values[2] == doctest::Approx(barrier_f(bs, 0.0)));
  CHECK(w.values[4] == doctest::Approx(bs.limits.second).epsilon(1e-6));
  CHECK(w.values[0] == doctest::Approx(bs.limits.first).epsilon(1e-6));

  dstar.mask[3] = kMaskOutside;
  const ScalarField wm = subsolution_field(bs, dstar, t);
  CHECK(wm.values[3] == 0.0);
  CHECK_THROWS_AS(subsolution_field(bs, dstar, 0.0), DomainError);
}

TEST_CASE("boundary lower bound on the complement-indicator flow") {
  RadialProblem p;
  p.grid.r = graded_nodes(0.0, 8.0, 4e-3, 1.08, 0.08, {1.0});
  p.grid.dim = 2;
  p.left = RadialEnd::pole;
  p.right = RadialEnd::far_field;
  p.initial.pointwise = [](double r) { return r > 1.0 ? 1.0 : 0.0; };
  p.initial.jumps = {1.0};
  p.set_distance = [](double r) { return r <= 1.0 ? 1.0 - r : 0.0; };

  SolverOptions opt;
  opt.stepping.policy = TimeStepPolicy::proportional;
  opt.stepping.rho = 5e-3;
  opt.stepping.dt_min = 1e-7;
  const FieldSeries s = solve_radial(p, make_linear(), opt,
                                     {1e-3, 3e-3, 1e-2, 3e-2});

  const BarrierSolution bs =
      solve_barrier_ode(make_linear(), 0.25, kH0Linear, 12.0);
  const ScalarField dstar =
      field_on(s.snapshots[0].field.grid, [](double r) { return 1.0 - r; });

  const LowerBoundReport rep = lower_bound_c0(bs, make_linear(), s, dstar,
                                              0.05, 1e-9);
  CHECK(rep.c0 == doctest::Approx(0.1798424).epsilon(1e-4));
  CHECK(rep.pass());
  CHECK(rep.violations == 0);
  CHECK(rep.comparisons > 0);
  CHECK(rep.worst_gap >= -1e-9);
  CHECK(rep.boundary_min >= rep.c0 - 1e-3);
  CHECK(rep.boundary_min < 1.0);
  CHECK(rep.window_clipped);
  CHECK(rep.tau_effective < rep.tau_requested);
  CHECK(rep.collar_width > 0.0);
  CHECK(rep.max_laplacian > 0.0);

  const LowerBoundReport narrow = lower_bound_c0(bs, make_linear(), s, dstar,
                                                 1e-3, 1e-9);
  CHECK_FALSE(narrow.window_clipped);
  CHECK(narrow.tau_effective == doctest::Approx(1e-3));

  CHECK_THROWS_AS(lower_bound_c0(bs, make_linear(), s, dstar, 0.05, 1e-9,
                                 1e-4),
                  ResolutionError);
  CHECK_THROWS_AS(lower_bound_c0(bs, make_linear(), s, dstar, -1.0, 1e-9),
                  DomainError);
}
