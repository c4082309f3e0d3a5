#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "difflab/asymptotics.hpp"
#include "difflab/errors.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"
#include "oracles.hpp"

using namespace difflab;

namespace {

RadialGrid graded(double lo, double hi, double h_min, double ratio,
                  double h_max, std::vector<double> attractors, int dim) {
  RadialGrid g;
  g.r = graded_nodes(lo, hi, h_min, ratio, h_max, std::move(attractors));
  g.dim = dim;
  return g;
}

SolverOptions log_opts(double rho) {
  SolverOptions o;
  o.representation = Representation::logarithmic;
  o.stepping.policy = TimeStepPolicy::proportional;
  o.stepping.rho = rho;
  o.stepping.dt_min = 1e-7;
  return o;
}

RadialProblem halfline_problem() {
  RadialProblem p;
  p.grid = graded(0.0, 6.0, 1e-3, 1.05, 0.03, {0.0}, 1);
  p.left = RadialEnd::dirichlet;
  p.left_value = 1.0;
  p.right = RadialEnd::far_field;
  p.initial.pointwise = [](double) { return 0.0; };
  p.set_distance = [](double r) { return r; };
  return p;
}

ScalarField field_on(const std::shared_ptr<const Grid>& grid,
                     const std::function<double(double)>& f) {
  ScalarField out;
  out.grid = grid;
  const auto& r = grid->radial().r;
  out.values.reserve(r.size());
  for (double ri : r) out.values.push_back(f(ri));
  out.mask.assign(r.size(), kMaskInside);
  return out;
}

ScalarField synthetic_log_field(const std::vector<double>& log_values) {
  auto grid = std::make_shared<Grid>();
  RadialGrid rg;
  for (std::size_t i = 0; i < log_values.size(); ++i)
    rg.r.push_back(0.5 * static_cast<double>(i));
  rg.dim = 1;
  grid->shape = rg;
  ScalarField f;
  f.grid = grid;
  f.log_values = log_values;
  for (double L : log_values) f.values.push_back(std::exp(L));
  f.mask.assign(log_values.size(), kMaskInside);
  return f;
}

}  // namespace

TEST_CASE("transformed field reads log values far below underflow") {
  const double deep = oracle::log_erfc(50.0);  // about -2504.48, u ~ 1e-1088
  ScalarField f = synthetic_log_field({0.0, -1.0, deep});
  const ScalarField v = varadhan_field(f, 1e-4, make_linear());
  CHECK(v.values[0] == doctest::Approx(0.0));
  CHECK(v.values[1] == doctest::Approx(4e-4).epsilon(1e-12));
  CHECK(v.values[2] == doctest::Approx(-4e-4 * deep).epsilon(1e-12));
  CHECK(v.values[2] == doctest::Approx(1.0018).epsilon(1e-3));

  f.mask[1] = kMaskOutside;
  const ScalarField vm = varadhan_field(f, 1e-4, make_linear());
  CHECK(vm.values[1] == 0.0);
  CHECK(vm.mask[1] == kMaskOutside);

  ScalarField primal = synthetic_log_field({std::log(0.3), -2.0, -3.0});
  primal.log_values.reset();
  const ScalarField vp = varadhan_field(primal, 0.5, make_linear());
  CHECK(vp.values[0] == doctest::Approx(-2.0 * std::log(0.3)).epsilon(1e-12));

  ScalarField tiny = primal;
  tiny.values[2] = 1e-310;
  const ScalarField vt = varadhan_field(tiny, 0.5, make_linear());
  CHECK(vt.mask[2] == kMaskOutside);

  ScalarField bad = primal;
  bad.values[1] = -0.5;
  CHECK_THROWS_AS(varadhan_field(bad, 0.5, make_linear()), DomainError);
  CHECK_THROWS_AS(varadhan_field(primal, 0.0, make_linear()), DomainError);
}

TEST_CASE("log-argument transform evaluator matches the direct one") {
  const Nonlinearity sp = make_sin_perturbed();
  const BigPhiEvaluator ev(sp);
  CHECK(ev.dphi_at_zero() == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(ev.from_value(2.0) ==
        doctest::Approx(0.714541407028419).epsilon(1e-8));
  for (double u : {0.05, 0.4, 1.0, 5.0})
    CHECK(ev.from_value(u) == doctest::Approx(eval_big_phi(sp, u)).epsilon(1e-8));

  // Correction limit at the origin: 0.25 * (gamma - Ci(1)).
  const double corr0 = 0.25 * (0.57721566490153286 - 0.337403922900968);
  CHECK(ev.from_log(-1e4) - 1.25 * (-1e4) ==
        doctest::Approx(corr0).epsilon(1e-5));

  CHECK_THROWS_AS(ev.from_value(0.0), DomainError);
  CHECK_THROWS_AS(ev.from_value(-1.0), DomainError);
}

TEST_CASE("transform convergence report on the half-line flow") {
  const RadialProblem p = halfline_problem();
  const FieldSeries s =
      solve_radial(p, make_linear(), log_opts(2e-3), {1e-3, 1e-2});
  const ScalarField dist =
      field_on(s.snapshots[0].field.grid, [](double r) { return r; });

  const VaradhanReport rep =
      convergence_report(s, make_linear(), dist, 0.5, 2.0);
  REQUIRE(rep.times.size() == 2);
  CHECK(rep.times[0] > rep.times[1]);  // ordered from late to early
  CHECK(rep.K_node_count > 50);
  CHECK(rep.errors_decreasing());
  CHECK(rep.final_error() <= 0.05);
  CHECK(rep.final_error() >= 0.005);
  CHECK(rep.sup_errors[0] == doctest::Approx(0.115).epsilon(0.2));
  CHECK(rep.envelope_pass());
  CHECK(rep.envelope_worst >= -1e-12);

  const VaradhanReport tight =
      convergence_report(s, make_linear(), dist, 0.5, 2.0, 1e-4);
  CHECK_FALSE(tight.envelope_pass());
  CHECK(tight.envelope_violations > 0);
  CHECK(tight.envelope_worst < 0.0);

  const ScalarField v = varadhan_field(s.snapshots[0].field, 1e-3,
                                       make_linear());
  CHECK(radial_sample(v, 1.0) == doctest::Approx(1.0133).epsilon(0.02));

  CHECK_THROWS_AS(convergence_report(s, make_linear(), dist, 100.0),
                  ConfigError);
}

TEST_CASE("rescaled pressure approaches the quadratic-cost value") {
  const RadialProblem p = halfline_problem();
  const FieldSeries s =
      solve_radial(p, make_linear(), log_opts(2e-3), {1e-3, 5e-3, 1e-2});

  const ScalarField v = pressure_field(s, make_linear(), 1e-2, 1.0);
  CHECK(radial_sample(v, 1.0) == doctest::Approx(0.25).epsilon(0.08));
  CHECK(std::abs(radial_sample(v, 1.0) - 0.25) <= 0.02);

  const ScalarField vi = pressure_field(s, make_linear(), 1e-2, 0.7);
  CHECK(radial_sample(vi, 1.0) > radial_sample(v, 1.0));  // v grows as tau shrinks

  FieldSeries ones = s;
  for (Snapshot& snap : ones.snapshots) {
    snap.field.values.assign(snap.field.size(), 1.0);
    if (snap.field.log_values)
      snap.field.log_values->assign(snap.field.size(), 0.0);
  }
  const ScalarField vz = pressure_field(ones, make_linear(), 1e-2, 1.0);
  for (double value : vz.values) CHECK(value == doctest::Approx(0.0));

  CHECK_THROWS_AS(pressure_field(s, make_linear(), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(pressure_field(s, make_linear(), 5e-5, 1.0), DomainError);
  CHECK_THROWS_AS(pressure_field(s, make_linear(), -1e-2, 1.0), DomainError);
}

TEST_CASE("gradient monitor sees a uniform band across the eps sweep") {
  RadialProblem p = halfline_problem();
  p.grid = graded(0.0, 6.0, 1e-3, 1.05, 0.03, {0.0}, 1);
  const std::vector<double> times{7.5e-3, 1e-2, 1.5e-2, 2e-2, 3e-2, 4e-2};
  const FieldSeries s = solve_radial(p, make_linear(), log_opts(2e-3), times);
  const ScalarField dist =
      field_on(s.snapshots[0].field.grid, [](double r) { return r; });

  PressureSeries ps = build_pressure_series(s, make_linear(),
                                            {4e-2, 2e-2, 1e-2}, {0.75, 1.0});
  REQUIRE(ps.fields.size() == 3);
  REQUIRE(ps.fields[0].size() == 2);

  const GradientReport rep = gradient_monitor(ps, dist, 0.5, 2.0, 1.5);
  CHECK(rep.uniform_band);
  CHECK(rep.positive);
  CHECK(rep.band_factor_grad >= 1.0);
  CHECK(rep.band_factor_grad <= 1.5);
  CHECK(rep.band_factor_vmax <= 1.5);
  CHECK(rep.band_factor_holder <= 1.5);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(rep.grad_sup[e] >= 0.2);
    CHECK(rep.grad_sup[e] <= 1.5);
    CHECK(rep.v_max[e] <= 1.5);
    CHECK(rep.v_min[e] >= 0.05);
    CHECK(std::isfinite(rep.z_max[e]));
  }
  CHECK(rep.lambda > 0.0);
  CHECK(ps.grad_sup.size() == 3);
  CHECK(ps.holder_const.size() == 3);

  PressureSeries two = build_pressure_series(s, make_linear(), {4e-2, 2e-2},
                                             {0.75, 1.0});
  CHECK_THROWS_AS(gradient_monitor(two, dist, 0.5, 2.0, 1.5), ConfigError);
  CHECK_THROWS_AS(build_pressure_series(s, make_linear(), {1e-2, 2e-2},
                                        {0.75, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(gradient_monitor(ps, dist, 2.0, 0.5, 1.5), ConfigError);
}
