#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "difflab/errors.hpp"
#include "difflab/manifold.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"

using namespace difflab;

namespace {

const double kPi = M_PI;

SolverOptions opts(Representation rep, double rho) {
  SolverOptions o;
  o.representation = rep;
  o.stepping.policy = TimeStepPolicy::proportional;
  o.stepping.rho = rho;
  o.stepping.dt_min = 1e-7;
  return o;
}

ManifoldSpec sphere2() { return {ManifoldModel::sphere, 2}; }
ManifoldSpec hyper2() { return {ManifoldModel::hyperbolic, 2}; }

GeodesicDomain mid_band() { return {kPi / 3.0, 2.0 * kPi / 3.0}; }

ManifoldSetup dirichlet_setup() {
  ManifoldSetup s;
  s.kind = ManifoldSetup::Kind::boundary_dirichlet;
  s.boundary_value = 1.0;
  return s;
}

ManifoldSetup cauchy_setup() {
  ManifoldSetup s;
  s.kind = ManifoldSetup::Kind::cauchy_complement_indicator;
  return s;
}

}  // namespace

TEST_CASE("geodesic distance on embedded points") {
  CHECK(geodesic_distance(sphere2(), {0, 0, 1}, {1, 0, 0}) ==
        doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(geodesic_distance(sphere2(), {0, 0, 1}, {0, 0, -1}) ==
        doctest::Approx(kPi).epsilon(1e-12));
  CHECK(geodesic_distance(sphere2(), {1, 0, 0}, {1, 0, 0}) ==
        doctest::Approx(0.0));

  const double r = 1.3;
  CHECK(geodesic_distance(hyper2(), {1, 0, 0},
                          {std::cosh(r), std::sinh(r), 0.0}) ==
        doctest::Approx(r).epsilon(1e-12));
  const std::vector<double> a{std::cosh(0.4), std::sinh(0.4), 0.0};
  const std::vector<double> b{std::cosh(0.9), 0.0, std::sinh(0.9)};
  CHECK(geodesic_distance(hyper2(), a, a) == doctest::Approx(0.0));
  CHECK(geodesic_distance(hyper2(), a, b) > 0.9);

  CHECK_THROWS_AS(geodesic_distance(sphere2(), {2, 0, 0}, {1, 0, 0}),
                  DomainError);
  CHECK_THROWS_AS(geodesic_distance(hyper2(), {0.5, 0, 0}, {1, 0, 0}),
                  DomainError);
  CHECK_THROWS_AS(geodesic_distance(sphere2(), {0, 1}, {1, 0, 0}), ShapeError);
}

TEST_CASE("signed geodesic distance field on the annulus") {
  const FieldSeries s = solve_radial_heat_manifold(
      sphere2(), mid_band(), dirichlet_setup(), make_linear(), 4e-3,
      opts(Representation::logarithmic, 2e-3), {1e-3});
  const ScalarField d = geodesic_signed_distance_field(mid_band(),
                                                       s.snapshots[0].field);
  const auto& r = d.grid->radial().r;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double expect = std::min(r[i] - kPi / 3.0, 2.0 * kPi / 3.0 - r[i]);
    CHECK(d.values[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("small-time transform limit on the sphere band") {
  const FieldSeries s = solve_radial_heat_manifold(
      sphere2(), mid_band(), dirichlet_setup(), make_linear(), 4e-3,
      opts(Representation::logarithmic, 2e-3), {1e-3, 1e-2});

  const Snapshot& early = s.snapshots[0];
  REQUIRE(early.field.log_values.has_value());
  const auto& r = early.field.grid->radial().r;
  std::size_t mid = 0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(r[i] - kPi / 2) < std::abs(r[mid] - kPi / 2)) mid = i;
  const double v = -4.0 * early.time * (*early.field.log_values)[mid];
  const double d2 = (kPi / 6.0) * (kPi / 6.0);
  CHECK(std::abs(v - d2) <= 0.05);

  const VaradhanReport rep =
      manifold_varadhan_report(s, sphere2(), mid_band(), 0.15, 0.45);
  CHECK(rep.errors_decreasing());
  CHECK(rep.final_error() <= 0.05);
  CHECK(rep.K_node_count > 10);
  CHECK(rep.envelope_pass());

  const FieldSeries bent = solve_radial_heat_manifold(
      sphere2(), mid_band(), dirichlet_setup(), make_sin_perturbed(), 1e-2,
      opts(Representation::logarithmic, 5e-3), {1e-3});
  CHECK_THROWS_AS(manifold_varadhan_report(bent, sphere2(), mid_band(), 0.15),
                  UnsupportedError);
}

TEST_CASE("collar solutions bracket the complement-indicator flow") {
  const SolverOptions po = opts(Representation::primal, 5e-3);
  const std::vector<double> times{5e-4, 1e-3, 2e-3};
  const FieldSeries s = solve_radial_heat_manifold(
      sphere2(), mid_band(), cauchy_setup(), make_linear(), 4e-3, po, times);

  const auto& r0 = s.snapshots[0].field.grid->radial().r;
  CHECK(r0.front() == doctest::Approx(0.0));
  CHECK(r0.back() == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(radial_sample(s.snapshots[0].field, 0.2) >= 0.999);
  CHECK(radial_sample(s.snapshots[0].field, kPi / 2) <= 0.1);
  const double at_edge = radial_sample(s.snapshots[0].field, kPi / 3);
  CHECK(at_edge >= 0.3);
  CHECK(at_edge <= 0.7);

  const KernelSandwichReport rep =
      kernel_sandwich_check(s, sphere2(), mid_band(), 0.05, po);
  CHECK_FALSE(rep.window_empty);
  CHECK(rep.t_rho > 0.0);
  CHECK(rep.checked_times == times.size());
  CHECK(rep.pass());
  CHECK(rep.lower_violations == 0);
  CHECK(rep.upper_violations == 0);
  CHECK(rep.bound_violations == 0);
  CHECK(rep.rho0 == doctest::Approx(kPi / 6.0).epsilon(1e-9));
  CHECK(rep.m_constant == doctest::Approx(kPi / 6.0).epsilon(1e-6));
  CHECK(rep.K_nodes > 10);

  const KernelSandwichReport wide =
      kernel_sandwich_check(s, sphere2(), mid_band(), 0.1, po);
  CHECK(wide.pass());
  CHECK(wide.m_constant == doctest::Approx(rep.m_constant));

  CHECK_THROWS_AS(kernel_sandwich_check(s, sphere2(), mid_band(), 0.6, po),
                  ConfigError);
  CHECK_THROWS_AS(kernel_sandwich_check(s, sphere2(), mid_band(), -0.1, po),
                  ConfigError);

  const FieldSeries dirichlet = solve_radial_heat_manifold(
      sphere2(), mid_band(), dirichlet_setup(), make_linear(), 1e-2,
      opts(Representation::logarithmic, 5e-3), {1e-3});
  CHECK_THROWS_AS(
      kernel_sandwich_check(dirichlet, sphere2(), mid_band(), 0.05, po),
      ShapeError);
}

TEST_CASE("hyperbolic flow from a complement indicator") {
  GeodesicDomain dom{1.0, 2.0};
  const FieldSeries s = solve_radial_heat_manifold(
      hyper2(), dom, cauchy_setup(), make_linear(), 0.01,
      opts(Representation::primal, 5e-3), {1e-3});
  const ScalarField& f = s.snapshots[0].field;
  CHECK(f.grid->radial().r.back() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(radial_sample(f, 0.2) >= 0.999);
  CHECK(radial_sample(f, 2.5) >= 0.999);
  CHECK(radial_sample(f, 1.5) <= 0.1);
  for (double v : f.values) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("small domains recover the flat radial flow") {
  const SolverOptions po = opts(Representation::primal, 5e-3);
  const EuclidLimitReport flat = euclid_limit_report(
      hyper2(), mid_band(), 0.05, 4e-3, po, {0.5, 2.0});
  CHECK(flat.s == doctest::Approx(0.05));
  CHECK(flat.compared > 100);
  CHECK(flat.sup_rel_error <= 0.02);

  const EuclidLimitReport round = euclid_limit_report(
      sphere2(), mid_band(), 0.05, 4e-3, po, {0.5, 2.0});
  CHECK(round.sup_rel_error <= 0.02);

  CHECK_THROWS_AS(
      euclid_limit_report(sphere2(), mid_band(), 1.5, 4e-3, po, {0.5}),
      ConfigError);
  CHECK_THROWS_AS(euclid_limit_report(sphere2(), mid_band(), 0.05, 4e-3, po,
                                      {}),
                  ConfigError);
}

TEST_CASE("manifold setup validation") {
  CHECK_THROWS_AS(
      solve_radial_heat_manifold(sphere2(), {kPi / 3, kPi + 0.1},
                                 dirichlet_setup(), make_linear(), 1e-2,
                                 opts(Representation::primal, 5e-3), {1e-3}),
      ConfigError);
  CHECK_THROWS_AS(
      solve_radial_heat_manifold({ManifoldModel::sphere, 1}, mid_band(),
                                 dirichlet_setup(), make_linear(), 1e-2,
                                 opts(Representation::primal, 5e-3), {1e-3}),
      ConfigError);
  CHECK_THROWS_AS(
      solve_radial_heat_manifold(sphere2(), {2.0, 1.0}, dirichlet_setup(),
                                 make_linear(), 1e-2,
                                 opts(Representation::primal, 5e-3), {1e-3}),
      ConfigError);
  ManifoldSetup bad_trunc = cauchy_setup();
  bad_trunc.truncation_radius = 1.5;
  CHECK_THROWS_AS(
      solve_radial_heat_manifold(hyper2(), {1.0, 2.0}, bad_trunc,
                                 make_linear(), 1e-2,
                                 opts(Representation::primal, 5e-3), {1e-3}),
      ConfigError);
  CHECK_THROWS_AS(
      solve_radial_heat_manifold(sphere2(), mid_band(), dirichlet_setup(),
                                 make_linear(), -1e-2,
                                 opts(Representation::primal, 5e-3), {1e-3}),
      ConfigError);
}
