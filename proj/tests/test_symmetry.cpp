#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "difflab/errors.hpp"
#include "difflab/geometry.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"
#include "difflab/symmetry.hpp"

using namespace difflab;

namespace {

DomainSpec interior_ball(double r) {
  DomainSpec spec;
  spec.kind = DomainKind::interior;
  spec.dimension = 2;
  spec.primitives.push_back(Ball{{0.0, 0.0, 0.0}, r});
  return spec;
}

DomainSpec interior_ellipse(double a, double b) {
  DomainSpec spec;
  spec.kind = DomainKind::interior;
  spec.dimension = 2;
  spec.primitives.push_back(Ellipse{{0.0, 0.0, 0.0}, {a, b, 1.0}});
  return spec;
}

SolverOptions lattice_opts() {
  SolverOptions o;
  o.stepping.policy = TimeStepPolicy::geometric;
  o.stepping.dt_initial = 1e-3;
  o.stepping.dt_max = 2e-3;
  return o;
}

CartesianProblem spread_problem(const DomainSpec& start, double h) {
  CartesianProblem cp;
  cp.grid.origin = {-3.0, -3.0};
  cp.grid.h = h;
  cp.grid.nx = static_cast<int>(std::llround(6.0 / h)) + 1;
  cp.grid.ny = cp.grid.nx;
  cp.initial_set = start;
  return cp;
}

//! Linear spreading of the unit-disk indicator, shared across the cases.
const FieldSeries& disk_run() {
  static const FieldSeries s = solve_cartesian(
      spread_problem(interior_ball(1.0), 0.05), make_linear(), lattice_opts(),
      {0.05, 0.1});
  return s;
}

std::vector<Point> circle_points(double r, int n) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * M_PI * k / n;
    pts.push_back({r * std::cos(a), r * std::sin(a), 0.0});
  }
  return pts;
}

}  // namespace

TEST_CASE("stationarity spread on level circles") {
  FieldSeries constant = disk_run();
  for (Snapshot& snap : constant.snapshots)
    snap.field.values.assign(snap.field.size(), 0.7);
  const StationarityScore flat =
      stationarity_test(constant, circle_points(1.5, 32));
  CHECK(flat.max_rel_spread == 0.0);
  CHECK(flat.per_time_std[0] == 0.0);
  CHECK(flat.per_time_spread.size() == 2);

  const StationarityScore disk =
      stationarity_test(disk_run(), circle_points(1.5, 32));
  CHECK(disk.max_rel_spread <= 2e-2);

  const FieldSeries stretched = solve_cartesian(
      spread_problem(interior_ellipse(1.2, 0.8), 0.06), make_linear(),
      lattice_opts(), {0.05});
  const StationarityScore ell =
      stationarity_test(stretched, circle_points(1.5, 32));
  CHECK(ell.max_rel_spread >= 1e-2);
  CHECK(ell.max_rel_spread > 3.0 * disk.max_rel_spread);

  CHECK_THROWS_AS(stationarity_test(disk_run(), circle_points(10.0, 8)),
                  DomainError);
  CHECK_THROWS_AS(stationarity_test(disk_run(), {{0.0, 0.0, 0.0}}),
                  ConfigError);
}

TEST_CASE("reflection comparator finds mirror symmetry and ordering") {
  ReflectionPlane center;
  center.normal = {1.0, 0.0};
  center.offset = 0.0;
  const ReflectionReport sym = reflection_comparator(disk_run(), center);
  CHECK(sym.symmetric(1e-9));
  CHECK(sym.cap_nodes > 1000);
  CHECK(sym.times.size() == 2);

  ReflectionPlane diagonal;
  diagonal.normal = {M_SQRT1_2, -M_SQRT1_2};
  diagonal.offset = 0.0;
  const ReflectionReport diag = reflection_comparator(disk_run(), diagonal);
  CHECK(diag.symmetric(1e-9));

  ReflectionPlane off;
  off.normal = {1.0, 0.0};
  off.offset = 0.2;
  const ReflectionReport ord = reflection_comparator(disk_run(), off);
  CHECK(ord.ordered(1e-9));
  CHECK_FALSE(ord.symmetric(1e-3));  // genuinely one-sided, not near-equal
  CHECK(ord.skipped_nodes > 0);
  CHECK(ord.min_overall >= -1e-9);
  CHECK(ord.max_abs_overall > 1e-3);

  ReflectionPlane zero;
  zero.normal = {0.0, 0.0};
  CHECK_THROWS_AS(reflection_comparator(disk_run(), zero), ConfigError);
  ReflectionPlane empty;
  empty.normal = {1.0, 0.0};
  empty.offset = -10.0;
  CHECK_THROWS_AS(reflection_comparator(disk_run(), empty), DomainError);
}

TEST_CASE("curvature products stay constant exactly on circles") {
  DomainSpec obstacle;
  obstacle.kind = DomainKind::exterior;
  obstacle.dimension = 2;
  obstacle.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 1.0});
  const CurvatureConstancyReport disk = curvature_constancy(obstacle, 0.8, 64);
  CHECK(disk.sphere_consistent);
  CHECK(disk.rel_deviation <= 1e-12);
  CHECK(disk.min_product == doctest::Approx(2.25));
  CHECK(disk.max_product == doctest::Approx(2.25));

  const CurvatureConstancyReport ell =
      curvature_constancy(interior_ellipse(2.0, 1.0), 0.25, 64);
  CHECK_FALSE(ell.sphere_consistent);
  CHECK(ell.rel_deviation >= 0.4);
  CHECK(ell.min_product == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ell.max_product == doctest::Approx(3.75).epsilon(1e-9));

  CHECK_THROWS_AS(curvature_constancy(interior_ball(2.0), 3.0, 16),
                  CausticError);
  CHECK_THROWS_AS(curvature_constancy(interior_ball(2.0), 0.5, 1),
                  ConfigError);
}

TEST_CASE("circle moments vanish around the point of symmetry") {
  const BalanceLawReport centered = balance_law_check(
      disk_run(), {0.0, 0.0}, {0.0, 0.5, 1.0}, 1e-8, 256);
  CHECK(centered.pass());
  CHECK(centered.max_norm <= 1e-8);
  REQUIRE(centered.moment_norms.size() == 2);
  CHECK(centered.moment_norms[0][0] == 0.0);
  CHECK(centered.angular_samples == 256);

  const BalanceLawReport off = balance_law_check(disk_run(), {0.3, 0.0},
                                                 {0.5}, 1e-8, 256);
  CHECK_FALSE(off.pass());
  CHECK(off.max_norm >= 1e-3);

  const FieldSeries bent = solve_cartesian(
      [] {
        CartesianProblem cp;
        cp.grid.origin = {-1.0, -1.0};
        cp.grid.h = 0.1;
        cp.grid.nx = 21;
        cp.grid.ny = 21;
        cp.initial_set = interior_ball(0.5);
        return cp;
      }(),
      make_sin_perturbed(), lattice_opts(), {0.01});
  CHECK_THROWS_AS(balance_law_check(bent, {0.0, 0.0}, {0.2}, 1e-8, 256),
                  UnsupportedError);

  CHECK_THROWS_AS(balance_law_check(disk_run(), {0.0, 0.0}, {0.5}, 1e-8, 4),
                  ConfigError);
  CHECK_THROWS_AS(balance_law_check(disk_run(), {0.0, 0.0}, {-0.5}, 1e-8, 256),
                  ConfigError);
}
