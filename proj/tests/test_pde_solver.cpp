#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

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

SolverOptions primal_opts(double rho) {
  SolverOptions o;
  o.representation = Representation::primal;
  o.stepping.policy = TimeStepPolicy::proportional;
  o.stepping.rho = rho;
  o.stepping.dt_min = 1e-7;
  return o;
}

SolverOptions log_opts(double rho) {
  SolverOptions o = primal_opts(rho);
  o.representation = Representation::logarithmic;
  return o;
}

RadialProblem halfline(double h_min, double ratio, double h_max) {
  RadialProblem p;
  p.grid = graded(0.0, 6.0, h_min, ratio, h_max, {0.0}, 1);
  p.left = RadialEnd::dirichlet;
  p.left_value = 1.0;
  p.right = RadialEnd::far_field;
  p.initial.pointwise = [](double) { return 0.0; };
  p.set_distance = [](double r) { return r; };
  return p;
}

double sup_node_error(const Snapshot& snap,
                      const std::function<double(double)>& ref) {
  const auto& r = snap.field.grid->radial().r;
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    worst = std::max(worst, std::abs(snap.field.values[i] - ref(r[i])));
  return worst;
}

}  // namespace

TEST_CASE("half-line Dirichlet flow matches the closed form") {
  const RadialProblem p = halfline(1e-3, 1.05, 0.03);
  const FieldSeries s =
      solve_radial(p, make_linear(), primal_opts(1e-3), {1e-2});
  REQUIRE(s.snapshots.size() == 1);
  CHECK(s.linear);
  CHECK(s.meta.steps > 100);
  CHECK(s.meta.warnings.empty());

  const double t = s.snapshots[0].time;
  CHECK(t == doctest::Approx(1e-2).epsilon(1e-12));
  const double err = sup_node_error(
      s.snapshots[0], [&](double r) { return std::erfc(r / (2 * std::sqrt(t))); });
  CHECK(err <= 1e-3);

  const auto& v = s.snapshots[0].field.values;
  for (std::size_t i = 1; i < v.size(); ++i)
    CHECK(v[i] <= v[i - 1] + 1e-12);  // monotone away from the wall
}

TEST_CASE("exterior ball flow in three dimensions matches the closed form") {
  RadialProblem p;
  p.grid = graded(1.0, 10.0, 1.5e-3, 1.05, 0.04, {1.0}, 3);
  p.left = RadialEnd::dirichlet;
  p.left_value = 1.0;
  p.right = RadialEnd::far_field;
  p.initial.pointwise = [](double) { return 0.0; };
  p.set_distance = [](double r) { return r - 1.0; };

  const FieldSeries s =
      solve_radial(p, make_linear(), primal_opts(1e-3), {1e-2});
  const double t = s.snapshots[0].time;
  const auto ref = [&](double r) {
    return (1.0 / r) * std::erfc((r - 1.0) / (2 * std::sqrt(t)));
  };
  const auto& r = s.snapshots[0].field.grid->radial().r;
  const auto& v = s.snapshots[0].field.values;
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double ri = ref(r[i]);
    worst = std::max(worst, std::abs(v[i] - ri) / std::max(ri, 1e-3));
  }
  CHECK(worst <= 1e-2);
}

TEST_CASE("interior flow is vanishingly small far from the wall early on") {
  RadialProblem p;
  p.grid = graded(0.0, 1.0, 1e-3, 1.06, 0.02, {1.0}, 2);
  p.left = RadialEnd::pole;
  p.right = RadialEnd::dirichlet;
  p.right_value = 1.0;
  p.initial.pointwise = [](double) { return 0.0; };
  p.set_distance = [](double r) { return 1.0 - r; };

  const FieldSeries s =
      solve_radial(p, make_linear(), log_opts(2e-3), {1e-3});
  const Snapshot& snap = s.snapshots[0];
  REQUIRE(snap.field.log_values.has_value());
  const double lu0 = snap.field.log_values->front();
  CHECK(-4.0 * snap.time * lu0 == doctest::Approx(1.0).epsilon(0.15));
  CHECK(snap.field.values.front() <= 1e-30);
  CHECK(snap.field.values.back() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("flow from a complement indicator matches the heat kernel") {
  RadialProblem p;
  p.grid = graded(0.0, 12.0, 1e-3, 1.05, 0.03, {6.0}, 1);
  p.left = RadialEnd::dirichlet;
  p.left_value = 1.0;  // exact value differs from 1 by less than 1e-300 here
  p.right = RadialEnd::far_field;
  p.initial.pointwise = [](double r) { return r < 6.0 ? 1.0 : 0.0; };
  p.initial.jumps = {6.0};
  p.set_distance = [](double r) { return std::max(r - 6.0, 0.0); };

  const FieldSeries s =
      solve_radial(p, make_linear(), primal_opts(1e-3), {1e-3, 1e-2});
  REQUIRE(s.snapshots.size() == 2);
  const double t = s.snapshots[1].time;
  const double err = sup_node_error(s.snapshots[1], [&](double r) {
    return 0.5 * std::erfc((r - 6.0) / (2 * std::sqrt(t)));
  });
  CHECK(err <= 1e-3);

  CHECK(radial_sample(s.snapshots[1].field, 6.0) ==
        doctest::Approx(0.5).epsilon(4e-3));
  CHECK(radial_sample(s.snapshots[1].field, 0.5) >= 0.999999);
  CHECK(radial_sample(s.snapshots[1].field, 6.2) >
        radial_sample(s.snapshots[0].field, 6.2));
  for (const Snapshot& snap : s.snapshots)
    for (double v : snap.field.values) {
      CHECK(v >= -1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("constant-coefficient runs and the transformed-state bracket") {
  const RadialProblem p = halfline(2e-3, 1.06, 0.04);
  const SolverOptions opt = primal_opts(2e-3);
  const std::vector<double> times{1e-2, 1e-1};

  const FieldSeries u = solve_radial(p, make_linear(), opt, times);
  const FieldSeries w = solve_linear_heat(p, 1.0, 1.0, opt, times);
  CHECK(w.linear);
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < u.snapshots[k].field.size(); ++i)
      CHECK(std::abs(u.snapshots[k].field.values[i] -
                     w.snapshots[k].field.values[i]) <= 1e-9);

  const FieldSeries ws = solve_linear_heat(p, 1.25, 0.7, opt, times);
  const double t0 = times[0];
  const double err = sup_node_error(ws.snapshots[0], [&](double r) {
    return 0.7 * std::erfc(r / (2 * std::sqrt(1.25 * t0)));
  });
  CHECK(err <= 5e-3);

  const FieldSeries wz = solve_linear_heat(p, 1.0, 0.0, opt, {1e-2});
  for (double v : wz.snapshots[0].field.values) CHECK(std::abs(v) <= 1e-14);

  const FieldSeries w_lo = solve_linear_heat(p, 1.0, 0.8, opt, times);
  const FieldSeries w_hi = solve_linear_heat(p, 1.0, 1.2, opt, times);
  const SandwichReport ok = sandwich_check(u, make_linear(), w_lo, w_hi, 1e-9);
  CHECK(ok.pass());
  CHECK(ok.violations == 0);
  CHECK(ok.comparisons == 2 * u.snapshots[0].field.size());
  const SandwichReport bad = sandwich_check(u, make_linear(), w_hi, w_lo, 1e-9);
  CHECK_FALSE(bad.pass());
  CHECK(bad.violations > 0);
  CHECK(bad.worst_gap <= -0.1);

  CHECK_THROWS_AS(sandwich_check(u, make_linear(), w_lo,
                                 solve_linear_heat(p, 1.0, 1.2, opt, {1e-2}),
                                 1e-9),
                  ShapeError);

  const Nonlinearity scaled = make_scaled_linear(1.25);
  CHECK(scaled.phi(2.0) == doctest::Approx(2.5));
  CHECK(scaled.delta1 == doctest::Approx(1.25));
  CHECK(scaled.delta2 == doctest::Approx(1.25));
  CHECK(eval_big_phi(scaled, std::exp(1.0)) == doctest::Approx(1.25));
  CHECK_THROWS_AS(make_scaled_linear(0.0), ConfigError);
  CHECK_THROWS_AS(make_scaled_linear(-1.0), ConfigError);
}

TEST_CASE("box run with an obstacle agrees with the radial run") {
  CartesianProblem cp;
  cp.grid.origin = {-4.0, -4.0};
  cp.grid.h = 0.08;
  cp.grid.nx = 101;
  cp.grid.ny = 101;
  DomainSpec disk;
  disk.kind = DomainKind::exterior;
  disk.dimension = 2;
  disk.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 1.0});
  cp.obstacle = disk;
  cp.boundary_value = 1.0;

  SolverOptions box_opt;
  box_opt.stepping.policy = TimeStepPolicy::geometric;
  box_opt.stepping.dt_initial = 1e-3;
  box_opt.stepping.dt_max = 2e-3;
  const FieldSeries uc = solve_cartesian(cp, make_linear(), box_opt, {0.05});

  RadialProblem rp;
  rp.grid = graded(1.0, 8.0, 1e-3, 1.05, 0.03, {1.0}, 2);
  rp.left = RadialEnd::dirichlet;
  rp.left_value = 1.0;
  rp.right = RadialEnd::far_field;
  rp.initial.pointwise = [](double) { return 0.0; };
  rp.set_distance = [](double r) { return r - 1.0; };
  const FieldSeries ur =
      solve_radial(rp, make_linear(), primal_opts(1e-3), {0.05});

  const ScalarField& f = uc.snapshots[0].field;
  const CartesianGrid2D& g = f.grid->cartesian();
  const int mid = (g.ny - 1) / 2;
  double worst = 0.0;
  for (int ix = 0; ix < g.nx; ++ix) {
    const double x = g.pos(ix, mid)[0];
    if (std::abs(x) < 1.4 || std::abs(x) > 3.0) continue;
    worst = std::max(worst, std::abs(f.values[g.index(ix, mid)] -
                                     radial_sample(ur.snapshots[0].field,
                                                   std::abs(x))));
  }
  for (int k = 0; k < g.nx; ++k) {
    const auto xy = g.pos(k, k);
    const double r = std::hypot(xy[0], xy[1]);
    if (r < 1.4 || r > 3.0) continue;
    worst = std::max(worst, std::abs(f.values[g.index(k, k)] -
                                     radial_sample(ur.snapshots[0].field, r)));
  }
  CHECK(worst <= 0.025);
  CHECK(f.mask[g.index(mid, mid)] == kMaskOutside);
}

TEST_CASE("box run from an indicator start keeps the lattice symmetries") {
  CartesianProblem cp;
  cp.grid.origin = {-3.0, -3.0};
  cp.grid.h = 0.06;
  cp.grid.nx = 101;
  cp.grid.ny = 101;
  DomainSpec blob;
  blob.kind = DomainKind::interior;
  blob.dimension = 2;
  blob.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 1.0});
  cp.initial_set = blob;

  SolverOptions opt;
  opt.stepping.policy = TimeStepPolicy::geometric;
  opt.stepping.dt_initial = 1e-3;
  opt.stepping.dt_max = 2e-3;
  const FieldSeries s = solve_cartesian(cp, make_linear(), opt, {0.05});
  const ScalarField& f = s.snapshots[0].field;
  const CartesianGrid2D& g = f.grid->cartesian();
  double asym = 0.0;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double v = f.values[g.index(ix, iy)];
      asym = std::max(asym, std::abs(v - f.values[g.index(iy, ix)]));
      asym = std::max(asym,
                      std::abs(v - f.values[g.index(g.nx - 1 - ix, iy)]));
      CHECK(v >= -1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  CHECK(asym <= 1e-11);
  CHECK(s.meta.warnings.empty());
  const int mid = (g.nx - 1) / 2;
  CHECK(f.values[g.index(mid, mid)] > f.values[g.index(mid, g.ny - 1)]);
}

TEST_CASE("solver input validation") {
  const Nonlinearity lin = make_linear();
  const SolverOptions opt = primal_opts(2e-3);

  RadialProblem p = halfline(2e-3, 1.06, 0.04);
  CHECK_THROWS_AS(solve_radial(p, lin, opt, {}), ConfigError);
  CHECK_THROWS_AS(solve_radial(p, lin, opt, {-1e-2}), ConfigError);

  RadialProblem two = p;
  two.grid.r = {0.0, 1.0};
  CHECK_THROWS_AS(solve_radial(two, lin, opt, {1e-2}), ConfigError);

  RadialProblem unsorted = p;
  unsorted.grid.r = {0.0, 0.5, 0.4, 1.0};
  CHECK_THROWS_AS(solve_radial(unsorted, lin, opt, {1e-2}), ConfigError);

  RadialProblem negative = p;
  negative.grid.r = {-1.0, 0.0, 1.0, 2.0};
  CHECK_THROWS_AS(solve_radial(negative, lin, opt, {1e-2}), ConfigError);

  RadialProblem off_pole = p;
  off_pole.grid = graded(1.0, 2.0, 1e-2, 1.1, 0.05, {1.0}, 2);
  off_pole.left = RadialEnd::pole;
  CHECK_THROWS_AS(solve_radial(off_pole, lin, opt, {1e-2}), ConfigError);

  RadialProblem no_dist = p;
  no_dist.set_distance = nullptr;
  CHECK_THROWS_AS(solve_radial(no_dist, lin, log_opts(2e-3), {1e-2}),
                  ConfigError);

  CartesianProblem empty_box;
  empty_box.grid.origin = {-2.0, -2.0};
  empty_box.grid.h = 0.1;
  empty_box.grid.nx = 41;
  empty_box.grid.ny = 41;
  CHECK_THROWS_AS(solve_cartesian(empty_box, lin, opt, {1e-2}), ConfigError);

  CartesianProblem tiny = empty_box;
  tiny.grid.nx = 3;
  tiny.grid.ny = 3;
  DomainSpec disk;
  disk.kind = DomainKind::exterior;
  disk.dimension = 2;
  disk.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 1.0});
  tiny.obstacle = disk;
  CHECK_THROWS_AS(solve_cartesian(tiny, lin, opt, {1e-2}), ConfigError);

  CartesianProblem coarse = empty_box;
  DomainSpec small_disk = disk;
  std::get<Ball>(small_disk.primitives[0]).radius = 0.3;
  coarse.obstacle = small_disk;
  CHECK_THROWS_AS(solve_cartesian(coarse, lin, opt, {1e-2}), ResolutionError);

  CartesianProblem bad_start = empty_box;
  bad_start.initial_set = disk;  // complement of a disk is not a valid start
  CHECK_THROWS_AS(solve_cartesian(bad_start, lin, opt, {1e-2}), ConfigError);

  CartesianProblem log_box = empty_box;
  DomainSpec blob;
  blob.kind = DomainKind::interior;
  blob.dimension = 2;
  blob.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 1.0});
  log_box.initial_set = blob;
  SolverOptions log_opt = opt;
  log_opt.representation = Representation::logarithmic;
  CHECK_THROWS_AS(solve_cartesian(log_box, lin, log_opt, {1e-2}),
                  UnsupportedError);

  CartesianProblem clipped = empty_box;
  DomainSpec big = disk;
  std::get<Ball>(big.primitives[0]).radius = 1.95;
  clipped.obstacle = big;
  CHECK_THROWS_AS(solve_cartesian(clipped, lin, opt, {1e-2}), ConfigError);
}

TEST_CASE("step size schedule lands snapshots exactly") {
  TimeStepping st;
  st.policy = TimeStepPolicy::geometric;
  st.dt_initial = 1e-3;
  st.growth = 1.2;
  st.dt_max = 1e-2;
  CHECK(detail::next_dt(st, 0.0, 0.0, 1.0, true) == doctest::Approx(1e-3));
  CHECK(detail::next_dt(st, 1e-3, 1e-3, 1.0, false) ==
        doctest::Approx(1.2e-3));
  CHECK(detail::next_dt(st, 5e-3, 0.0099, 0.01, false) ==
        doctest::Approx(1e-4).epsilon(1e-9));

  TimeStepping pr;
  pr.policy = TimeStepPolicy::proportional;
  pr.rho = 1e-3;
  pr.dt_min = 1e-7;
  CHECK(detail::next_dt(pr, 0.0, 0.0, 1.0, true) == doctest::Approx(1e-7));
  CHECK(detail::next_dt(pr, 1e-3, 1.0, 2.0, false) == doctest::Approx(1e-3));
}
