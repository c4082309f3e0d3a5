#include "difflab/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "difflab/quadrature.hpp"

namespace difflab {

namespace detail {

double next_dt(const TimeStepping& st, double dt_prev, double t,
               double t_next_snapshot, bool first_step) {
  double dt;
  switch (st.policy) {
    case TimeStepPolicy::geometric:
      if (first_step) {
        dt = st.dt_initial > 0
                 ? st.dt_initial
                 : std::min(1e-4, (t_next_snapshot - t) / 20);
      } else {
        dt = std::min(dt_prev * st.growth, st.dt_max);
      }
      break;
    case TimeStepPolicy::proportional:
      dt = std::max(st.dt_min, st.rho * t);
      if (first_step && st.dt_initial > 0) dt = st.dt_initial;
      break;
    default:
      throw ConfigError("unknown time step policy");
  }
  const double remaining = t_next_snapshot - t;
  if (!(remaining > 0)) throw NumericError("time stepping passed a snapshot");
  if (t + dt >= t_next_snapshot - 1e-13 * std::max(1.0, t_next_snapshot))
    dt = remaining;
  return dt;
}

std::vector<double> radial_cell_averages(const RadialGrid& grid,
                                         const RadialInitial& initial) {
  const int N = grid.dim;
  auto weight = [&](double r) {
    switch (grid.metric) {
      case RadialMetric::euclidean:
        return N == 1 ? 1.0 : std::pow(r, N - 1);
      case RadialMetric::sphere:
        return N == 1 ? 1.0 : std::pow(std::sin(r), N - 1);
      case RadialMetric::hyperbolic:
        return N == 1 ? 1.0 : std::pow(std::sinh(r), N - 1);
    }
    return 1.0;
  };
  const auto& r = grid.r;
  const std::size_t M = r.size();
  std::vector<double> avg(M);
  std::vector<double> jumps = initial.jumps;
  std::sort(jumps.begin(), jumps.end());
  for (std::size_t i = 0; i < M; ++i) {
    const double fl = i == 0 ? r[0] : 0.5 * (r[i - 1] + r[i]);
    const double fr = i + 1 == M ? r[M - 1] : 0.5 * (r[i] + r[i + 1]);
    if (!(fr > fl)) {
      avg[i] = initial.pointwise(r[i]);
      continue;
    }
    std::vector<double> cuts{fl};
    for (double j : jumps)
      if (j > fl && j < fr) cuts.push_back(j);
    cuts.push_back(fr);
    double mass = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      // Shrink pieces away from jump points so the integrand is evaluated on
      // one side only.
      const double width = cuts[k + 1] - cuts[k];
      const double a = cuts[k] + (k == 0 ? 0.0 : 1e-12 * width);
      const double b = cuts[k + 1] - (k + 2 == cuts.size() ? 0.0 : 1e-12 * width);
      if (!(b > a)) continue;
      mass += adaptive_simpson(
          [&](double x) { return initial.pointwise(x) * weight(x); }, a, b,
          1e-13 * std::max(width, 1e-30));
    }
    const double volume = adaptive_simpson(weight, fl, fr, 1e-14);
    avg[i] = volume > 0 ? mass / volume : initial.pointwise(r[i]);
  }
  return avg;
}

double circle_box_overlap(double cx, double cy, double r, double x1, double x2,
                          double y1, double y2) {
  const double X1 = std::clamp(x1 - cx, -r, r);
  const double X2 = std::clamp(x2 - cx, -r, r);
  const double Y1 = y1 - cy, Y2 = y2 - cy;
  if (!(X2 > X1) || !(Y2 > Y1)) return 0.0;
  std::vector<double> cuts{X1, X2};
  for (double Y : {Y1, Y2}) {
    if (std::abs(Y) < r) {
      const double x = std::sqrt(r * r - Y * Y);
      for (double s : {-x, x})
        if (s > X1 && s < X2) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto G = [r](double x) {
    return 0.5 * (x * std::sqrt(std::max(r * r - x * x, 0.0)) +
                  r * r * std::asin(std::clamp(x / r, -1.0, 1.0)));
  };
  double total = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (!(b > a)) continue;
    const double m = 0.5 * (a + b);
    const double arc = std::sqrt(std::max(r * r - m * m, 0.0));
    const double top = std::min(Y2, arc);
    const double bot = std::max(Y1, -arc);
    if (top <= bot) continue;
    const double top_int = arc < Y2 ? G(b) - G(a) : Y2 * (b - a);
    const double bot_int = -arc > Y1 ? -(G(b) - G(a)) : Y1 * (b - a);
    total += top_int - bot_int;
  }
  return total;
}

}  // namespace detail

SandwichReport sandwich_check(const FieldSeries& lower, const FieldSeries& mid,
                              const FieldSeries& upper, double tol) {
  if (lower.snapshots.size() != mid.snapshots.size() ||
      upper.snapshots.size() != mid.snapshots.size())
    throw ShapeError("sandwich_check: snapshot counts differ");
  SandwichReport rep;
  rep.worst_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < mid.snapshots.size(); ++s) {
    const auto& lo = lower.snapshots[s];
    const auto& mi = mid.snapshots[s];
    const auto& up = upper.snapshots[s];
    const double t = mi.time;
    if (std::abs(lo.time - t) > 1e-12 * std::max(1.0, t) ||
        std::abs(up.time - t) > 1e-12 * std::max(1.0, t))
      throw ShapeError("sandwich_check: snapshot times differ");
    if (!same_grid(lo.field, mi.field) || !same_grid(up.field, mi.field))
      throw ShapeError("sandwich_check: snapshot grids differ");
    for (std::size_t i = 0; i < mi.field.size(); ++i) {
      if (mi.field.mask[i] == kMaskOutside) continue;
      const double a = mi.field.values[i] - lo.field.values[i];
      const double b = up.field.values[i] - mi.field.values[i];
      rep.worst_gap = std::min({rep.worst_gap, a, b});
      if (a < -tol) ++rep.violations;
      if (b < -tol) ++rep.violations;
      ++rep.comparisons;
    }
  }
  if (rep.comparisons == 0) rep.worst_gap = 0;
  return rep;
}

SandwichReport sandwich_check(const FieldSeries& u, const Nonlinearity& nl,
                              const FieldSeries& w1, const FieldSeries& w2,
                              double tol) {
  FieldSeries mid = u;
  for (Snapshot& snap : mid.snapshots) {
    snap.field.log_values.reset();
    for (double& v : snap.field.values) v = nl.phi(v);
  }
  return sandwich_check(w1, mid, w2, tol);
}

Nonlinearity make_scaled_linear(double diffusivity) {
  if (!(diffusivity > 0))
    throw ConfigError("linear heat: diffusivity must be positive");
  Nonlinearity nl;
  std::ostringstream name;
  name << "linear*" << diffusivity;
  nl.name = name.str();
  nl.phi = [diffusivity](double s) { return diffusivity * s; };
  nl.dphi = [diffusivity](double) { return diffusivity; };
  nl.delta1 = diffusivity;
  nl.delta2 = diffusivity;
  nl.d2phi = [](double) { return 0.0; };
  nl.closed_form_big_phi = [diffusivity](double s) {
    return diffusivity * std::log(s);
  };
  return nl;
}

FieldSeries solve_linear_heat(const RadialProblem& problem, double diffusivity,
                              double boundary_value,
                              const SolverOptions& options,
                              const std::vector<double>& snapshot_times) {
  RadialProblem p = problem;
  if (p.left == RadialEnd::dirichlet) p.left_value = boundary_value;
  if (p.right == RadialEnd::dirichlet) p.right_value = boundary_value;
  p.set_value = boundary_value;
  return solve_radial(p, make_scaled_linear(diffusivity), options,
                      snapshot_times);
}

FieldSeries solve_linear_heat(const CartesianProblem& problem,
                              double diffusivity, double boundary_value,
                              const SolverOptions& options,
                              const std::vector<double>& snapshot_times) {
  CartesianProblem p = problem;
  p.boundary_value = boundary_value;
  return solve_cartesian(p, make_scaled_linear(diffusivity), options,
                         snapshot_times);
}

}  // namespace difflab
