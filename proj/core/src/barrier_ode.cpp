#include "difflab/barrier_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "difflab/interp.hpp"

namespace difflab {

namespace {

struct ProfileState {
  double h = 0.0;
  double H = 0.0;
};

ProfileState rhs(const Nonlinearity& nl, double xi, const ProfileState& y) {
  const double fp = nl.dphi(y.h);
  if (!(fp > 0.0)) {
    std::ostringstream os;
    os << "barrier ode: phi' = " << fp << " at h = " << y.h;
    throw NumericError(os.str());
  }
  return {y.H / fp, -0.5 * xi * y.H / fp};
}

// Dormand-Prince 5(4) pair.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 35.0 / 384 - 5179.0 / 57600,
                 kE3 = 500.0 / 1113 - 7571.0 / 16695,
                 kE4 = 125.0 / 192 - 393.0 / 640,
                 kE5 = -2187.0 / 6784 + 92097.0 / 339200,
                 kE6 = 11.0 / 84 - 187.0 / 2100, kE7 = -1.0 / 40;

//! One embedded step from x with size step (signed). Returns the high-order
//! state and writes the scaled error estimate.
ProfileState dp_step(const Nonlinearity& nl, double x, const ProfileState& y,
                     double step, double atol, double* err) {
  auto lin = [&](double ch, double cH) {
    return ProfileState{y.h + step * ch, y.H + step * cH};
  };
  const ProfileState k1 = rhs(nl, x, y);
  const ProfileState k2 =
      rhs(nl, x + step * 0.2, lin(kA21 * k1.h, kA21 * k1.H));
  const ProfileState k3 = rhs(nl, x + step * 0.3,
                              lin(kA31 * k1.h + kA32 * k2.h,
                                  kA31 * k1.H + kA32 * k2.H));
  const ProfileState k4 = rhs(nl, x + step * 0.8,
                              lin(kA41 * k1.h + kA42 * k2.h + kA43 * k3.h,
                                  kA41 * k1.H + kA42 * k2.H + kA43 * k3.H));
  const ProfileState k5 =
      rhs(nl, x + step * (8.0 / 9.0),
          lin(kA51 * k1.h + kA52 * k2.h + kA53 * k3.h + kA54 * k4.h,
              kA51 * k1.H + kA52 * k2.H + kA53 * k3.H + kA54 * k4.H));
  const ProfileState k6 = rhs(
      nl, x + step,
      lin(kA61 * k1.h + kA62 * k2.h + kA63 * k3.h + kA64 * k4.h + kA65 * k5.h,
          kA61 * k1.H + kA62 * k2.H + kA63 * k3.H + kA64 * k4.H +
              kA65 * k5.H));
  const ProfileState out =
      lin(kB1 * k1.h + kB3 * k3.h + kB4 * k4.h + kB5 * k5.h + kB6 * k6.h,
          kB1 * k1.H + kB3 * k3.H + kB4 * k4.H + kB5 * k5.H + kB6 * k6.H);
  const ProfileState k7 = rhs(nl, x + step, out);

  const double eh = step * (kE1 * k1.h + kE3 * k3.h + kE4 * k4.h +
                            kE5 * k5.h + kE6 * k6.h + kE7 * k7.h);
  const double eH = step * (kE1 * k1.H + kE3 * k3.H + kE4 * k4.H +
                            kE5 * k5.H + kE6 * k6.H + kE7 * k7.H);
  const double sh = atol * (1.0 + std::abs(y.h));
  const double sH = atol * (1.0 + std::abs(y.H));
  *err = std::sqrt(0.5 * ((eh / sh) * (eh / sh) + (eH / sH) * (eH / sH)));
  return out;
}

//! Adaptive advance from x0 to x1 (either direction).
ProfileState advance(const Nonlinearity& nl, double x0, ProfileState y,
                     double x1, double atol) {
  const double dir = x1 >= x0 ? 1.0 : -1.0;
  double x = x0;
  double step = x1 - x0;
  while (dir * (x1 - x) > 1e-14 * (1.0 + std::abs(x1))) {
    if (dir * (x + step) > dir * x1) step = x1 - x;
    double err = 0.0;
    const ProfileState trial = dp_step(nl, x, y, step, atol, &err);
    if (err <= 1.0) {
      x += step;
      y = trial;
      step *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err + 1e-30, -0.2)));
    } else {
      step *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
    if (std::abs(step) < 1e-14) {
      throw NumericError("barrier ode: step size underflow near xi = " +
                         std::to_string(x));
    }
  }
  return y;
}

//! Interpolant of the shifted profile f(xi) = h(xi + 2 delta).
CubicHermite profile_interpolant(const BarrierSolution& bs) {
  return CubicHermite::monotone(bs.xi_nodes, bs.h_values);
}

double metric_drift_factor(RadialMetric metric, double r) {
  switch (metric) {
    case RadialMetric::euclidean:
      return 1.0 / r;
    case RadialMetric::sphere:
      return std::cos(r) / std::sin(r);
    case RadialMetric::hyperbolic:
      return std::cosh(r) / std::sinh(r);
  }
  return 1.0 / r;
}

//! Laplacian of a sampled field at node i by centered differences; returns
//! false when a needed neighbor is missing or masked outside.
bool laplacian_at(const ScalarField& f, std::size_t i, double* out) {
  const auto& v = f.values;
  if (f.grid->is_radial()) {
    const RadialGrid& g = f.grid->radial();
    const auto& r = g.r;
    if (i == 0 || i + 1 >= r.size()) return false;
    if (f.mask[i - 1] == kMaskOutside || f.mask[i + 1] == kMaskOutside) {
      return false;
    }
    const double hm = r[i] - r[i - 1];
    const double hp = r[i + 1] - r[i];
    const double d2 = 2.0 * (hm * v[i + 1] - (hm + hp) * v[i] + hp * v[i - 1]) /
                      (hm * hp * (hm + hp));
    const double d1 = (hm * hm * v[i + 1] - hp * hp * v[i - 1] +
                       (hp * hp - hm * hm) * v[i]) /
                      (hm * hp * (hm + hp));
    if (!(r[i] > 0.0)) return false;
    *out = d2 + (g.dim - 1) * metric_drift_factor(g.metric, r[i]) * d1;
    return true;
  }
  const CartesianGrid2D& g = f.grid->cartesian();
  const int ix = static_cast<int>(i % static_cast<std::size_t>(g.nx));
  const int iy = static_cast<int>(i / static_cast<std::size_t>(g.nx));
  if (ix == 0 || iy == 0 || ix + 1 >= g.nx || iy + 1 >= g.ny) return false;
  const std::size_t sx = 1, sy = static_cast<std::size_t>(g.nx);
  for (std::size_t j : {i - sx, i + sx, i - sy, i + sy}) {
    if (f.mask[j] == kMaskOutside) return false;
  }
  *out = (v[i - sx] + v[i + sx] + v[i - sy] + v[i + sy] - 4.0 * v[i]) /
         (g.h * g.h);
  return true;
}

//! Grid neighbors of node i (4-neighborhood on lattices, 2 on radial grids).
void collect_neighbors(const Grid& grid, std::size_t i,
                       std::vector<std::size_t>* out) {
  out->clear();
  if (grid.is_radial()) {
    if (i > 0) out->push_back(i - 1);
    if (i + 1 < grid.node_count()) out->push_back(i + 1);
    return;
  }
  const CartesianGrid2D& g = grid.cartesian();
  const int ix = static_cast<int>(i % static_cast<std::size_t>(g.nx));
  const int iy = static_cast<int>(i / static_cast<std::size_t>(g.nx));
  if (ix > 0) out->push_back(i - 1);
  if (ix + 1 < g.nx) out->push_back(i + 1);
  if (iy > 0) out->push_back(i - static_cast<std::size_t>(g.nx));
  if (iy + 1 < g.ny) out->push_back(i + static_cast<std::size_t>(g.nx));
}

}  // namespace

std::pair<double, double> default_initial_data(double delta1, double delta2) {
  if (!(delta1 > 0.0) || !(delta2 >= delta1)) {
    throw ConfigError("barrier initial data: need 0 < delta1 <= delta2");
  }
  const double p1 = std::pow(delta1, 1.5);
  const double p2 = std::pow(delta2, 1.5);
  const double h0 = p1 / (2.0 * (p1 + p2));
  const double H0 = -delta1 * delta2 / (std::sqrt(M_PI) * (p1 + p2));
  return {h0, H0};
}

BarrierSolution solve_barrier_ode(const Nonlinearity& nl, double h0, double H0,
                                  double L, double tol) {
  validate_invariants(nl);
  if (!(H0 < 0.0)) throw ConfigError("barrier ode: H0 must be negative");
  if (!(h0 > 0.0 && h0 < 1.0)) {
    throw ConfigError("barrier ode: h0 must lie in (0, 1)");
  }
  if (!(L > 0.0) || !(tol > 0.0)) {
    throw ConfigError("barrier ode: L and tol must be positive");
  }
  if (std::exp(-L * L / (4.0 * nl.delta2)) >= tol) {
    std::ostringstream os;
    os << "barrier ode: L = " << L << " too small for tol = " << tol
       << "; need L >= " << 2.0 * std::sqrt(nl.delta2 * std::log(1.0 / tol));
    throw ConfigError(os.str());
  }

  const double target_spacing = 0.005;
  const int n_side = static_cast<int>(std::ceil(L / target_spacing));
  const double dx = L / n_side;
  const int n_total = 2 * n_side + 1;

  BarrierSolution bs;
  bs.xi_nodes.resize(n_total);
  bs.h_values.resize(n_total);
  bs.H_values.resize(n_total);
  bs.initial_data = {h0, H0};
  for (int k = -n_side; k <= n_side; ++k) {
    bs.xi_nodes[static_cast<std::size_t>(k + n_side)] = k * dx;
  }

  const double atol = std::min(tol, 1e-10);
  const std::size_t center = static_cast<std::size_t>(n_side);
  bs.h_values[center] = h0;
  bs.H_values[center] = H0;
  ProfileState y{h0, H0};
  for (std::size_t k = center + 1; k < static_cast<std::size_t>(n_total);
       ++k) {
    y = advance(nl, bs.xi_nodes[k - 1], y, bs.xi_nodes[k], atol);
    bs.h_values[k] = y.h;
    bs.H_values[k] = y.H;
  }
  y = {h0, H0};
  for (std::size_t k = center; k-- > 0;) {
    y = advance(nl, bs.xi_nodes[k + 1], y, bs.xi_nodes[k], atol);
    bs.h_values[k] = y.h;
    bs.H_values[k] = y.H;
  }

  const double slack = tol * std::abs(H0) + 1e-13;
  for (int k = 0; k < n_total; ++k) {
    const double xi = bs.xi_nodes[static_cast<std::size_t>(k)];
    const double H = bs.H_values[static_cast<std::size_t>(k)];
    const double lo = H0 * std::exp(-xi * xi / (4.0 * nl.delta2));
    const double hi = H0 * std::exp(-xi * xi / (4.0 * nl.delta1));
    if (H < lo - slack || H > hi + slack || !(H < 0.0)) {
      std::ostringstream os;
      os << "barrier ode: H = " << H << " at xi = " << xi
         << " leaves the Gaussian envelope [" << lo << ", " << hi << "]";
      throw NumericError(os.str());
    }
    if (k > 0 &&
        !(bs.h_values[static_cast<std::size_t>(k)] <
          bs.h_values[static_cast<std::size_t>(k - 1)])) {
      throw NumericError("barrier ode: h failed to decrease strictly at xi = " +
                         std::to_string(xi));
    }
  }

  bs.limits = {bs.h_values.front(), bs.h_values.back()};
  bs.tail_bound = std::abs(H0) / nl.delta1 * (2.0 * nl.delta2 / L) *
                  std::exp(-L * L / (4.0 * nl.delta2));
  bs.delta_shift = choose_shift(bs);
  return bs;
}

double choose_shift(const BarrierSolution& bs) {
  if (bs.xi_nodes.size() < 3) {
    throw ShapeError("choose_shift: barrier solution has too few nodes");
  }
  const CubicHermite h = profile_interpolant(bs);
  const double h_at_zero = h.eval(0.0);
  if (!(h_at_zero > 0.0)) {
    throw DomainError("choose_shift: h(0) must be positive, got " +
                      std::to_string(h_at_zero));
  }
  for (int k = 1; k <= 40; ++k) {
    const double delta = std::ldexp(1.0, -k);
    if (h.eval(2.0 * delta) > 0.5 * h_at_zero) return delta;
  }
  throw NumericError("choose_shift: no shift in the sweep met the criterion");
}

double barrier_f(const BarrierSolution& bs, double xi) {
  const CubicHermite h = profile_interpolant(bs);
  return h.eval(xi + 2.0 * bs.delta_shift);
}

ScalarField subsolution_field(const BarrierSolution& bs,
                              const ScalarField& d_star, double t) {
  if (!(t > 0.0)) {
    throw DomainError("subsolution field: time must be positive");
  }
  const CubicHermite h = profile_interpolant(bs);
  const double shift = 2.0 * bs.delta_shift;
  const double inv = 1.0 / std::sqrt(t);
  ScalarField out;
  out.grid = d_star.grid;
  out.mask = d_star.mask;
  out.values.assign(d_star.size(), 0.0);
  for (std::size_t i = 0; i < d_star.size(); ++i) {
    if (out.mask[i] == kMaskOutside) continue;
    out.values[i] = h.eval(d_star.values[i] * inv + shift);
  }
  return out;
}

LowerBoundReport lower_bound_c0(const BarrierSolution& bs,
                                const Nonlinearity& nl,
                                const FieldSeries& u_series,
                                const ScalarField& d_star, double tau,
                                double tol, double collar_width) {
  if (!(tau > 0.0)) {
    throw DomainError("lower bound: tau must be positive");
  }
  if (u_series.snapshots.empty()) {
    throw ShapeError("lower bound: series has no snapshots");
  }
  if (!same_grid(u_series.snapshots.front().field, d_star)) {
    throw ShapeError("lower bound: distance field on a different grid");
  }
  if (!(bs.delta_shift > 0.0)) {
    throw ConfigError("lower bound: barrier solution has no shift");
  }

  double reach_pos = 0.0, reach_neg = 0.0;
  for (std::size_t i = 0; i < d_star.size(); ++i) {
    if (d_star.mask[i] == kMaskOutside) continue;
    reach_pos = std::max(reach_pos, d_star.values[i]);
    reach_neg = std::max(reach_neg, -d_star.values[i]);
  }
  const double rho =
      collar_width > 0.0 ? collar_width : 0.5 * std::min(reach_pos, reach_neg);
  if (!(rho > 0.0)) {
    throw ConfigError("lower bound: signed distance field has no sign change");
  }

  std::vector<std::size_t> collar;
  std::size_t side_pos = 0, side_neg = 0;
  for (std::size_t i = 0; i < d_star.size(); ++i) {
    if (d_star.mask[i] == kMaskOutside) continue;
    if (std::abs(d_star.values[i]) > rho) continue;
    collar.push_back(i);
    (d_star.values[i] >= 0.0 ? side_pos : side_neg) += 1;
  }
  if (side_pos < 3 || side_neg < 3) {
    std::ostringstream os;
    os << "lower bound: collar of width " << rho << " holds only " << side_pos
       << " nodes inside and " << side_neg << " outside the boundary";
    throw ResolutionError(os.str());
  }

  LowerBoundReport rep;
  rep.collar_width = rho;
  rep.tau_requested = tau;
  rep.tol = tol;
  rep.c0 = barrier_f(bs, 0.0);

  for (std::size_t i : collar) {
    double lap = 0.0;
    if (laplacian_at(d_star, i, &lap)) {
      rep.max_laplacian = std::max(rep.max_laplacian, std::abs(lap));
    }
  }
  double t_window = std::numeric_limits<double>::infinity();
  if (rep.max_laplacian > 0.0) {
    const double s = bs.delta_shift / (nl.delta2 * rep.max_laplacian);
    t_window = s * s;
  }
  rep.tau_effective = std::min(tau, t_window);
  rep.window_clipped = t_window < tau;

  const CubicHermite h = profile_interpolant(bs);
  const double shift = 2.0 * bs.delta_shift;
  double worst = std::numeric_limits<double>::infinity();
  for (const Snapshot& snap : u_series.snapshots) {
    if (!(snap.time > 0.0) || snap.time > rep.tau_effective * (1.0 + 1e-12)) {
      continue;
    }
    const double inv = 1.0 / std::sqrt(snap.time);
    for (std::size_t i : collar) {
      const double w = h.eval(d_star.values[i] * inv + shift);
      const double gap = snap.field.values[i] - w;
      worst = std::min(worst, gap);
      if (gap < -tol) ++rep.violations;
      ++rep.comparisons;
    }
  }
  rep.worst_gap = rep.comparisons > 0 ? worst : 0.0;

  std::vector<std::size_t> adjacent;
  std::vector<std::size_t> nbrs;
  for (std::size_t i : collar) {
    collect_neighbors(*d_star.grid, i, &nbrs);
    for (std::size_t j : nbrs) {
      if (d_star.mask[j] == kMaskOutside) continue;
      if (d_star.values[i] == 0.0 ||
          d_star.values[i] * d_star.values[j] < 0.0) {
        adjacent.push_back(i);
        break;
      }
    }
  }
  double bmin = std::numeric_limits<double>::infinity();
  for (const Snapshot& snap : u_series.snapshots) {
    if (!(snap.time > 0.0) || snap.time > tau * (1.0 + 1e-12)) continue;
    for (std::size_t i : adjacent) {
      bmin = std::min(bmin, snap.field.values[i]);
    }
  }
  rep.boundary_min = bmin;
  return rep;
}

}  // namespace difflab
