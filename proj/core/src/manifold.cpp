#include "difflab/manifold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace difflab {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

int node_count_for(double span, double h) {
  if (!(h > 0.0)) throw ConfigError("manifold: spacing must be positive");
  if (!(span > 0.0)) throw ConfigError("manifold: empty radial span");
  return std::max(5, static_cast<int>(std::ceil(span / h)) + 1);
}

RadialMetric metric_of(const ManifoldSpec& m) {
  return m.model == ManifoldModel::sphere ? RadialMetric::sphere
                                          : RadialMetric::hyperbolic;
}

void validate_domain(const ManifoldSpec& m, const GeodesicDomain& dom) {
  if (m.dimension < 2) {
    throw ConfigError("manifold: dimension must be at least 2");
  }
  if (!(dom.r_outer > 0.0) || dom.r_inner < 0.0 ||
      !(dom.r_inner < dom.r_outer)) {
    throw ConfigError("manifold: need 0 <= r_inner < r_outer");
  }
  if (m.model == ManifoldModel::sphere && !(dom.r_outer < M_PI - 1e-9)) {
    throw ConfigError("manifold: sphere domain touches the antipode");
  }
}

double signed_distance_at(const GeodesicDomain& dom, double r) {
  if (dom.is_ball()) return dom.r_outer - r;
  return std::min(r - dom.r_inner, dom.r_outer - r);
}

using Segment = std::array<double, 2>;

double segment_distance(const std::vector<Segment>& segs, double r) {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : segs) {
    if (r >= s[0] && r <= s[1]) return 0.0;
    best = std::min(best, std::min(std::abs(r - s[0]), std::abs(r - s[1])));
  }
  return best;
}

//! Cauchy problem on the series grid whose initial data is `value` on the
//! union of segments and zero elsewhere.
RadialProblem segment_indicator_problem(const RadialGrid& grid,
                                        const std::vector<Segment>& segs,
                                        double value) {
  RadialProblem p;
  p.grid = grid;
  p.left = RadialEnd::pole;
  p.right = grid.metric == RadialMetric::sphere ? RadialEnd::pole
                                                : RadialEnd::far_field;
  p.initial.pointwise = [segs, value](double r) {
    for (const Segment& s : segs) {
      if (r >= s[0] && r <= s[1]) return value;
    }
    return 0.0;
  };
  for (const Segment& s : segs) {
    for (double edge : s) {
      if (edge > grid.r.front() + 1e-12 && edge < grid.r.back() - 1e-12) {
        p.initial.jumps.push_back(edge);
      }
    }
  }
  std::sort(p.initial.jumps.begin(), p.initial.jumps.end());
  p.set_distance = [segs](double r) { return segment_distance(segs, r); };
  p.set_value = value;
  return p;
}

}  // namespace

double geodesic_distance(const ManifoldSpec& m, const std::vector<double>& x,
                         const std::vector<double>& y, double tol) {
  const std::size_t n = static_cast<std::size_t>(m.dimension) + 1;
  if (x.size() != n || y.size() != n) {
    std::ostringstream os;
    os << "geodesic distance: points need " << n << " coordinates, got "
       << x.size() << " and " << y.size();
    throw ShapeError(os.str());
  }
  if (m.model == ManifoldModel::sphere) {
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xx += x[i] * x[i];
      yy += y[i] * y[i];
      xy += x[i] * y[i];
    }
    if (std::abs(xx - 1.0) > tol || std::abs(yy - 1.0) > tol) {
      throw DomainError("geodesic distance: point off the unit sphere");
    }
    return std::acos(std::clamp(xy, -1.0, 1.0));
  }
  auto lorentz = [n](const std::vector<double>& a,
                     const std::vector<double>& b) {
    double s = -a[0] * b[0];
    for (std::size_t i = 1; i < n; ++i) s += a[i] * b[i];
    return s;
  };
  if (std::abs(lorentz(x, x) + 1.0) > tol || x[0] <= 0.0 ||
      std::abs(lorentz(y, y) + 1.0) > tol || y[0] <= 0.0) {
    throw DomainError("geodesic distance: point off the hyperboloid sheet");
  }
  return std::acosh(std::max(1.0, -lorentz(x, y)));
}

FieldSeries solve_radial_heat_manifold(
    const ManifoldSpec& m, const GeodesicDomain& dom,
    const ManifoldSetup& setup, const Nonlinearity& nl, double h,
    const SolverOptions& options, const std::vector<double>& snapshot_times) {
  validate_domain(m, dom);

  RadialProblem prob;
  prob.grid.dim = m.dimension;
  prob.grid.metric = metric_of(m);
  const double r0 = dom.r_inner;
  const double r1 = dom.r_outer;
  const bool ball = dom.is_ball();

  if (setup.kind == ManifoldSetup::Kind::boundary_dirichlet) {
    prob.grid.r = linspace(r0, r1, node_count_for(r1 - r0, h));
    if (ball) {
      prob.left = RadialEnd::pole;
    } else {
      prob.left = RadialEnd::dirichlet;
      prob.left_value = setup.boundary_value;
    }
    prob.right = RadialEnd::dirichlet;
    prob.right_value = setup.boundary_value;
    prob.initial.pointwise = [](double) { return 0.0; };
    prob.set_distance = [dom](double r) {
      return std::max(0.0, signed_distance_at(dom, r));
    };
    prob.set_value = setup.boundary_value;
    return solve_radial(prob, nl, options, snapshot_times);
  }

  double rmax = M_PI;
  if (m.model == ManifoldModel::hyperbolic) {
    rmax = setup.truncation_radius > 0.0 ? setup.truncation_radius : r1 + 2.0;
    if (!(rmax > r1)) {
      throw ConfigError("manifold: truncation radius must exceed r_outer");
    }
  }
  prob.grid.r = linspace(0.0, rmax, node_count_for(rmax, h));
  prob.left = RadialEnd::pole;
  prob.right = m.model == ManifoldModel::sphere ? RadialEnd::pole
                                                : RadialEnd::far_field;
  prob.initial.pointwise = [r0, r1, ball](double r) {
    return ((!ball && r <= r0) || r >= r1) ? 1.0 : 0.0;
  };
  prob.initial.jumps = ball ? std::vector<double>{r1}
                            : std::vector<double>{r0, r1};
  prob.set_distance = [dom](double r) {
    return std::max(0.0, signed_distance_at(dom, r));
  };
  prob.set_value = 1.0;
  return solve_radial(prob, nl, options, snapshot_times);
}

ScalarField geodesic_signed_distance_field(const GeodesicDomain& dom,
                                           const ScalarField& like) {
  if (!like.grid || !like.grid->is_radial()) {
    throw ShapeError("geodesic distance field: needs a radial grid");
  }
  ScalarField out;
  out.grid = like.grid;
  out.mask = like.mask;
  out.values.resize(like.size());
  const auto& r = like.grid->radial().r;
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.values[i] = signed_distance_at(dom, r[i]);
  }
  return out;
}

VaradhanReport manifold_varadhan_report(const FieldSeries& series,
                                        const ManifoldSpec& m,
                                        const GeodesicDomain& dom,
                                        double K_margin, double K_far,
                                        double envelope_tol) {
  validate_domain(m, dom);
  if (!series.linear) {
    throw UnsupportedError(
        "manifold varadhan report: series must come from the linear flux");
  }
  if (series.snapshots.empty()) {
    throw ShapeError("manifold varadhan report: series has no snapshots");
  }
  const ScalarField dist =
      geodesic_signed_distance_field(dom, series.snapshots.front().field);
  return convergence_report(series, make_linear(), dist, K_margin, K_far,
                            envelope_tol);
}

KernelSandwichReport kernel_sandwich_check(const FieldSeries& series,
                                           const ManifoldSpec& m,
                                           const GeodesicDomain& dom,
                                           double rho,
                                           const SolverOptions& options,
                                           double tol) {
  validate_domain(m, dom);
  if (series.snapshots.empty()) {
    throw ShapeError("kernel sandwich: series has no snapshots");
  }
  if (!series.linear) {
    throw UnsupportedError("kernel sandwich: series must be a linear flow");
  }
  const ScalarField& uf = series.snapshots.front().field;
  if (!uf.grid || !uf.grid->is_radial()) {
    throw ShapeError("kernel sandwich: needs a radial series");
  }
  const RadialGrid& grid = uf.grid->radial();
  if (grid.metric != metric_of(m) || grid.dim != m.dimension) {
    throw ShapeError("kernel sandwich: series grid does not match the model");
  }

  const double r0 = dom.r_inner;
  const double r1 = dom.r_outer;
  const bool ball = dom.is_ball();
  double rho0 = ball ? r1 : std::min(r0, 0.5 * (r1 - r0));
  if (m.model == ManifoldModel::sphere) {
    rho0 = std::min(rho0, M_PI - r1);
  } else {
    rho0 = std::min(rho0, grid.r.back() - r1);
  }
  if (!(rho > 0.0) || !(rho < std::min(1.0, rho0))) {
    std::ostringstream os;
    os << "kernel sandwich: collar width " << rho
       << " outside the admissible range (0, " << std::min(1.0, rho0) << ")";
    throw ConfigError(os.str());
  }

  std::vector<Segment> minus_segs, plus_segs;
  if (!ball) {
    minus_segs.push_back({r0 - rho0, r0});
    plus_segs.push_back({r0 - rho, r0 + rho});
  }
  minus_segs.push_back({r1, r1 + rho0});
  plus_segs.push_back({r1 - rho, r1 + rho});

  std::vector<double> times;
  times.reserve(series.snapshots.size());
  for (const Snapshot& s : series.snapshots) times.push_back(s.time);

  const Nonlinearity lin = make_linear();
  const FieldSeries lower = solve_radial(
      segment_indicator_problem(grid, minus_segs, 1.0), lin, options, times);
  const FieldSeries upper = solve_radial(
      segment_indicator_problem(grid, plus_segs, 2.0), lin, options, times);

  KernelSandwichReport rep;
  rep.rho = rho;
  rep.rho0 = rho0;
  rep.tol = tol;

  std::size_t n_ok = 0;
  for (std::size_t k = 0; k < upper.snapshots.size(); ++k) {
    double boundary = radial_sample(upper.snapshots[k].field, r1);
    if (!ball) {
      boundary = std::min(boundary, radial_sample(upper.snapshots[k].field, r0));
    }
    if (!(boundary > 1.0)) break;
    rep.t_rho = upper.snapshots[k].time;
    ++n_ok;
  }
  rep.window_empty = n_ok == 0;
  rep.checked_times = n_ok;

  std::vector<std::size_t> omega;
  for (std::size_t i = 0; i < grid.r.size(); ++i) {
    if (signed_distance_at(dom, grid.r[i]) >= -1e-12) omega.push_back(i);
  }
  rep.K_nodes = omega.size();

  double worst_lo = std::numeric_limits<double>::infinity();
  double worst_hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_ok; ++k) {
    const auto& u = series.snapshots[k].field.values;
    const auto& lo = lower.snapshots[k].field.values;
    const auto& hi = upper.snapshots[k].field.values;
    for (std::size_t i : omega) {
      const double a = u[i] - lo[i];
      const double b = hi[i] - u[i];
      worst_lo = std::min(worst_lo, a);
      worst_hi = std::min(worst_hi, b);
      if (a < -tol) ++rep.lower_violations;
      if (b < -tol) ++rep.upper_violations;
    }
  }
  rep.worst_lower_gap = n_ok > 0 ? worst_lo : 0.0;
  rep.worst_upper_gap = n_ok > 0 ? worst_hi : 0.0;

  if (n_ok > 0) {
    const Snapshot& snap = series.snapshots.front();
    rep.bound_time = snap.time;
    double mval = 0.0;
    for (std::size_t i : omega) {
      mval = std::max(mval, std::max(0.0, signed_distance_at(dom, grid.r[i])));
    }
    rep.m_constant = mval;
    double worst = std::numeric_limits<double>::infinity();
    const bool has_log = snap.field.log_values.has_value();
    for (std::size_t i : omega) {
      double logu = 0.0;
      if (has_log) {
        logu = (*snap.field.log_values)[i];
      } else if (snap.field.values[i] > 0.0) {
        logu = std::log(snap.field.values[i]);
      } else {
        ++rep.bound_skipped;
        continue;
      }
      const double V = -4.0 * snap.time * logu;
      const double d = std::max(0.0, signed_distance_at(dom, grid.r[i]));
      const double lo = d * d - (2.0 * mval + 1.0) * rho;
      const double hi = d * d + (2.0 * mval + 3.0) * rho;
      const double margin = std::min(V - lo, hi - V);
      worst = std::min(worst, margin);
      if (margin < 0.0) ++rep.bound_violations;
    }
    rep.bound_worst_margin = std::isfinite(worst) ? worst : 0.0;
  }
  return rep;
}

EuclidLimitReport euclid_limit_report(const ManifoldSpec& m,
                                      const GeodesicDomain& dom, double s,
                                      double h, const SolverOptions& options,
                                      const std::vector<double>& ref_times,
                                      double value_floor) {
  validate_domain(m, dom);
  if (!(s > 0.0 && s <= 1.0)) {
    throw ConfigError("euclid limit: scale must lie in (0, 1]");
  }
  if (ref_times.empty()) {
    throw ConfigError("euclid limit: need at least one reference time");
  }

  const double r0 = dom.r_inner;
  const double r1 = dom.r_outer;
  const bool ball = dom.is_ball();
  const std::vector<double> base =
      linspace(r0, r1, node_count_for(r1 - r0, h));

  RadialProblem ref;
  ref.grid.r = base;
  ref.grid.dim = m.dimension;
  ref.grid.metric = RadialMetric::euclidean;
  if (ball) {
    ref.left = RadialEnd::pole;
  } else {
    ref.left = RadialEnd::dirichlet;
    ref.left_value = 1.0;
  }
  ref.right = RadialEnd::dirichlet;
  ref.right_value = 1.0;
  ref.initial.pointwise = [](double) { return 0.0; };
  ref.set_distance = [dom](double r) {
    return std::max(0.0, signed_distance_at(dom, r));
  };
  ref.set_value = 1.0;

  RadialProblem scaled = ref;
  scaled.grid.metric = metric_of(m);
  for (double& r : scaled.grid.r) r *= s;
  const GeodesicDomain sdom{s * r0, s * r1};
  scaled.set_distance = [sdom](double r) {
    return std::max(0.0, signed_distance_at(sdom, r));
  };

  std::vector<double> scaled_times;
  scaled_times.reserve(ref_times.size());
  for (double t : ref_times) scaled_times.push_back(s * s * t);

  const Nonlinearity lin = make_linear();
  const FieldSeries ue = solve_radial(ref, lin, options, ref_times);
  const FieldSeries um = solve_radial(scaled, lin, options, scaled_times);

  EuclidLimitReport rep;
  rep.s = s;
  rep.ref_times = ref_times;
  rep.value_floor = value_floor;
  for (std::size_t k = 0; k < ue.snapshots.size(); ++k) {
    const auto& ve = ue.snapshots[k].field.values;
    const auto& vm = um.snapshots[k].field.values;
    for (std::size_t i = 0; i < ve.size(); ++i) {
      if (ve[i] < value_floor) continue;
      rep.sup_rel_error =
          std::max(rep.sup_rel_error, std::abs(vm[i] - ve[i]) / ve[i]);
      ++rep.compared;
    }
  }
  return rep;
}

}  // namespace difflab
