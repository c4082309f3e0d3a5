#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "difflab/pde_solver.hpp"
#include "difflab/quadrature.hpp"
#include "time_loop_detail.hpp"

namespace difflab {

namespace {

using detail::time_loop;

//! Solves a tridiagonal system in place. diag/rhs are overwritten; the
//! solution lands in rhs.
void thomas_solve(const std::vector<double>& sub, std::vector<double> diag,
                  const std::vector<double>& sup, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
  }
}

double metric_weight(RadialMetric metric, int N, double r) {
  if (N == 1) return 1.0;
  switch (metric) {
    case RadialMetric::euclidean:
      return std::pow(r, N - 1);
    case RadialMetric::sphere:
      return std::pow(std::sin(r), N - 1);
    case RadialMetric::hyperbolic:
      return std::pow(std::sinh(r), N - 1);
  }
  return 1.0;
}

//! Logarithmic derivative of the area weight: (N-1) * J'/J up to the
//! (N-1) factor applied by the caller; 1/r, cot r, coth r.
double metric_drift(RadialMetric metric, double r) {
  switch (metric) {
    case RadialMetric::euclidean:
      return 1.0 / r;
    case RadialMetric::sphere:
      return std::cos(r) / std::sin(r);
    case RadialMetric::hyperbolic:
      return std::cosh(r) / std::sinh(r);
  }
  return 0.0;
}

struct Layout {
  std::vector<double> r;
  std::vector<double> face_area;  // size M+1, ends forced to zero at poles
  std::vector<double> volume;     // size M
  bool left_fixed = false, right_fixed = false;
};

Layout build_layout(const RadialProblem& p) {
  const auto& r = p.grid.r;
  const std::size_t M = r.size();
  if (M < 3) throw ConfigError("radial grid needs at least three nodes");
  for (std::size_t i = 1; i < M; ++i)
    if (!(r[i] > r[i - 1]))
      throw ConfigError("radial grid nodes must be strictly increasing");
  if (!(r[0] >= 0)) throw ConfigError("radial grid starts at a negative radius");
  const double pi = std::acos(-1.0);
  if (p.grid.metric == RadialMetric::sphere && r[M - 1] > pi + 1e-12)
    throw ConfigError("sphere radial grid extends beyond the far pole");
  if (p.left == RadialEnd::pole && r[0] != 0.0)
    throw ConfigError("left pole end requires the grid to start at 0");
  if (p.right == RadialEnd::pole) {
    if (p.grid.metric != RadialMetric::sphere)
      throw ConfigError("a right pole end exists only on the sphere");
    if (std::abs(r[M - 1] - pi) > 1e-12)
      throw ConfigError("right pole end requires the grid to end at the far pole");
  }

  Layout lay;
  lay.r = r;
  lay.left_fixed = p.left != RadialEnd::pole;
  lay.right_fixed = p.right != RadialEnd::pole;
  lay.face_area.resize(M + 1);
  lay.volume.resize(M);
  const int N = p.grid.dim;
  auto J = [&](double x) { return metric_weight(p.grid.metric, N, x); };
  lay.face_area[0] = p.left == RadialEnd::pole ? 0.0 : J(r[0]);
  lay.face_area[M] = p.right == RadialEnd::pole ? 0.0 : J(r[M - 1]);
  for (std::size_t f = 1; f < M; ++f)
    lay.face_area[f] = J(0.5 * (r[f - 1] + r[f]));
  for (std::size_t i = 0; i < M; ++i) {
    const double fl = i == 0 ? r[0] : 0.5 * (r[i - 1] + r[i]);
    const double fr = i + 1 == M ? r[M - 1] : 0.5 * (r[i] + r[i + 1]);
    lay.volume[i] = adaptive_simpson(J, fl, fr, 1e-14);
    if (!(lay.volume[i] > 0))
      throw NumericError("radial cell has vanishing volume");
  }
  return lay;
}

class PrimalRadialStepper {
 public:
  PrimalRadialStepper(const RadialProblem& p, const Nonlinearity& nl,
                      const SolverOptions& opt, Layout lay)
      : p_(p), nl_(nl), opt_(opt), lay_(std::move(lay)) {
    const std::size_t M = lay_.r.size();
    u_ = detail::radial_cell_averages(p.grid, p.initial);
    // far_field ends stay frozen at their initial value; only Dirichlet ends
    // override it.
    if (p.left == RadialEnd::dirichlet) u_[0] = p.left_value;
    if (p.right == RadialEnd::dirichlet) u_[M - 1] = p.right_value;
    bound_lo_ = *std::min_element(u_.begin(), u_.end());
    bound_hi_ = *std::max_element(u_.begin(), u_.end());
  }

  const std::vector<double>& state() const { return u_; }

  bool step(double /*t_new*/, double dt, SchemeMeta& meta) {
    const std::size_t M = u_.size();
    std::vector<double> u = u_;
    std::vector<double> R(M), sub(M), diag(M), sup(M);
    for (int it = 0; it < opt_.max_newton_iter; ++it) {
      double worst = 0;
      assemble(u, dt, R, sub, diag, sup, worst);
      ++meta.newton_iterations;
      if (worst <= opt_.newton_tol) {
        u_ = u;
        check_bounds(meta);
        return true;
      }
      for (double& v : R) v = -v;
      thomas_solve(sub, diag, sup, R);
      for (std::size_t i = 0; i < M; ++i) u[i] += R[i];
    }
    return false;
  }

 private:
  void assemble(const std::vector<double>& u, double dt, std::vector<double>& R,
                std::vector<double>& sub, std::vector<double>& diag,
                std::vector<double>& sup, double& worst) const {
    const std::size_t M = u.size();
    const auto& r = lay_.r;
    worst = 0;
    for (std::size_t i = 0; i < M; ++i) {
      const bool fixed = (i == 0 && lay_.left_fixed) ||
                         (i + 1 == M && lay_.right_fixed);
      if (fixed) {
        sub[i] = 0;
        sup[i] = 0;
        diag[i] = 1;
        R[i] = 0;
        continue;
      }
      double flux_hi = 0, flux_lo = 0;
      double d_lo = 0, d_hi = 0;  // face conductances / volume
      if (i + 1 < M) {
        const double c = lay_.face_area[i + 1] / ((r[i + 1] - r[i]) * lay_.volume[i]);
        flux_hi = c * (nl_.phi(u[i + 1]) - nl_.phi(u[i]));
        d_hi = c;
      }
      if (i > 0) {
        const double c = lay_.face_area[i] / ((r[i] - r[i - 1]) * lay_.volume[i]);
        flux_lo = c * (nl_.phi(u[i]) - nl_.phi(u[i - 1]));
        d_lo = c;
      }
      const double div = flux_hi - flux_lo;
      R[i] = u[i] - u_[i] - dt * div;
      if (!std::isfinite(R[i])) {
        worst = std::numeric_limits<double>::infinity();
        continue;
      }
      sub[i] = i > 0 ? -dt * d_lo * nl_.dphi(u[i - 1]) : 0.0;
      sup[i] = i + 1 < M ? -dt * d_hi * nl_.dphi(u[i + 1]) : 0.0;
      diag[i] = 1 + dt * (d_lo + d_hi) * nl_.dphi(u[i]);
      const double scale =
          std::max(1.0, std::abs(u[i]) + std::abs(u_[i]) + dt * std::abs(div));
      worst = std::max(worst, std::abs(R[i]) / scale);
    }
  }

  void check_bounds(SchemeMeta& meta) {
    if (!opt_.check_maximum_principle || warned_) return;
    const double range = std::max(bound_hi_ - bound_lo_, 1e-30);
    for (double v : u_) {
      if (v < bound_lo_ - 1e-9 * range || v > bound_hi_ + 1e-9 * range) {
        std::ostringstream os;
        os << "solution left the initial/boundary range [" << bound_lo_ << ", "
           << bound_hi_ << "] (value " << v << ")";
        meta.warnings.push_back(os.str());
        warned_ = true;
        return;
      }
    }
  }

  const RadialProblem& p_;
  const Nonlinearity& nl_;
  const SolverOptions& opt_;
  Layout lay_;
  std::vector<double> u_;
  double bound_lo_ = 0, bound_hi_ = 0;
  bool warned_ = false;
};

class LogRadialStepper {
 public:
  LogRadialStepper(const RadialProblem& p, const Nonlinearity& nl,
                   const SolverOptions& opt, Layout lay)
      : p_(p), nl_(nl), opt_(opt), lay_(std::move(lay)) {
    if (!p.set_distance)
      throw ConfigError("log form needs set_distance to seed the profile");
    if (!(p.set_value > 0))
      throw ConfigError("log form needs a positive set value");
    if (p.left == RadialEnd::dirichlet && !(p.left_value > 0))
      throw ConfigError("log form needs positive Dirichlet values");
    if (p.right == RadialEnd::dirichlet && !(p.right_value > 0))
      throw ConfigError("log form needs positive Dirichlet values");
    const std::size_t M = lay_.r.size();
    L_.resize(M);
    const double t0 = opt.log_seed_time;
    const double base = std::log(p.set_value);
    for (std::size_t i = 0; i < M; ++i) {
      const double d = p.set_distance(lay_.r[i]);
      L_[i] = d <= 0 ? base
                     : base - d * d / (4 * nl.delta1 * t0) - opt.log_seed_offset;
    }
    apply_fixed(t0);
  }

  const std::vector<double>& state() const { return L_; }

  bool step(double t_new, double dt, SchemeMeta& meta) {
    // Backward Euler freezes the effective clock of the early 1/t profile
    // when dt is a large multiple of the elapsed time: the amplitude error
    // of such a step never decays because the flow is autonomous. Steps
    // beyond the rho fraction of elapsed time are refused outright, which
    // sends the halving loop down to a size the scheme can integrate
    // accurately.
    const double t_elapsed = t_new - dt;
    if (dt > opt_.stepping.rho * t_elapsed * (1.0 + 1e-12)) return false;
    // The central gradient square admits sawtooth roots interleaved with
    // the physical root whenever dt is large against the elapsed time, and
    // no line search keeps Newton out of their basins reliably. The upwind
    // stencil has a unique root but only first order accuracy, so it is
    // used solely for steps the central scheme cannot land.
    std::vector<double> L;
    if (newton_solve(t_new, dt, meta, false, L) ||
        newton_solve(t_new, dt, meta, true, L)) {
      L_ = L;
      return true;
    }
    return false;
  }

 private:
  bool newton_solve(double t_new, double dt, SchemeMeta& meta, bool monotone,
                    std::vector<double>& L) {
    const std::size_t M = L_.size();
    L = L_;
    // Early profiles scale like 1/t, and for that leading balance the
    // backward Euler root contracts every node by the positive root of
    // q a^2 + a = 1 with q = dt / t_old. Seeding Newton there keeps the
    // initial guess near the physical root when dt is a large multiple of
    // the elapsed time.
    const double t_old = t_new - dt;
    if (t_old > 0) {
      const double alpha = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * dt / t_old));
      for (double& v : L) v *= alpha;
    }
    if (lay_.left_fixed) L[0] = fixed_value(0, t_new);
    if (lay_.right_fixed) L[M - 1] = fixed_value(1, t_new);
    std::vector<double> R(M), sub(M), diag(M), sup(M), trial(M), R2(M);
    Norms n = residual(L, dt, R, monotone);
    for (int it = 0; it < opt_.max_newton_iter; ++it) {
      ++meta.newton_iterations;
      if (n.worst <= opt_.newton_tol) return true;
      jacobian(L, dt, sub, diag, sup, monotone);
      std::vector<double> step = R;
      for (double& v : step) v = -v;
      thomas_solve(sub, diag, sup, step);
      // Backtrack on the scaled least-squares norm: the Newton direction
      // descends in it, while the worst-node norm can ping-pong between
      // nodes. Deep damping is refused because creeping micro-steps are
      // how the iteration reaches spurious basins; a failed step restarts
      // from the sound previous state instead.
      double lambda = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 5; ++ls) {
        for (std::size_t i = 0; i < M; ++i) trial[i] = L[i] + lambda * step[i];
        const Norms n2 = residual(trial, dt, R2, monotone);
        if (n2.l2 < n.l2) {
          L.swap(trial);
          R.swap(R2);
          n = n2;
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!improved) return false;
    }
    return n.worst <= opt_.newton_tol;
  }

  double fixed_value(int side, double t) const {
    const RadialEnd end = side == 0 ? p_.left : p_.right;
    const double value = side == 0 ? p_.left_value : p_.right_value;
    const double r = side == 0 ? lay_.r.front() : lay_.r.back();
    switch (end) {
      case RadialEnd::pole:
        return 0;  // unused
      case RadialEnd::dirichlet:
        return std::log(value);
      case RadialEnd::far_field: {
        const double d = p_.set_distance(r);
        return std::log(p_.set_value) - d * d / (4 * nl_.delta1 * t) -
               opt_.log_seed_offset;
      }
    }
    return 0;
  }

  void apply_fixed(double t) {
    if (lay_.left_fixed) L_[0] = fixed_value(0, t);
    if (lay_.right_fixed) L_[lay_.r.size() - 1] = fixed_value(1, t);
  }

  double coef_a(double L) const { return nl_.dphi(std::exp(L)); }
  double coef_b(double L) const {
    const double s = std::exp(L);
    return nl_.dphi(s) + s * eval_d2phi(nl_, s);
  }

  //! Spatial operator at node i: a(L)(L'' + (N-1)c(r)L') + b(L)(L')^2, with
  //! the symmetric pole limit a(L) * N * L'' at pole ends. The monotone
  //! variant replaces the centered gradient by the upwind choice whose
  //! off-diagonal couplings keep one sign, which removes every sawtooth
  //! root of the nonlinear system.
  double rhs_at(const std::vector<double>& L, std::size_t i,
                bool monotone) const {
    const auto& r = lay_.r;
    const std::size_t M = r.size();
    const int N = p_.grid.dim;
    if (i == 0) {
      const double h = r[1] - r[0];
      return coef_a(L[0]) * N * 2 * (L[1] - L[0]) / (h * h);
    }
    if (i + 1 == M) {
      const double h = r[M - 1] - r[M - 2];
      return coef_a(L[M - 1]) * N * 2 * (L[M - 2] - L[M - 1]) / (h * h);
    }
    const double hm = r[i] - r[i - 1], hp = r[i + 1] - r[i];
    const double denom = hm * hp * (hm + hp);
    const double d2 =
        2 * (hm * L[i + 1] - (hm + hp) * L[i] + hp * L[i - 1]) / denom;
    const double drift =
        N > 1 ? (N - 1) * metric_drift(p_.grid.metric, r[i]) : 0.0;
    const double a = coef_a(L[i]);
    const double b = coef_b(L[i]);
    if (!monotone) {
      const double d1 = (hm * hm * L[i + 1] + (hp * hp - hm * hm) * L[i] -
                         hp * hp * L[i - 1]) /
                        denom;
      return a * (d2 + drift * d1) + b * d1 * d1;
    }
    const double dm = (L[i] - L[i - 1]) / hm;
    const double dp = (L[i + 1] - L[i]) / hp;
    const double adv = drift >= 0 ? dp : dm;
    const double gm = b >= 0 ? std::min(dm, 0.0) : std::max(dm, 0.0);
    const double gp = b >= 0 ? std::max(dp, 0.0) : std::min(dp, 0.0);
    return a * (d2 + drift * adv) + b * (gm * gm + gp * gp);
  }

  struct Norms {
    double worst = 0;
    double l2 = 0;
  };

  Norms residual(const std::vector<double>& L, double dt, std::vector<double>& R,
                 bool monotone) const {
    const std::size_t M = L.size();
    const double eps = std::numeric_limits<double>::epsilon();
    const double inf = std::numeric_limits<double>::infinity();
    Norms n;
    for (std::size_t i = 0; i < M; ++i) {
      const bool fixed =
          (i == 0 && lay_.left_fixed) || (i + 1 == M && lay_.right_fixed);
      if (fixed) {
        R[i] = 0;
        continue;
      }
      const double f = rhs_at(L, i, monotone);
      R[i] = (L[i] - L_[i]) / dt - f;
      if (!std::isfinite(R[i])) return Norms{inf, inf};
      const double scale =
          std::max(1.0, std::abs(L[i] - L_[i]) / dt + std::abs(f));
      // The difference quotient cannot be evaluated below its rounding
      // noise; residual mass at that level counts as converged, otherwise
      // shrinking dt would raise the reachable floor without bound.
      const double noise =
          4 * eps * ((std::abs(L[i]) + std::abs(L_[i])) / dt + std::abs(f));
      const double rel = std::max(std::abs(R[i]) - noise, 0.0) / scale;
      n.worst = std::max(n.worst, rel);
      n.l2 += rel * rel;
    }
    n.l2 = std::sqrt(n.l2 / static_cast<double>(M));
    return n;
  }

  void jacobian(const std::vector<double>& L, double dt,
                std::vector<double>& sub, std::vector<double>& diag,
                std::vector<double>& sup, bool monotone) const {
    const auto& r = lay_.r;
    const std::size_t M = r.size();
    const int N = p_.grid.dim;
    for (std::size_t i = 0; i < M; ++i) {
      const bool fixed =
          (i == 0 && lay_.left_fixed) || (i + 1 == M && lay_.right_fixed);
      if (fixed) {
        sub[i] = 0;
        sup[i] = 0;
        diag[i] = 1;
        continue;
      }
      const double a = coef_a(L[i]);
      const double s = std::exp(L[i]);
      const double da = s * eval_d2phi(nl_, s);
      const double eps = 1e-5;
      const double db = (coef_b(L[i] + eps) - coef_b(L[i] - eps)) / (2 * eps);
      if (i == 0 || i + 1 == M) {
        const double h = i == 0 ? r[1] - r[0] : r[M - 1] - r[M - 2];
        const double nb = i == 0 ? L[1] : L[M - 2];
        const double lap = N * 2 * (nb - L[i]) / (h * h);
        const double dlap = N * 2 / (h * h);
        diag[i] = 1 / dt - (da * lap - a * dlap);
        const double off = -a * dlap;
        if (i == 0) {
          sub[i] = 0;
          sup[i] = off;
        } else {
          sub[i] = off;
          sup[i] = 0;
        }
        continue;
      }
      const double hm = r[i] - r[i - 1], hp = r[i + 1] - r[i];
      const double denom = hm * hp * (hm + hp);
      const double d2 =
          2 * (hm * L[i + 1] - (hm + hp) * L[i] + hp * L[i - 1]) / denom;
      const double c2m = 2 * hp / denom, c20 = -2 * (hm + hp) / denom,
                   c2p = 2 * hm / denom;
      const double drift =
          N > 1 ? (N - 1) * metric_drift(p_.grid.metric, r[i]) : 0.0;
      const double b = coef_b(L[i]);
      double dFm, dF0, dFp;
      if (monotone) {
        const double dm = (L[i] - L[i - 1]) / hm;
        const double dp = (L[i + 1] - L[i]) / hp;
        const double adv = drift >= 0 ? dp : dm;
        const double gm = b >= 0 ? std::min(dm, 0.0) : std::max(dm, 0.0);
        const double gp = b >= 0 ? std::max(dp, 0.0) : std::min(dp, 0.0);
        const double drift_m = drift < 0 ? -drift / hm : 0.0;
        const double drift_p = drift >= 0 ? drift / hp : 0.0;
        dFm = a * (c2m + drift_m) - 2 * b * gm / hm;
        dFp = a * (c2p + drift_p) + 2 * b * gp / hp;
        dF0 = da * (d2 + drift * adv) + db * (gm * gm + gp * gp) +
              a * (c20 - drift_m - drift_p) + 2 * b * (gm / hm - gp / hp);
      } else {
        const double d1 = (hm * hm * L[i + 1] + (hp * hp - hm * hm) * L[i] -
                           hp * hp * L[i - 1]) /
                          denom;
        // Advective coupling of the linearized operator: v * dL'. Assigned
        // one-sided so the matrix keeps nonpositive off-diagonal entries
        // even when |v| h dwarfs the diffusive coupling; the residual stays
        // on the central stencil, so converged states are unaffected.
        const double v = a * drift + 2 * b * d1;
        double adv_m = 0, adv_0 = 0, adv_p = 0;
        if (v >= 0) {
          adv_p = v / hp;
          adv_0 = -v / hp;
        } else {
          adv_m = -v / hm;
          adv_0 = v / hm;
        }
        dF0 = da * (d2 + drift * d1) + a * c20 + db * d1 * d1 + adv_0;
        dFm = a * c2m + adv_m;
        dFp = a * c2p + adv_p;
      }
      diag[i] = 1 / dt - dF0;
      sub[i] = -dFm;
      sup[i] = -dFp;
    }
  }

  const RadialProblem& p_;
  const Nonlinearity& nl_;
  const SolverOptions& opt_;
  Layout lay_;
  std::vector<double> L_;
};

ScalarField make_field(std::shared_ptr<const Grid> grid, const Layout& lay,
                       const std::vector<double>& values, bool log_form) {
  ScalarField f;
  f.grid = std::move(grid);
  const std::size_t M = values.size();
  f.mask.assign(M, kMaskInside);
  if (lay.left_fixed) f.mask[0] = kMaskBoundaryAdjacent;
  if (lay.right_fixed) f.mask[M - 1] = kMaskBoundaryAdjacent;
  if (log_form) {
    f.log_values = values;
    f.values.resize(M);
    for (std::size_t i = 0; i < M; ++i) f.values[i] = std::exp(values[i]);
  } else {
    f.values = values;
  }
  return f;
}

}  // namespace

FieldSeries solve_radial(const RadialProblem& problem, const Nonlinearity& nl,
                         const SolverOptions& options,
                         const std::vector<double>& snapshot_times) {
  validate_invariants(nl);
  Layout lay = build_layout(problem);
  auto grid = std::make_shared<Grid>(Grid{problem.grid});

  FieldSeries series;
  series.nonlinearity_name = nl.name;
  series.linear = nl.delta1 == nl.delta2;
  series.meta.representation = options.representation;
  series.meta.policy = options.stepping.policy;

  if (options.representation == Representation::primal) {
    if (!problem.initial.pointwise)
      throw ConfigError("primal form needs initial data");
    PrimalRadialStepper stepper(problem, nl, options, lay);
    time_loop(
        options, 0.0, snapshot_times, series.meta,
        [&](double t_new, double dt) {
          return stepper.step(t_new, dt, series.meta);
        },
        [&](double t) {
          series.snapshots.push_back(
              {t, make_field(grid, lay, stepper.state(), false)});
        });
  } else {
    LogRadialStepper stepper(problem, nl, options, lay);
    time_loop(
        options, options.log_seed_time, snapshot_times, series.meta,
        [&](double t_new, double dt) {
          return stepper.step(t_new, dt, series.meta);
        },
        [&](double t) {
          series.snapshots.push_back(
              {t, make_field(grid, lay, stepper.state(), true)});
        });
  }
  return series;
}

}  // namespace difflab
