#include "difflab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "difflab/quadrature.hpp"

namespace difflab {

namespace {

constexpr double kUnderflowDefault = 1e-300;

//! -4 t big_phi(u) for one snapshot, with the same flagging rules as the
//! public varadhan_field. flagged counts primal nodes that underflowed.
ScalarField apply_varadhan(const BigPhiEvaluator& ev, const ScalarField& u,
                           double t, double threshold, std::size_t* flagged) {
  ScalarField out;
  out.grid = u.grid;
  out.mask = u.mask;
  out.values.assign(u.size(), 0.0);
  if (flagged) *flagged = 0;
  const bool has_log = u.log_values.has_value();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (out.mask[i] == kMaskOutside) continue;
    if (has_log) {
      out.values[i] = -4.0 * t * ev.from_log((*u.log_values)[i]);
      continue;
    }
    const double s = u.values[i];
    if (s < 0.0) {
      throw DomainError("varadhan field: negative value " + std::to_string(s) +
                        " at node " + std::to_string(i));
    }
    if (s <= threshold) {
      out.mask[i] = kMaskOutside;
      if (flagged) ++(*flagged);
      continue;
    }
    out.values[i] = -4.0 * t * ev.from_value(s);
  }
  return out;
}

//! Gradient magnitude at node i by centered differences, one-sided where a
//! neighbor is missing or masked outside. Returns 0 for isolated nodes.
double gradient_magnitude(const ScalarField& f, std::size_t i) {
  if (f.grid->is_radial()) {
    const auto& r = f.grid->radial().r;
    const auto& v = f.values;
    const bool okm = i > 0 && f.mask[i - 1] != kMaskOutside;
    const bool okp = i + 1 < r.size() && f.mask[i + 1] != kMaskOutside;
    if (okm && okp) {
      const double hm = r[i] - r[i - 1];
      const double hp = r[i + 1] - r[i];
      return std::abs((hm * hm * v[i + 1] - hp * hp * v[i - 1] +
                       (hp * hp - hm * hm) * v[i]) /
                      (hm * hp * (hm + hp)));
    }
    if (okp) return std::abs((v[i + 1] - v[i]) / (r[i + 1] - r[i]));
    if (okm) return std::abs((v[i] - v[i - 1]) / (r[i] - r[i - 1]));
    return 0.0;
  }
  const auto& g = f.grid->cartesian();
  const auto& v = f.values;
  const int ix = static_cast<int>(i % static_cast<std::size_t>(g.nx));
  const int iy = static_cast<int>(i / static_cast<std::size_t>(g.nx));
  double comp[2] = {0.0, 0.0};
  for (int axis = 0; axis < 2; ++axis) {
    const int c = axis == 0 ? ix : iy;
    const int n = axis == 0 ? g.nx : g.ny;
    const std::size_t stride = axis == 0 ? 1 : static_cast<std::size_t>(g.nx);
    const bool okm = c > 0 && f.mask[i - stride] != kMaskOutside;
    const bool okp = c + 1 < n && f.mask[i + stride] != kMaskOutside;
    if (okm && okp) {
      comp[axis] = (v[i + stride] - v[i - stride]) / (2.0 * g.h);
    } else if (okp) {
      comp[axis] = (v[i + stride] - v[i]) / g.h;
    } else if (okm) {
      comp[axis] = (v[i] - v[i - stride]) / g.h;
    }
  }
  return std::hypot(comp[0], comp[1]);
}

//! C2 ramp: 0 at x <= 0, 1 at x >= 1, 6x^5 - 15x^4 + 10x^3 between.
double smooth01(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return ((6.0 * x - 15.0) * x + 10.0) * x * x * x;
}

//! Plateau cutoff on [d_lo, d_hi]: rises over the first quarter of the
//! interval, falls over the last quarter, 1 in between.
double cutoff(double d, double d_lo, double d_hi) {
  const double w = 0.25 * (d_hi - d_lo);
  if (w <= 0.0) return 0.0;
  return std::min(smooth01((d - d_lo) / w), smooth01((d_hi - d) / w));
}

std::string describe_band(double lo, double hi, std::size_t n) {
  std::ostringstream os;
  os << "d in [" << lo << ", " << hi << "], " << n << " nodes";
  return os.str();
}

}  // namespace

BigPhiEvaluator::BigPhiEvaluator(const Nonlinearity& nl) : nl_(nl) {
  validate_invariants(nl_);
  dphi0_ = nl_.dphi(0.0);

  const double lo = std::log(1e-18);
  const double hi = std::log(1e3);
  const int n = 601;
  std::vector<double> L(n), c(n), slope(n);
  for (int i = 0; i < n; ++i) {
    L[i] = lo + (hi - lo) * i / (n - 1);
  }

  // d/dL of big_phi_correction(exp(L)); also the exact Hermite slope.
  auto g = [this](double x) { return nl_.dphi(std::exp(x)) - dphi0_; };

  int anchor = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(L[i]) < std::abs(L[anchor])) anchor = i;
  }
  c[anchor] = big_phi_correction(nl_, std::exp(L[anchor]));
  for (int i = anchor + 1; i < n; ++i) {
    c[i] = c[i - 1] + adaptive_simpson(g, L[i - 1], L[i], 1e-14);
  }
  for (int i = anchor - 1; i >= 0; --i) {
    c[i] = c[i + 1] - adaptive_simpson(g, L[i], L[i + 1], 1e-14);
  }
  for (int i = 0; i < n; ++i) slope[i] = g(L[i]);

  corr_floor_ = c.front();
  corr_ = CubicHermite::with_slopes(std::move(L), std::move(c),
                                    std::move(slope));
}

double BigPhiEvaluator::from_log(double L) const {
  if (!std::isfinite(L)) {
    throw DomainError("transform evaluator: nonfinite log argument");
  }
  if (L <= corr_.nodes().front()) return dphi0_ * L + corr_floor_;
  if (L >= corr_.nodes().back()) {
    if (L > 700.0) {
      throw DomainError("transform evaluator: exp(" + std::to_string(L) +
                        ") overflows");
    }
    return dphi0_ * L + big_phi_correction(nl_, std::exp(L));
  }
  return dphi0_ * L + corr_.eval(L);
}

double BigPhiEvaluator::from_value(double u) const {
  if (!(u > 0.0)) {
    throw DomainError("transform evaluator: argument must be positive, got " +
                      std::to_string(u));
  }
  return from_log(std::log(u));
}

ScalarField varadhan_field(const ScalarField& u_snapshot, double t,
                           const Nonlinearity& nl,
                           double underflow_threshold) {
  if (!(t > 0.0)) {
    throw DomainError("varadhan field: time must be positive");
  }
  BigPhiEvaluator ev(nl);
  return apply_varadhan(ev, u_snapshot, t, underflow_threshold, nullptr);
}

bool VaradhanReport::errors_decreasing() const {
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [this](std::size_t a, std::size_t b) { return times[a] > times[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!(sup_errors[order[k]] < sup_errors[order[k - 1]])) return false;
  }
  return !order.empty();
}

double VaradhanReport::final_error() const {
  if (times.empty()) return 0.0;
  std::size_t best = 0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] < times[best]) best = k;
  }
  return sup_errors[best];
}

VaradhanReport convergence_report(const FieldSeries& series,
                                  const Nonlinearity& nl,
                                  const ScalarField& distance, double K_margin,
                                  double K_far, double envelope_tol) {
  if (series.snapshots.empty()) {
    throw ShapeError("convergence report: series has no snapshots");
  }
  if (!(K_margin > 0.0)) {
    throw ConfigError("convergence report: K margin must be positive");
  }
  const ScalarField& first = series.snapshots.front().field;
  if (!same_grid(first, distance)) {
    throw ShapeError("convergence report: distance field on a different grid");
  }

  double far = K_far;
  if (!(far > 0.0)) {
    double dmax = 0.0;
    for (std::size_t i = 0; i < distance.size(); ++i) {
      if (distance.mask[i] != kMaskOutside) {
        dmax = std::max(dmax, distance.values[i]);
      }
    }
    far = 0.5 * dmax;
  }

  std::vector<std::size_t> K;
  for (std::size_t i = 0; i < distance.size(); ++i) {
    if (distance.mask[i] == kMaskOutside) continue;
    if (first.mask[i] == kMaskOutside) continue;
    const double d = distance.values[i];
    if (d >= K_margin && d <= far) K.push_back(i);
  }
  if (K.empty()) {
    std::ostringstream os;
    os << "convergence report: no nodes in " << describe_band(K_margin, far, 0);
    throw ConfigError(os.str());
  }

  BigPhiEvaluator ev(nl);
  VaradhanReport rep;
  rep.K_node_count = K.size();
  rep.K_spec = describe_band(K_margin, far, K.size());
  rep.envelope_tol = envelope_tol;
  rep.envelope_worst = std::numeric_limits<double>::infinity();

  std::size_t smallest = 0;
  for (std::size_t k = 1; k < series.snapshots.size(); ++k) {
    if (series.snapshots[k].time < series.snapshots[smallest].time) {
      smallest = k;
    }
  }

  const double lo_factor = nl.delta1 / nl.delta2;
  const double hi_factor = nl.delta2 / nl.delta1;

  for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
    const Snapshot& snap = series.snapshots[k];
    std::size_t flagged = 0;
    const ScalarField V =
        apply_varadhan(ev, snap.field, snap.time, kUnderflowDefault, &flagged);

    double sup = 0.0;
    std::size_t flagged_in_K = 0;
    for (std::size_t idx : K) {
      if (V.mask[idx] == kMaskOutside) {
        ++flagged_in_K;
        continue;
      }
      const double d = distance.values[idx];
      sup = std::max(sup, std::abs(V.values[idx] - d * d));
      if (k == smallest) {
        const double lo = lo_factor * d * d - envelope_tol;
        const double hi = hi_factor * d * d + envelope_tol;
        const double margin = std::min(V.values[idx] - lo, hi - V.values[idx]);
        rep.envelope_worst = std::min(rep.envelope_worst, margin);
        if (margin < 0.0) ++rep.envelope_violations;
      }
    }
    rep.times.push_back(snap.time);
    rep.sup_errors.push_back(sup);
    rep.flagged_nodes_worst = std::max(rep.flagged_nodes_worst, flagged_in_K);
  }

  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    const double t = rep.times[k];
    if (!(t > 0.0) || t >= 1.0) continue;
    const double g = t * std::log(1.0 / t);
    num += g * rep.sup_errors[k];
    den += g * g;
  }
  rep.convergence_rate_estimate = den > 0.0 ? num / den : 0.0;
  return rep;
}

ScalarField pressure_field(const FieldSeries& series, const Nonlinearity& nl,
                           double eps, double ref_time) {
  if (!(eps > 0.0)) throw DomainError("pressure field: eps must be positive");
  if (!(ref_time > 0.0)) {
    throw DomainError("pressure field: reference time must be positive");
  }
  if (series.snapshots.empty()) {
    throw ShapeError("pressure field: series has no snapshots");
  }

  const double target = eps * ref_time;
  std::vector<std::size_t> order(series.snapshots.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return series.snapshots[a].time < series.snapshots[b].time;
  });

  const double t_min = series.snapshots[order.front()].time;
  const double t_max = series.snapshots[order.back()].time;
  const double slack = 1e-9 * std::max(1.0, std::abs(target));
  if (target < t_min - slack || target > t_max + slack) {
    std::ostringstream os;
    os << "pressure field: requested time " << target << " outside snapshot"
       << " range [" << t_min << ", " << t_max << "]";
    throw DomainError(os.str());
  }

  BigPhiEvaluator ev(nl);
  // -4 t big_phi at t = 1/4 is exactly -big_phi; the eps factor completes
  // v = -eps * big_phi(u).
  auto transform = [&](const ScalarField& u) {
    ScalarField v = apply_varadhan(ev, u, 0.25, kUnderflowDefault, nullptr);
    for (double& x : v.values) x *= eps;
    return v;
  };

  // Exact hit on a snapshot avoids interpolation entirely.
  for (std::size_t k : order) {
    const Snapshot& snap = series.snapshots[k];
    if (std::abs(snap.time - target) <=
        1e-9 * std::max(std::abs(snap.time), std::abs(target))) {
      return transform(snap.field);
    }
  }

  std::size_t hi = 1;
  while (hi < order.size() && series.snapshots[order[hi]].time < target) ++hi;
  if (hi == order.size()) hi = order.size() - 1;
  const Snapshot& a = series.snapshots[order[hi - 1]];
  const Snapshot& b = series.snapshots[order[hi]];
  const double theta = (target - a.time) / (b.time - a.time);

  ScalarField mix;
  mix.grid = a.field.grid;
  mix.values.assign(a.field.size(), 0.0);
  mix.mask.assign(a.field.size(), kMaskOutside);
  const bool log_pair =
      a.field.log_values.has_value() && b.field.log_values.has_value();
  if (log_pair) mix.log_values.emplace(a.field.size(), 0.0);
  for (std::size_t i = 0; i < mix.values.size(); ++i) {
    if (a.field.mask[i] == kMaskOutside || b.field.mask[i] == kMaskOutside) {
      continue;
    }
    mix.mask[i] = a.field.mask[i];
    if (log_pair) {
      const double L = (1.0 - theta) * (*a.field.log_values)[i] +
                       theta * (*b.field.log_values)[i];
      (*mix.log_values)[i] = L;
      mix.values[i] = std::exp(L);
    } else {
      mix.values[i] =
          (1.0 - theta) * a.field.values[i] + theta * b.field.values[i];
    }
  }
  return transform(mix);
}

PressureSeries build_pressure_series(const FieldSeries& series,
                                     const Nonlinearity& nl,
                                     const std::vector<double>& epsilons,
                                     const std::vector<double>& ref_times) {
  if (epsilons.empty()) {
    throw ConfigError("pressure series: need at least one eps");
  }
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    if (!(epsilons[e] > 0.0)) {
      throw ConfigError("pressure series: eps values must be positive");
    }
    if (e > 0 && !(epsilons[e] < epsilons[e - 1])) {
      throw ConfigError("pressure series: eps values must strictly decrease");
    }
  }
  if (ref_times.empty()) {
    throw ConfigError("pressure series: need at least one reference time");
  }
  for (double t : ref_times) {
    if (!(t > 0.0)) {
      throw ConfigError("pressure series: reference times must be positive");
    }
  }

  PressureSeries ps;
  ps.epsilons = epsilons;
  ps.ref_times = ref_times;
  ps.fields.resize(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    ps.fields[e].reserve(ref_times.size());
    for (double tau : ref_times) {
      ps.fields[e].push_back(pressure_field(series, nl, epsilons[e], tau));
    }
  }
  return ps;
}

GradientReport gradient_monitor(PressureSeries& ps,
                                const ScalarField& distance, double d_lo,
                                double d_hi, double band_limit) {
  if (ps.epsilons.size() < 3) {
    throw ConfigError("gradient monitor: need at least three eps values");
  }
  if (ps.fields.size() != ps.epsilons.size()) {
    throw ShapeError("gradient monitor: fields/eps size mismatch");
  }
  if (!(d_lo < d_hi)) {
    throw ConfigError("gradient monitor: need d_lo < d_hi");
  }

  std::vector<std::size_t> K;
  for (std::size_t i = 0; i < distance.size(); ++i) {
    if (distance.mask[i] == kMaskOutside) continue;
    const double d = distance.values[i];
    if (d >= d_lo && d <= d_hi) K.push_back(i);
  }
  if (K.empty()) {
    throw ConfigError("gradient monitor: no nodes in " +
                      describe_band(d_lo, d_hi, 0));
  }

  GradientReport rep;
  rep.epsilons = ps.epsilons;
  rep.band_limit = band_limit;
  rep.K_spec = describe_band(d_lo, d_hi, K.size());

  const std::size_t ne = ps.epsilons.size();
  rep.grad_sup.assign(ne, 0.0);
  rep.v_min.assign(ne, std::numeric_limits<double>::infinity());
  rep.v_max.assign(ne, -std::numeric_limits<double>::infinity());
  rep.holder_quotient.assign(ne, 0.0);
  rep.z_max.assign(ne, -std::numeric_limits<double>::infinity());

  for (std::size_t e = 0; e < ne; ++e) {
    if (ps.fields[e].size() != ps.ref_times.size()) {
      throw ShapeError("gradient monitor: ragged pressure series");
    }
    for (const ScalarField& v : ps.fields[e]) {
      if (!same_grid(v, distance)) {
        throw ShapeError("gradient monitor: field grid differs from distance");
      }
      for (std::size_t idx : K) {
        if (v.mask[idx] == kMaskOutside) continue;
        rep.grad_sup[e] = std::max(rep.grad_sup[e], gradient_magnitude(v, idx));
        rep.v_min[e] = std::min(rep.v_min[e], v.values[idx]);
        rep.v_max[e] = std::max(rep.v_max[e], v.values[idx]);
      }
    }
    for (std::size_t j = 0; j < ps.ref_times.size(); ++j) {
      for (std::size_t k = j + 1; k < ps.ref_times.size(); ++k) {
        const double dt = std::abs(ps.ref_times[k] - ps.ref_times[j]);
        if (!(dt > 0.0)) continue;
        const ScalarField& vj = ps.fields[e][j];
        const ScalarField& vk = ps.fields[e][k];
        for (std::size_t idx : K) {
          if (vj.mask[idx] == kMaskOutside || vk.mask[idx] == kMaskOutside) {
            continue;
          }
          const double q =
              std::abs(vk.values[idx] - vj.values[idx]) / std::sqrt(dt);
          rep.holder_quotient[e] = std::max(rep.holder_quotient[e], q);
        }
      }
    }
  }

  double M = 0.0, c2 = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    M = std::max(M, rep.grad_sup[e]);
    c2 = std::max(c2, rep.v_max[e]);
  }
  rep.lambda = (M * M + 1.0) / (2.0 * (c2 + 1.0));

  for (std::size_t e = 0; e < ne; ++e) {
    for (const ScalarField& v : ps.fields[e]) {
      for (std::size_t idx : K) {
        if (v.mask[idx] == kMaskOutside) continue;
        const double zeta = cutoff(distance.values[idx], d_lo, d_hi);
        const double g = gradient_magnitude(v, idx);
        const double z = zeta * zeta * g * g - rep.lambda * v.values[idx];
        rep.z_max[e] = std::max(rep.z_max[e], z);
      }
    }
  }

  auto band_factor = [](const std::vector<double>& xs) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : xs) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi == 0.0) return 1.0;
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
  };
  rep.band_factor_grad = band_factor(rep.grad_sup);
  rep.band_factor_vmax = band_factor(rep.v_max);
  rep.band_factor_holder = band_factor(rep.holder_quotient);
  rep.uniform_band = rep.band_factor_grad <= band_limit &&
                     rep.band_factor_vmax <= band_limit &&
                     rep.band_factor_holder <= band_limit;
  rep.positive = true;
  for (double m : rep.v_min) rep.positive = rep.positive && m > 0.0;

  ps.grad_sup = rep.grad_sup;
  ps.holder_const = rep.holder_quotient;
  return rep;
}

}  // namespace difflab
