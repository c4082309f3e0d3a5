#include "difflab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "difflab/interp.hpp"
#include "difflab/quadrature.hpp"

namespace difflab {

namespace {

// Below this argument the transform integrand phi'(xi)/xi is handled by the
// analytic split big_phi = phi'(0) log s + correction; the correction
// integrand (phi'(xi) - phi'(0))/xi is bounded, so quadrature stays cheap.
constexpr double kSplitPoint = 0.25;

// Quadrature floor: the correction integral over [0, kCorrFloor] is bounded by
// sup|phi''| * kCorrFloor and is dropped.
constexpr double kCorrFloor = 1e-13;

double quad_big_phi_direct(const Nonlinearity& nl, double s, double tol) {
  return adaptive_simpson([&](double xi) { return nl.dphi(xi) / xi; }, 1.0, s,
                          tol);
}

}  // namespace

Nonlinearity make_linear() {
  Nonlinearity nl;
  nl.name = "linear";
  nl.phi = [](double s) { return s; };
  nl.dphi = [](double) { return 1.0; };
  nl.d2phi = [](double) { return 0.0; };
  nl.delta1 = 1.0;
  nl.delta2 = 1.0;
  nl.closed_form_big_phi = [](double s) { return std::log(s); };
  return nl;
}

Nonlinearity make_sin_perturbed(double amplitude) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw ConfigError("sin-perturbed flux needs amplitude in [0, 1)");
  }
  Nonlinearity nl;
  nl.name = "sin-perturbed";
  nl.phi = [amplitude](double s) { return s + amplitude * std::sin(s); };
  nl.dphi = [amplitude](double s) { return 1.0 + amplitude * std::cos(s); };
  nl.d2phi = [amplitude](double s) { return -amplitude * std::sin(s); };
  nl.delta1 = 1.0 - amplitude;
  nl.delta2 = 1.0 + amplitude;
  return nl;
}

Nonlinearity make_tanh_blend(double amplitude) {
  if (!(amplitude >= 0.0)) {
    throw ConfigError("tanh-blend flux needs amplitude >= 0");
  }
  Nonlinearity nl;
  nl.name = "tanh-blend";
  nl.phi = [amplitude](double s) { return s + amplitude * std::tanh(s); };
  nl.dphi = [amplitude](double s) {
    const double c = std::cosh(s);
    const double sech2 = 1.0 / (c * c);
    return 1.0 + amplitude * sech2;
  };
  nl.d2phi = [amplitude](double s) {
    const double t = std::tanh(s);
    return amplitude * (-2.0) * t * (1.0 - t * t);
  };
  nl.delta1 = 1.0;
  nl.delta2 = 1.0 + amplitude;
  return nl;
}

Nonlinearity nonlinearity_by_name(const std::string& name, double amplitude) {
  if (name == "linear") return make_linear();
  if (name == "sin-perturbed") {
    return make_sin_perturbed(amplitude < 0.0 ? 0.25 : amplitude);
  }
  if (name == "tanh-blend") {
    return make_tanh_blend(amplitude < 0.0 ? 0.2 : amplitude);
  }
  throw ConfigError("unknown nonlinearity name: " + name);
}

void validate_invariants(const Nonlinearity& nl) {
  if (!nl.phi || !nl.dphi) {
    throw ConfigError("nonlinearity: phi and dphi must be set");
  }
  const double p0 = nl.phi(0.0);
  if (std::abs(p0) > 1e-14) {
    std::ostringstream os;
    os << "nonlinearity '" << nl.name << "': phi(0) = " << p0 << ", expected 0";
    throw ConfigError(os.str());
  }
  if (!(nl.delta1 > 0.0) || !(nl.delta1 <= nl.delta2)) {
    throw ConfigError("nonlinearity: need 0 < delta1 <= delta2");
  }
}

double eval_d2phi(const Nonlinearity& nl, double s) {
  if (nl.d2phi) return nl.d2phi(s);
  const double eps = 1e-5 * std::max(1.0, std::abs(s));
  return (nl.dphi(s + eps) - nl.dphi(s - eps)) / (2.0 * eps);
}

double big_phi_correction(const Nonlinearity& nl, double s, double tol) {
  if (!(s > 0.0)) throw DomainError("big_phi correction: s must be > 0");
  const double dphi0 = nl.dphi(0.0);
  const double a = std::max(s, kCorrFloor);
  // Integrate (dphi(xi) - dphi0)/xi in x = log(xi). The substitution removes
  // the 1/xi weight, so the rounding noise of the difference stays at the
  // epsilon level instead of being amplified by 1/xi as xi -> 0.
  auto g = [&](double x) { return nl.dphi(std::exp(x)) - dphi0; };
  return adaptive_simpson(g, 0.0, std::log(a), tol);
}

double eval_big_phi(const Nonlinearity& nl, double s, double tol) {
  if (!(s > 0.0)) throw DomainError("big_phi: s must be > 0");
  if (nl.closed_form_big_phi) return nl.closed_form_big_phi(s);
  if (s >= kSplitPoint) return quad_big_phi_direct(nl, s, tol);
  const double dphi0 = nl.dphi(0.0);
  return dphi0 * std::log(s) + big_phi_correction(nl, s, tol);
}

double eval_big_psi(const Nonlinearity& nl, double y, double tol) {
  const double d1 = nl.delta1;
  const double d2 = nl.delta2;
  // Derivative bounds give exp(y/d1) <= psi(y) <= exp(y/d2) for y <= 0 and
  // the mirrored bracket for y > 0.
  double lo = std::exp(y / (y <= 0.0 ? d1 : d2));
  double hi = std::exp(y / (y <= 0.0 ? d2 : d1));
  if (!(lo > 0.0) || !std::isfinite(hi)) {
    std::ostringstream os;
    os << "big_psi: bracket under/overflows at y = " << y;
    throw NumericError(os.str());
  }
  const double qtol = std::min(tol * 0.25, 1e-12);
  auto g = [&](double s) { return eval_big_phi(nl, s, qtol) - y; };

  double glo = g(lo);
  double ghi = g(hi);
  // Derivative bounds hold by declaration, not construction; widen a little
  // before giving up so roundoff at the bracket ends cannot spoil the solve.
  for (int k = 0; k < 4 && glo > 0.0; ++k) glo = g(lo *= 0.9);
  for (int k = 0; k < 4 && ghi < 0.0; ++k) ghi = g(hi *= 1.1);
  if (glo > 0.0 || ghi < 0.0) {
    std::ostringstream os;
    os << "big_psi: no sign change in bracket [" << lo << ", " << hi
       << "] at y = " << y << " (g = " << glo << ", " << ghi
       << "); declared derivative bounds are suspect";
    throw NumericError(os.str());
  }

  // Safeguarded Newton: fall back to bisection whenever the Newton step
  // leaves the bracket or fails to shrink it.
  double s = std::sqrt(lo * hi);
  double gs = g(s);
  for (int it = 0; it < 80; ++it) {
    if (std::abs(gs) <= tol) return s;
    if (gs > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    const double slope = nl.dphi(s) / s;
    double next = s - gs / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
    gs = g(s);
  }
  if (std::abs(gs) <= 8.0 * tol) return s;
  std::ostringstream os;
  os << "big_psi: did not reach tol at y = " << y << ", residual " << gs;
  throw NumericError(os.str());
}

BoundsReport validate_bounds(const Nonlinearity& nl, double lo, double hi,
                             int n) {
  if (!(hi > lo) || n < 2) {
    throw ConfigError("validate_bounds: need hi > lo and n >= 2");
  }
  BoundsReport rep;
  const double d1 = nl.delta1;
  const double d2 = nl.delta2;
  const double slack = 1e-10;

  auto record = [&](const char* chain, double s, double lower, double value,
                    double upper) {
    ++rep.samples_checked;
    if (value < lower - slack * std::max(1.0, std::abs(lower)) ||
        value > upper + slack * std::max(1.0, std::abs(upper))) {
      rep.violations.push_back({chain, s, lower, value, upper});
    }
  };

  // Declared derivative bounds over the full sample range.
  for (int i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * i / (n - 1);
    record("dphi-range", s, d1, nl.dphi(s), d2);
  }

  // delta1*s <= phi(s) <= delta2*s on s >= 0.
  const double hi_pos = std::max(hi, 0.0);
  for (int i = 0; i < n; ++i) {
    const double s = hi_pos * i / (n - 1);
    record("phi-linear-envelope", s, d1 * s, nl.phi(s), d2 * s);
  }

  // delta2*log s <= big_phi(s) <= delta1*log s on 0 < s <= 1 (log s <= 0).
  const double s_floor = std::max(std::min(std::abs(lo), 1e-3), 1e-8);
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    const double s = std::exp(std::log(s_floor) * (1.0 - f));  // s_floor..1
    const double bp = eval_big_phi(nl, s, 1e-12);
    record("big-phi-log-envelope", s, d2 * std::log(s), bp, d1 * std::log(s));
  }

  // exp(y/delta1) <= big_psi(y) <= exp(y/delta2) on y <= 0.
  const double y_lo = std::min(lo, 0.0);
  for (int i = 0; i < n; ++i) {
    const double y = y_lo * (1.0 - static_cast<double>(i) / (n - 1));
    double psi;
    try {
      psi = eval_big_psi(nl, y, 1e-11);
    } catch (const NumericError&) {
      rep.violations.push_back(
          {"big-psi-exp-envelope", y, std::exp(y / d1), std::nan(""),
           std::exp(y / d2)});
      continue;
    }
    record("big-psi-exp-envelope", y, std::exp(y / d1), psi,
           std::exp(y / d2));
  }
  return rep;
}

TransformTable TransformTable::build(const Nonlinearity& nl, double s_min,
                                     double s_max, int n, double tol) {
  if (!(s_min > 0.0) || !(s_max > s_min) || n < 4) {
    throw ConfigError("transform table: need 0 < s_min < s_max and n >= 4");
  }
  TransformTable t;
  t.nodes_.resize(static_cast<std::size_t>(n));
  const double llo = std::log(s_min);
  const double lhi = std::log(s_max);
  for (int i = 0; i < n; ++i) {
    t.nodes_[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / (n - 1));
  }
  // exp(log(.)) can land one ulp off the requested range; pin the endpoints.
  t.nodes_.front() = s_min;
  t.nodes_.back() = s_max;
  // Force an exact node at s = 1 so the table pins big_phi(1) = 0.
  if (s_min < 1.0 && s_max > 1.0) {
    auto it = std::lower_bound(t.nodes_.begin(), t.nodes_.end(), 1.0);
    *it = 1.0;
  }
  std::size_t m = t.nodes_.size();
  t.values_.assign(m, 0.0);
  t.slopes_.resize(m);
  // Anchor at the node nearest 1 and accumulate increments outward; the
  // increments are positive by phi' > 0, which keeps the table monotone.
  std::size_t anchor = 0;
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < m; ++i) {
    const double d = std::abs(std::log(t.nodes_[i]));
    if (d < best) {
      best = d;
      anchor = i;
    }
  }
  t.values_[anchor] = eval_big_phi(nl, t.nodes_[anchor], tol);
  auto seg = [&](double a, double b) {
    return adaptive_simpson([&](double xi) { return nl.dphi(xi) / xi; }, a, b,
                            tol);
  };
  for (std::size_t i = anchor + 1; i < m; ++i) {
    t.values_[i] = t.values_[i - 1] + seg(t.nodes_[i - 1], t.nodes_[i]);
  }
  for (std::size_t i = anchor; i-- > 0;) {
    t.values_[i] = t.values_[i + 1] - seg(t.nodes_[i], t.nodes_[i + 1]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    t.slopes_[i] = nl.dphi(t.nodes_[i]) / t.nodes_[i];
  }

  // Log spacing undersamples fluxes whose derivative keeps oscillating at
  // large s, so bisect every panel whose interpolant misses the directly
  // integrated midpoint value until the table meets kInterpTol everywhere.
  constexpr double kInterpTol = 1e-8;
  constexpr std::size_t kMaxNodes = 1 << 17;
  for (int pass = 0; pass < 24 && m < kMaxNodes; ++pass) {
    std::vector<double> xs, vs;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double mid = 0.5 * (t.nodes_[i] + t.nodes_[i + 1]);
      if (!(mid > t.nodes_[i] && mid < t.nodes_[i + 1])) continue;
      const double direct = t.values_[i] + seg(t.nodes_[i], mid);
      const double err = std::abs(t.eval_panel(i, mid) - direct);
      if (err > kInterpTol * std::max(1.0, std::abs(direct))) {
        xs.push_back(mid);
        vs.push_back(direct);
      }
    }
    if (xs.empty()) break;
    std::vector<double> nodes2, values2, slopes2;
    nodes2.reserve(m + xs.size());
    values2.reserve(m + xs.size());
    slopes2.reserve(m + xs.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
      nodes2.push_back(t.nodes_[i]);
      values2.push_back(t.values_[i]);
      slopes2.push_back(t.slopes_[i]);
      if (k < xs.size() && i + 1 < m && xs[k] > t.nodes_[i] &&
          xs[k] < t.nodes_[i + 1]) {
        nodes2.push_back(xs[k]);
        values2.push_back(vs[k]);
        slopes2.push_back(nl.dphi(xs[k]) / xs[k]);
        ++k;
      }
    }
    t.nodes_ = std::move(nodes2);
    t.values_ = std::move(values2);
    t.slopes_ = std::move(slopes2);
    m = t.nodes_.size();
  }

  for (std::size_t i = 1; i < m; ++i) {
    if (!(t.values_[i] > t.values_[i - 1])) {
      throw NumericError("transform table: values not strictly increasing");
    }
  }
  return t;
}

double TransformTable::eval_panel(std::size_t i, double s) const {
  const double h = nodes_[i + 1] - nodes_[i];
  const double u = (s - nodes_[i]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * values_[i] + (u3 - 2 * u2 + u) * h * slopes_[i] +
         (-2 * u3 + 3 * u2) * values_[i + 1] + (u3 - u2) * h * slopes_[i + 1];
}

double TransformTable::eval(double s) const {
  if (!(s >= nodes_.front() && s <= nodes_.back())) {
    throw DomainError("transform table: argument outside tabulated range");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  std::size_t i = (it == nodes_.begin())
                      ? 0
                      : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  i = std::min(i, nodes_.size() - 2);
  return eval_panel(i, s);
}

double TransformTable::inverse(double y) const {
  if (!(y >= values_.front() && y <= values_.back())) {
    throw DomainError("transform table: inverse argument outside range");
  }
  auto it = std::upper_bound(values_.begin(), values_.end(), y);
  std::size_t i = (it == values_.begin())
                      ? 0
                      : static_cast<std::size_t>(it - values_.begin()) - 1;
  i = std::min(i, values_.size() - 2);
  double lo = nodes_[i];
  double hi = nodes_[i + 1];
  double s = 0.5 * (lo + hi);
  for (int k = 0; k < 60; ++k) {
    const double v = eval(s) - y;
    if (std::abs(v) < 1e-14 * std::max(1.0, std::abs(y))) break;
    if (v > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    s = 0.5 * (lo + hi);
  }
  return s;
}

}  // namespace difflab
