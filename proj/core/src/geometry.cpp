#include "difflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace difflab {

namespace {

double dot3(const Point& a, const Point& b, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

double norm3(const Point& a, int dim) { return std::sqrt(dot3(a, a, dim)); }

Point sub3(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Point add_scaled(const Point& a, double s, const Point& b) {
  return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
}

double ball_sdist(const Ball& b, const Point& x, int dim) {
  return norm3(sub3(x, b.center), dim) - b.radius;
}

//! Root of F(t) = sum_i (a_i y_i / (t + a_i^2))^2 - 1 on (-min a_i^2, inf),
//! where F is strictly decreasing; the foot of the perpendicular from y is
//! q_i = a_i^2 y_i / (t + a_i^2). Components of y are nudged off zero so the
//! left endpoint diverges to +inf and the bracket is always valid.
double ellipse_sdist(const Ellipse& e, const Point& x, int dim) {
  double y[3], a[3];
  double level = 0;
  double amin2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim; ++i) {
    a[i] = e.semi_axes[i];
    y[i] = x[i] - e.center[i];
    level += (y[i] / a[i]) * (y[i] / a[i]);
    amin2 = std::min(amin2, a[i] * a[i]);
  }
  const double inside_sign = level < 1.0 ? -1.0 : 1.0;
  for (int i = 0; i < dim; ++i) {
    if (std::abs(y[i]) < 1e-13 * a[i]) y[i] = 1e-13 * a[i];
  }
  auto F = [&](double t) {
    double s = -1.0;
    for (int i = 0; i < dim; ++i) {
      const double w = a[i] * y[i] / (t + a[i] * a[i]);
      s += w * w;
    }
    return s;
  };
  double lo = -amin2;
  double hi = 0.0;
  {
    double r2 = 0;
    for (int i = 0; i < dim; ++i) r2 += y[i] * y[i];
    hi = std::max(std::sqrt(r2) * *std::max_element(a, a + dim), amin2);
  }
  while (F(hi) > 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (F(mid) > 0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  double d2 = 0;
  for (int i = 0; i < dim; ++i) {
    const double q = a[i] * a[i] * y[i] / (t + a[i] * a[i]);
    d2 += (y[i] - q) * (y[i] - q);
  }
  return inside_sign * std::sqrt(d2);
}

//! Curve parameter of the segment point closest to x, before clamping.
double capsule_raw_param(const Capsule& c, const Point& x, int dim) {
  const Point seg = sub3(c.p1, c.p0);
  const double len2 = dot3(seg, seg, dim);
  return dot3(sub3(x, c.p0), seg, dim) / len2;
}

double capsule_sdist(const Capsule& c, const Point& x, int dim) {
  const double t = std::clamp(capsule_raw_param(c, x, dim), 0.0, 1.0);
  const Point closest = add_scaled(c.p0, t, sub3(c.p1, c.p0));
  return norm3(sub3(x, closest), dim) - c.radius;
}

struct BoundingBall {
  Point center;
  double radius;
};

BoundingBall bounding_ball(const Primitive& prim, int dim) {
  return std::visit(
      [&](const auto& p) -> BoundingBall {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return {p.center, p.radius};
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          double amax = 0;
          for (int i = 0; i < dim; ++i) amax = std::max(amax, p.semi_axes[i]);
          return {p.center, amax};
        } else {
          const Point mid = add_scaled(p.p0, 0.5, sub3(p.p1, p.p0));
          return {mid, 0.5 * norm3(sub3(p.p1, p.p0), dim) + p.radius};
        }
      },
      prim);
}

//! -1 while Omega lies outside this primitive, +1 while inside. Used to turn
//! the outward primitive normal into the inward domain normal and to sign
//! curvatures.
double omega_side(const DomainSpec& spec, std::size_t prim_idx) {
  switch (spec.kind) {
    case DomainKind::interior:
      return 1.0;
    case DomainKind::exterior:
      return -1.0;
    case DomainKind::annulus:
      return prim_idx == 0 ? -1.0 : 1.0;
  }
  return -1.0;
}

std::size_t owning_primitive(const DomainSpec& spec, const Point& p) {
  std::size_t best = 0;
  double best_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    const double d =
        std::abs(primitive_signed_distance(spec.primitives[i], p, spec.dimension));
    if (d < best_abs) {
      best_abs = d;
      best = i;
    }
  }
  return best;
}

//! Gradient and Hessian of the defining function of a smooth primitive.
//! Ball: |x-c|^2 - r^2. Ellipse: sum ((x_i-c_i)/a_i)^2 - 1.
void implicit_derivatives(const Primitive& prim, const Point& x, int dim,
                          Point& grad, std::array<double, 9>& hess) {
  hess.fill(0);
  grad = {0, 0, 0};
  if (const auto* b = std::get_if<Ball>(&prim)) {
    for (int i = 0; i < dim; ++i) {
      grad[i] = 2 * (x[i] - b->center[i]);
      hess[i * 3 + i] = 2;
    }
  } else if (const auto* e = std::get_if<Ellipse>(&prim)) {
    for (int i = 0; i < dim; ++i) {
      const double a2 = e->semi_axes[i] * e->semi_axes[i];
      grad[i] = 2 * (x[i] - e->center[i]) / a2;
      hess[i * 3 + i] = 2 / a2;
    }
  } else {
    throw ShapeError("implicit_derivatives: capsule boundary is not globally smooth");
  }
}

//! Eigenvalues of P H P / |g| restricted to the tangent space, where
//! P = I - n n^T and n = g/|g|. These are the principal curvatures with
//! respect to the outward primitive normal.
std::vector<double> implicit_curvatures(const Primitive& prim, const Point& x,
                                        int dim) {
  if (dim == 1) return {};
  Point g;
  std::array<double, 9> h;
  implicit_derivatives(prim, x, dim, g, h);
  const double gn = norm3(g, dim);
  if (gn == 0) throw ShapeError("curvature requested at a gradient-degenerate point");
  double n[3] = {g[0] / gn, g[1] / gn, g[2] / gn};
  double m[3][3] = {};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double php = 0;
      for (int k = 0; k < dim; ++k) {
        for (int l = 0; l < dim; ++l) {
          const double pik = (i == k ? 1.0 : 0.0) - n[i] * n[k];
          const double plj = (l == j ? 1.0 : 0.0) - n[l] * n[j];
          php += pik * h[k * 3 + l] * plj;
        }
      }
      m[i][j] = php;
    }
  }
  double tr = 0, tr2 = 0;
  for (int i = 0; i < dim; ++i) {
    tr += m[i][i];
    for (int j = 0; j < dim; ++j) tr2 += m[i][j] * m[j][i];
  }
  if (dim == 2) return {tr / gn};
  const double e2 = 0.5 * (tr * tr - tr2);
  const double disc = std::max(tr * tr - 4 * e2, 0.0);
  const double root = std::sqrt(disc);
  return {(tr - root) / (2 * gn), (tr + root) / (2 * gn)};
}

std::vector<double> capsule_curvatures(const Capsule& c, const Point& x,
                                       int dim) {
  const double t = capsule_raw_param(c, x, dim);
  const bool on_cap = t <= 0.0 || t >= 1.0;
  if (dim == 2) return {on_cap ? 1.0 / c.radius : 0.0};
  throw UnsupportedError("capsule domains are supported in two dimensions only");
}

Point primitive_outward_normal(const Primitive& prim, const Point& x, int dim) {
  if (const auto* c = std::get_if<Capsule>(&prim)) {
    const double t = std::clamp(capsule_raw_param(*c, x, dim), 0.0, 1.0);
    const Point closest = add_scaled(c->p0, t, sub3(c->p1, c->p0));
    Point d = sub3(x, closest);
    const double n = norm3(d, dim);
    if (n == 0) throw ShapeError("normal requested on the capsule spine");
    for (int i = 0; i < dim; ++i) d[i] /= n;
    return d;
  }
  Point g;
  std::array<double, 9> h;
  implicit_derivatives(prim, x, dim, g, h);
  const double gn = norm3(g, dim);
  if (gn == 0) throw ShapeError("normal requested at a gradient-degenerate point");
  for (int i = 0; i < dim; ++i) g[i] /= gn;
  return g;
}

std::vector<Point> primitive_boundary_points(const Primitive& prim, int dim,
                                             int n) {
  std::vector<Point> pts;
  if (dim == 1) {
    const auto& b = std::get<Ball>(prim);
    pts.push_back({b.center[0] - b.radius, 0, 0});
    pts.push_back({b.center[0] + b.radius, 0, 0});
    return pts;
  }
  pts.reserve(static_cast<std::size_t>(n));
  const double two_pi = 2 * std::acos(-1.0);
  if (const auto* b = std::get_if<Ball>(&prim)) {
    if (dim == 2) {
      for (int k = 0; k < n; ++k) {
        const double th = two_pi * k / n;
        pts.push_back({b->center[0] + b->radius * std::cos(th),
                       b->center[1] + b->radius * std::sin(th), 0});
      }
    } else {
      const double golden = 0.5 * (1 + std::sqrt(5.0));
      for (int k = 0; k < n; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / n;
        const double rho = std::sqrt(std::max(1.0 - z * z, 0.0));
        const double th = two_pi * k / golden;
        pts.push_back({b->center[0] + b->radius * rho * std::cos(th),
                       b->center[1] + b->radius * rho * std::sin(th),
                       b->center[2] + b->radius * z});
      }
    }
  } else if (const auto* e = std::get_if<Ellipse>(&prim)) {
    if (dim == 2) {
      for (int k = 0; k < n; ++k) {
        const double th = two_pi * k / n;
        pts.push_back({e->center[0] + e->semi_axes[0] * std::cos(th),
                       e->center[1] + e->semi_axes[1] * std::sin(th), 0});
      }
    } else {
      const double golden = 0.5 * (1 + std::sqrt(5.0));
      for (int k = 0; k < n; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / n;
        const double rho = std::sqrt(std::max(1.0 - z * z, 0.0));
        const double th = two_pi * k / golden;
        pts.push_back({e->center[0] + e->semi_axes[0] * rho * std::cos(th),
                       e->center[1] + e->semi_axes[1] * rho * std::sin(th),
                       e->center[2] + e->semi_axes[2] * z});
      }
    }
  } else {
    const auto& c = std::get<Capsule>(prim);
    if (dim != 2)
      throw UnsupportedError("capsule domains are supported in two dimensions only");
    const Point seg = sub3(c.p1, c.p0);
    const double len = norm3(seg, dim);
    const Point u = {seg[0] / len, seg[1] / len, 0};
    const Point v = {-u[1], u[0], 0};
    const double pi = std::acos(-1.0);
    const double perim = 2 * len + two_pi * c.radius;
    for (int k = 0; k < n; ++k) {
      double s = perim * k / n;
      Point q;
      if (s < len) {
        q = add_scaled(add_scaled(c.p0, s, u), c.radius, v);
      } else if (s < len + pi * c.radius) {
        const double al = (s - len) / c.radius;
        q = add_scaled(add_scaled(c.p1, c.radius * std::cos(al), v),
                       c.radius * std::sin(al), u);
      } else if (s < 2 * len + pi * c.radius) {
        const double w = s - len - pi * c.radius;
        q = add_scaled(add_scaled(c.p1, -w, u), -c.radius, v);
      } else {
        const double al = (s - 2 * len - pi * c.radius) / c.radius;
        q = add_scaled(add_scaled(c.p0, -c.radius * std::cos(al), v),
                       -c.radius * std::sin(al), u);
      }
      pts.push_back(q);
    }
  }
  return pts;
}

}  // namespace

bool BBox::valid() const {
  bool any = false;
  for (int i = 0; i < 3; ++i) {
    if (hi[i] < lo[i]) return false;
    if (hi[i] > lo[i]) any = true;
  }
  return any;
}

void validate(const DomainSpec& spec) {
  if (spec.dimension < 1 || spec.dimension > 3)
    throw ConfigError("domain dimension must be 1, 2, or 3");
  if (spec.primitives.empty()) throw ConfigError("domain has no primitives");
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    const auto& prim = spec.primitives[i];
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Ball>) {
            if (!(p.radius > 0))
              throw ConfigError("primitive " + std::to_string(i) +
                                ": ball radius must be positive");
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            if (spec.dimension == 1)
              throw ConfigError("primitive " + std::to_string(i) +
                                ": one-dimensional domains use balls only");
            for (int d = 0; d < spec.dimension; ++d)
              if (!(p.semi_axes[d] > 0))
                throw ConfigError("primitive " + std::to_string(i) +
                                  ": ellipse semi-axes must be positive");
          } else {
            if (spec.dimension != 2)
              throw UnsupportedError(
                  "capsule domains are supported in two dimensions only");
            if (!(p.radius > 0))
              throw ConfigError("primitive " + std::to_string(i) +
                                ": capsule radius must be positive");
            if (norm3(sub3(p.p1, p.p0), spec.dimension) <= 0)
              throw ConfigError("primitive " + std::to_string(i) +
                                ": capsule endpoints coincide; use a ball");
          }
        },
        prim);
  }
  switch (spec.kind) {
    case DomainKind::interior:
      if (spec.primitives.size() != 1)
        throw ConfigError("interior domains take exactly one primitive");
      break;
    case DomainKind::annulus: {
      if (spec.primitives.size() != 2)
        throw ConfigError("annulus domains take exactly two balls");
      const auto* inner = std::get_if<Ball>(&spec.primitives[0]);
      const auto* outer = std::get_if<Ball>(&spec.primitives[1]);
      if (!inner || !outer)
        throw ConfigError("annulus domains take exactly two balls");
      if (norm3(sub3(inner->center, outer->center), spec.dimension) > 1e-12)
        throw ConfigError("annulus balls must be concentric");
      if (!(inner->radius < outer->radius))
        throw ConfigError("annulus primitives must be ordered inner, outer");
      break;
    }
    case DomainKind::exterior: {
      for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.primitives.size(); ++j) {
          const auto bi = bounding_ball(spec.primitives[i], spec.dimension);
          const auto bj = bounding_ball(spec.primitives[j], spec.dimension);
          if (norm3(sub3(bi.center, bj.center), spec.dimension) >
              bi.radius + bj.radius)
            continue;
          const auto pts =
              primitive_boundary_points(spec.primitives[i], spec.dimension, 512);
          double min_sep = std::numeric_limits<double>::infinity();
          for (const auto& p : pts) {
            min_sep = std::min(min_sep, primitive_signed_distance(
                                            spec.primitives[j], p,
                                            spec.dimension));
          }
          if (min_sep <= 1e-9) {
            std::ostringstream os;
            os << "exterior domain primitives " << i << " and " << j
               << " are not disjoint (separation " << min_sep << ")";
            throw ConfigError(os.str());
          }
        }
      }
      break;
    }
  }
}

double primitive_signed_distance(const Primitive& prim, const Point& x,
                                 int dim) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return ball_sdist(p, x, dim);
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return ellipse_sdist(p, x, dim);
        } else {
          return capsule_sdist(p, x, dim);
        }
      },
      prim);
}

double exact_signed_distance(const DomainSpec& spec, const Point& x) {
  switch (spec.kind) {
    case DomainKind::interior:
      return -primitive_signed_distance(spec.primitives[0], x, spec.dimension);
    case DomainKind::exterior: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& prim : spec.primitives)
        d = std::min(d, primitive_signed_distance(prim, x, spec.dimension));
      return d;
    }
    case DomainKind::annulus: {
      const double d_inner =
          primitive_signed_distance(spec.primitives[0], x, spec.dimension);
      const double d_outer =
          primitive_signed_distance(spec.primitives[1], x, spec.dimension);
      return std::min(d_inner, -d_outer);
    }
  }
  throw ShapeError("unknown domain kind");
}

bool contains(const DomainSpec& spec, const Point& x) {
  return exact_signed_distance(spec, x) > 0;
}

double hopf_lax_value(const DomainSpec& spec, const Point& x, double t) {
  if (!(t > 0)) throw DomainError("hopf_lax_value requires t > 0");
  const double d = std::max(exact_signed_distance(spec, x), 0.0);
  return d * d / (4 * t);
}

std::vector<Point> boundary_points(const DomainSpec& spec,
                                   std::size_t prim_idx, int n) {
  if (prim_idx >= spec.primitives.size())
    throw ConfigError("boundary_points: primitive index out of range");
  if (n < 1) throw ConfigError("boundary_points: n must be positive");
  return primitive_boundary_points(spec.primitives[prim_idx], spec.dimension, n);
}

Point inward_normal(const DomainSpec& spec, std::size_t prim_idx,
                    const Point& p) {
  if (prim_idx >= spec.primitives.size())
    throw ConfigError("inward_normal: primitive index out of range");
  Point nrm =
      primitive_outward_normal(spec.primitives[prim_idx], p, spec.dimension);
  // omega_side signs curvatures: +1 when Omega lies inside the primitive.
  // The normal into Omega is then the negated primitive outward normal.
  const double s = -omega_side(spec, prim_idx);
  for (int i = 0; i < spec.dimension; ++i) nrm[i] *= s;
  return nrm;
}

std::vector<double> principal_curvatures(const DomainSpec& spec,
                                         const Point& p) {
  const double d = exact_signed_distance(spec, p);
  if (std::abs(d) > 1e-8) {
    std::ostringstream os;
    os << "principal_curvatures: point is not on the boundary (d = " << d
       << ")";
    throw DomainError(os.str());
  }
  const std::size_t idx = owning_primitive(spec, p);
  std::vector<double> ks;
  if (const auto* c = std::get_if<Capsule>(&spec.primitives[idx])) {
    ks = capsule_curvatures(*c, p, spec.dimension);
  } else if (const auto* b = std::get_if<Ball>(&spec.primitives[idx])) {
    // Constant by symmetry; bypass the implicit-surface path so equal radii
    // give bitwise equal curvatures at every boundary point.
    ks.assign(static_cast<std::size_t>(spec.dimension - 1), 1.0 / b->radius);
  } else {
    ks = implicit_curvatures(spec.primitives[idx], p, spec.dimension);
  }
  const double s = omega_side(spec, idx);
  for (double& k : ks) k *= s;
  return ks;
}

double curvature_product(const DomainSpec& spec, const Point& p, double R) {
  if (!(R > 0)) throw DomainError("curvature_product requires R > 0");
  const auto ks = principal_curvatures(spec, p);
  double prod = 1.0;
  for (double k : ks) {
    if (!(k < 1.0 / R)) {
      std::ostringstream os;
      os << "curvature_product: principal curvature " << k
         << " reaches the focal threshold 1/R = " << 1.0 / R;
      throw CausticError(os.str());
    }
    prod *= 1.0 / R - k;
  }
  return prod;
}

std::vector<Point> parallel_surface(const DomainSpec& spec, double R, int n) {
  if (!(R > 0)) throw DomainError("parallel_surface requires R > 0");
  std::vector<Point> out;
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    for (const auto& bp : boundary_points(spec, i, n)) {
      if (spec.dimension > 1) {
        for (double k : principal_curvatures(spec, bp)) {
          if (!(k < 1.0 / R)) {
            std::ostringstream os;
            os << "parallel_surface: focal distance reached on primitive " << i
               << " (curvature " << k << ", offset " << R << ")";
            throw CausticError(os.str());
          }
        }
      }
      const Point q = add_scaled(bp, R, inward_normal(spec, i, bp));
      const double d = exact_signed_distance(spec, q);
      if (std::abs(d - R) > 1e-10) {
        std::ostringstream os;
        os << "parallel_surface: offset point has distance " << d
           << " instead of " << R
           << "; another boundary component is closer or the offset passed a "
              "focal point";
        throw CausticError(os.str());
      }
      out.push_back(q);
    }
  }
  return out;
}

std::optional<double> boundary_intercept(const DomainSpec& spec,
                                         const Point& p, const Point& dir,
                                         double smax) {
  if (!(smax > 0)) throw DomainError("boundary_intercept requires smax > 0");
  auto g = [&](double s) {
    return exact_signed_distance(spec, add_scaled(p, s, dir));
  };
  const int kScan = 8;
  double s_lo = 0.0, g_lo = g(0.0);
  double s_hi = 0.0, g_hi = g_lo;
  bool found = false;
  for (int k = 1; k <= kScan; ++k) {
    s_hi = smax * k / kScan;
    g_hi = g(s_hi);
    if ((g_lo > 0) != (g_hi > 0)) {
      found = true;
      break;
    }
    s_lo = s_hi;
    g_lo = g_hi;
  }
  if (!found) return std::nullopt;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (s_lo + s_hi);
    if ((g(mid) > 0) == (g_lo > 0)) {
      s_lo = mid;
    } else {
      s_hi = mid;
    }
  }
  return 0.5 * (s_lo + s_hi);
}

ScalarField sample_signed_distance(const DomainSpec& spec,
                                   std::shared_ptr<const Grid> grid) {
  if (!grid->is_cartesian())
    throw UnsupportedError("sample_signed_distance expects a Cartesian grid");
  const auto& g = grid->cartesian();
  ScalarField f;
  f.grid = std::move(grid);
  f.values.resize(g.node_count());
  f.mask.resize(g.node_count());
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const auto [x, y] = g.pos(ix, iy);
      const double d = exact_signed_distance(spec, {x, y, 0});
      const std::size_t id = g.index(ix, iy);
      f.values[id] = d;
      f.mask[id] = d > 0 ? kMaskInside : kMaskOutside;
    }
  }
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t id = g.index(ix, iy);
      if (f.mask[id] != kMaskInside) continue;
      const bool edge = ix == 0 || iy == 0 || ix + 1 == g.nx || iy + 1 == g.ny;
      auto outside = [&](int jx, int jy) {
        return f.mask[g.index(jx, jy)] == kMaskOutside;
      };
      if (edge || outside(ix - 1, iy) || outside(ix + 1, iy) ||
          outside(ix, iy - 1) || outside(ix, iy + 1)) {
        f.mask[id] = kMaskBoundaryAdjacent;
      }
    }
  }
  return f;
}

}  // namespace difflab
