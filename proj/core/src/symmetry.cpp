#include "difflab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace difflab {

namespace {

double sample_at(const ScalarField& f, const Point& p) {
  if (f.grid->is_cartesian()) {
    return bicubic_sample(f, p[0], p[1]);
  }
  const RadialGrid& g = f.grid->radial();
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  if (r < g.r.front() - 1e-12 || r > g.r.back() + 1e-12) {
    std::ostringstream os;
    os << "surface sample: radius " << r << " outside the grid range ["
       << g.r.front() << ", " << g.r.back() << "]";
    throw DomainError(os.str());
  }
  return radial_sample(f, r);
}

//! True when the 4x4 bicubic stencil around (x, y) exists and is fully
//! masked in, mirroring the requirements of bicubic_sample.
bool stencil_available(const ScalarField& f, double x, double y) {
  const CartesianGrid2D& g = f.grid->cartesian();
  const double fx = (x - g.origin[0]) / g.h;
  const double fy = (y - g.origin[1]) / g.h;
  const int ix = static_cast<int>(std::floor(fx));
  const int iy = static_cast<int>(std::floor(fy));
  if (ix < 1 || iy < 1 || ix + 2 >= g.nx || iy + 2 >= g.ny) return false;
  for (int dy = -1; dy <= 2; ++dy) {
    for (int dx = -1; dx <= 2; ++dx) {
      if (f.mask[g.index(ix + dx, iy + dy)] == kMaskOutside) return false;
    }
  }
  return true;
}

}  // namespace

StationarityScore stationarity_test(const FieldSeries& series,
                                    const std::vector<Point>& surface) {
  if (series.snapshots.empty()) {
    throw ShapeError("stationarity test: series has no snapshots");
  }
  if (surface.size() < 2) {
    throw ConfigError("stationarity test: need at least two surface points");
  }

  StationarityScore score;
  score.surface_points = surface;
  for (const Snapshot& snap : series.snapshots) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0, sum2 = 0.0;
    for (const Point& p : surface) {
      const double v = sample_at(snap.field, p);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(surface.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    const double denom = std::max(std::abs(mean), 1e-300);
    score.times.push_back(snap.time);
    score.per_time_std.push_back(std::sqrt(var));
    score.per_time_spread.push_back((hi - lo) / denom);
    score.max_rel_spread =
        std::max(score.max_rel_spread, score.per_time_spread.back());
  }
  return score;
}

ReflectionReport reflection_comparator(const FieldSeries& series,
                                       const ReflectionPlane& plane,
                                       double margin) {
  if (series.snapshots.empty()) {
    throw ShapeError("reflection comparator: series has no snapshots");
  }
  const ScalarField& first = series.snapshots.front().field;
  if (!first.grid->is_cartesian()) {
    throw ShapeError("reflection comparator: needs a 2D lattice series");
  }
  const double norm =
      std::hypot(plane.normal[0], plane.normal[1]);
  if (!(norm > 1e-12)) {
    throw ConfigError("reflection comparator: zero plane normal");
  }
  const double nx = plane.normal[0] / norm;
  const double ny = plane.normal[1] / norm;
  const double lam = plane.offset / norm;

  const CartesianGrid2D& g = first.grid->cartesian();
  std::vector<std::size_t> cap;
  std::vector<std::array<double, 2>> mirrored;
  std::size_t skipped = 0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t id = g.index(ix, iy);
      if (first.mask[id] != kMaskInside) continue;
      const auto p = g.pos(ix, iy);
      const double side = lam - (p[0] * nx + p[1] * ny);
      if (side < margin) continue;
      const double rx = p[0] + 2.0 * side * nx;
      const double ry = p[1] + 2.0 * side * ny;
      if (!stencil_available(first, rx, ry)) {
        ++skipped;
        continue;
      }
      cap.push_back(id);
      mirrored.push_back({rx, ry});
    }
  }
  if (cap.empty()) {
    throw DomainError(
        "reflection comparator: no cap node has an interpolable reflection");
  }

  ReflectionReport rep;
  rep.cap_nodes = cap.size();
  rep.skipped_nodes = skipped;
  rep.min_overall = std::numeric_limits<double>::infinity();
  for (const Snapshot& snap : series.snapshots) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cap.size(); ++k) {
      const double u = snap.field.values[cap[k]];
      const double w = bicubic_sample(snap.field, mirrored[k][0],
                                      mirrored[k][1]);
      const double gap = u - w;
      lo = std::min(lo, gap);
      hi = std::max(hi, gap);
    }
    rep.times.push_back(snap.time);
    rep.min_gap.push_back(lo);
    rep.max_gap.push_back(hi);
    rep.min_overall = std::min(rep.min_overall, lo);
    rep.max_abs_overall =
        std::max({rep.max_abs_overall, std::abs(lo), std::abs(hi)});
  }
  return rep;
}

CurvatureConstancyReport curvature_constancy(const DomainSpec& spec, double R,
                                             int n, double tol) {
  if (n < 2) {
    throw ConfigError("curvature constancy: need at least two samples");
  }
  CurvatureConstancyReport rep;
  rep.tol = tol;
  for (std::size_t prim = 0; prim < spec.primitives.size(); ++prim) {
    for (const Point& p : boundary_points(spec, prim, n)) {
      rep.products.push_back(curvature_product(spec, p, R));
    }
  }
  rep.min_product = *std::min_element(rep.products.begin(), rep.products.end());
  rep.max_product = *std::max_element(rep.products.begin(), rep.products.end());
  double mean = 0.0;
  for (double v : rep.products) mean += v;
  mean /= static_cast<double>(rep.products.size());
  const double denom = std::max(std::abs(mean), 1e-300);
  rep.rel_deviation = (rep.max_product - rep.min_product) / denom;
  rep.sphere_consistent = rep.rel_deviation <= tol;
  return rep;
}

BalanceLawReport balance_law_check(const FieldSeries& series,
                                   const std::array<double, 2>& x0,
                                   const std::vector<double>& radii,
                                   double tol, int angular_samples) {
  if (!series.linear) {
    throw UnsupportedError(
        "balance law: the moment identity holds for the linear flux only");
  }
  if (series.snapshots.empty()) {
    throw ShapeError("balance law: series has no snapshots");
  }
  if (!series.snapshots.front().field.grid->is_cartesian()) {
    throw ShapeError("balance law: needs a 2D lattice series");
  }
  if (angular_samples < 8) {
    throw ConfigError("balance law: need at least eight angular samples");
  }

  BalanceLawReport rep;
  rep.radii = radii;
  rep.angular_samples = angular_samples;
  rep.tol = tol;
  const double dtheta = 2.0 * M_PI / angular_samples;
  for (const Snapshot& snap : series.snapshots) {
    rep.times.push_back(snap.time);
    std::vector<double> norms;
    for (double r : radii) {
      if (!(r >= 0.0)) {
        throw ConfigError("balance law: radii must be nonnegative");
      }
      if (r == 0.0) {
        norms.push_back(0.0);
        continue;
      }
      double mx = 0.0, my = 0.0;
      for (int j = 0; j < angular_samples; ++j) {
        const double theta = dtheta * j;
        const double cx = std::cos(theta);
        const double cy = std::sin(theta);
        const double u =
            bicubic_sample(snap.field, x0[0] + r * cx, x0[1] + r * cy);
        mx += r * cx * u;
        my += r * cy * u;
      }
      const double weight = r * dtheta;  // arc length per sample
      norms.push_back(std::hypot(mx * weight, my * weight));
      rep.max_norm = std::max(rep.max_norm, norms.back());
    }
    rep.moment_norms.push_back(std::move(norms));
  }
  return rep;
}

}  // namespace difflab
