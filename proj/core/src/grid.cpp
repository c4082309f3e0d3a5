#include "difflab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "difflab/interp.hpp"

namespace difflab {

bool same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid == b.grid) return true;
  if (!a.grid || !b.grid) return false;
  if (a.grid->is_cartesian() != b.grid->is_cartesian()) return false;
  if (a.grid->is_cartesian()) {
    const auto& ga = a.grid->cartesian();
    const auto& gb = b.grid->cartesian();
    return ga.nx == gb.nx && ga.ny == gb.ny && ga.h == gb.h &&
           ga.origin == gb.origin;
  }
  const auto& ra = a.grid->radial();
  const auto& rb = b.grid->radial();
  return ra.dim == rb.dim && ra.metric == rb.metric && ra.r == rb.r;
}

std::vector<double> graded_nodes(double a, double b, double h_min,
                                 double grade_ratio, double h_max,
                                 std::vector<double> attractors) {
  if (!(b > a)) throw ConfigError("graded_nodes: need b > a");
  if (!(h_min > 0.0) || !(h_max >= h_min) || !(grade_ratio > 1.0)) {
    throw ConfigError("graded_nodes: need 0 < h_min <= h_max, ratio > 1");
  }
  std::sort(attractors.begin(), attractors.end());
  attractors.erase(std::unique(attractors.begin(), attractors.end()),
                   attractors.end());
  for (double p : attractors) {
    if (p < a - 1e-12 || p > b + 1e-12) {
      throw ConfigError("graded_nodes: attractor outside interval");
    }
  }
  const double slope = grade_ratio - 1.0;
  auto density = [&](double x) {
    double h = h_max;
    for (double p : attractors) {
      h = std::min(h, h_min + slope * std::abs(x - p));
    }
    return h;
  };

  // Split at attractors and mesh each segment left to right; the density is
  // symmetric in distance, so both segment ends refine correctly.
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double p : attractors) {
    if (p > a + 1e-12 && p < b - 1e-12) cuts.push_back(p);
  }
  cuts.push_back(b);

  std::vector<double> nodes;
  nodes.push_back(a);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double x0 = cuts[s];
    const double x1 = cuts[s + 1];
    // First pass: provisional walk to count steps.
    std::vector<double> walk;
    double x = x0;
    while (x < x1) {
      double h = density(x);
      if (x + 1.5 * h >= x1) break;
      x += h;
      walk.push_back(x);
    }
    // Snap the tail so the segment ends exactly at x1 with a gentle last cell.
    double tail0 = walk.empty() ? x0 : walk.back();
    double rem = x1 - tail0;
    int extra = std::max(1, static_cast<int>(std::round(rem / density(x1))));
    for (int k = 1; k < extra; ++k) {
      walk.push_back(tail0 + rem * k / extra);
    }
    for (double w : walk) nodes.push_back(w);
    nodes.push_back(x1);
  }
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double u, double v) {
                            return std::abs(u - v) < 1e-15;
                          }),
              nodes.end());
  return nodes;
}

double bicubic_sample(const ScalarField& f, double x, double y) {
  const auto& g = f.grid->cartesian();
  const double fx = (x - g.origin[0]) / g.h;
  const double fy = (y - g.origin[1]) / g.h;
  const int ix = static_cast<int>(std::floor(fx));
  const int iy = static_cast<int>(std::floor(fy));
  if (ix < 1 || iy < 1 || ix + 2 >= g.nx || iy + 2 >= g.ny) {
    throw DomainError("bicubic_sample: stencil leaves the grid");
  }
  double wx[4], wy[4];
  catmull_rom_weights(fx - ix, wx);
  catmull_rom_weights(fy - iy, wy);
  double acc = 0.0;
  for (int j = -1; j <= 2; ++j) {
    for (int i = -1; i <= 2; ++i) {
      const std::size_t idx = g.index(ix + i, iy + j);
      if (f.mask[idx] == kMaskOutside) {
        throw DomainError("bicubic_sample: stencil touches excluded nodes");
      }
      acc += wx[i + 1] * wy[j + 1] * f.values[idx];
    }
  }
  return acc;
}

double radial_sample(const ScalarField& f, double r) {
  const auto& g = f.grid->radial();
  const auto& rs = g.r;
  if (r <= rs.front()) return f.values.front();
  if (r >= rs.back()) return f.values.back();
  auto it = std::upper_bound(rs.begin(), rs.end(), r);
  std::size_t i = static_cast<std::size_t>(it - rs.begin()) - 1;
  // Cubic through up to four surrounding nodes (Lagrange form).
  const std::size_t lo = (i == 0) ? 0 : i - 1;
  const std::size_t hi = std::min(rs.size() - 1, i + 2);
  double acc = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    double w = 1.0;
    for (std::size_t m = lo; m <= hi; ++m) {
      if (m != k) w *= (r - rs[m]) / (rs[k] - rs[m]);
    }
    acc += w * f.values[k];
  }
  return acc;
}

}  // namespace difflab
