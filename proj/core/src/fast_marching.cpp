#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "difflab/geometry.hpp"

namespace difflab {

double min_feature_size(const DomainSpec& spec) {
  double feat = std::numeric_limits<double>::infinity();
  for (const auto& prim : spec.primitives) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Ball>) {
            feat = std::min(feat, p.radius);
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            double amin = p.semi_axes[0], amax = p.semi_axes[0];
            for (int i = 1; i < spec.dimension; ++i) {
              amin = std::min(amin, p.semi_axes[i]);
              amax = std::max(amax, p.semi_axes[i]);
            }
            feat = std::min(feat, amin * amin / amax);
          } else {
            feat = std::min(feat, p.radius);
          }
        },
        prim);
  }
  if (spec.kind == DomainKind::annulus) {
    const auto& inner = std::get<Ball>(spec.primitives[0]);
    const auto& outer = std::get<Ball>(spec.primitives[1]);
    feat = std::min(feat, outer.radius - inner.radius);
  }
  if (spec.kind == DomainKind::exterior && spec.primitives.size() > 1) {
    for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
      const auto pts = boundary_points(spec, i, 512);
      for (std::size_t j = 0; j < spec.primitives.size(); ++j) {
        if (j == i) continue;
        for (const auto& p : pts) {
          feat = std::min(feat, primitive_signed_distance(
                                    spec.primitives[j], p, spec.dimension));
        }
      }
    }
  }
  return feat;
}

ScalarField fast_march_distance(const DomainSpec& spec,
                                const CartesianGrid2D& grid) {
  if (spec.dimension != 2)
    throw UnsupportedError("fast_march_distance expects a two-dimensional domain");
  const double feat = min_feature_size(spec);
  if (feat < 8 * grid.h) {
    std::ostringstream os;
    os << "fast_march_distance: smallest domain feature " << feat
       << " needs spacing at most " << feat / 8 << ", got " << grid.h;
    throw ResolutionError(os.str());
  }

  const int nx = grid.nx, ny = grid.ny;
  const std::size_t nn = grid.node_count();
  std::vector<char> inside(nn);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const auto [x, y] = grid.pos(ix, iy);
      inside[grid.index(ix, iy)] = contains(spec, {x, y, 0}) ? 1 : 0;
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> mag(nn, kInf);
  std::vector<char> accepted(nn, 0);

  using HeapItem = std::pair<double, std::size_t>;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;

  auto update_node = [&](int ix, int iy) {
    const std::size_t id = grid.index(ix, iy);
    if (accepted[id]) return;
    const double h = grid.h;
    double ax = kInf, ay = kInf;
    if (ix > 0 && accepted[grid.index(ix - 1, iy)])
      ax = mag[grid.index(ix - 1, iy)];
    if (ix + 1 < nx && accepted[grid.index(ix + 1, iy)])
      ax = std::min(ax, mag[grid.index(ix + 1, iy)]);
    if (iy > 0 && accepted[grid.index(ix, iy - 1)])
      ay = mag[grid.index(ix, iy - 1)];
    if (iy + 1 < ny && accepted[grid.index(ix, iy + 1)])
      ay = std::min(ay, mag[grid.index(ix, iy + 1)]);
    if (ax > ay) std::swap(ax, ay);
    if (ax == kInf) return;
    double t;
    if (ay == kInf || ay - ax >= h) {
      t = ax + h;
    } else {
      const double diff = ay - ax;
      t = 0.5 * (ax + ay + std::sqrt(2 * h * h - diff * diff));
    }
    if (t < mag[id]) {
      mag[id] = t;
      heap.emplace(t, id);
    }
  };

  std::vector<std::size_t> band;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t id = grid.index(ix, iy);
      auto differs = [&](int jx, int jy) {
        return inside[grid.index(jx, jy)] != inside[id];
      };
      const bool near_boundary =
          (ix > 0 && differs(ix - 1, iy)) ||
          (ix + 1 < nx && differs(ix + 1, iy)) ||
          (iy > 0 && differs(ix, iy - 1)) ||
          (iy + 1 < ny && differs(ix, iy + 1));
      if (!near_boundary) continue;
      const auto [x, y] = grid.pos(ix, iy);
      mag[id] = std::abs(exact_signed_distance(spec, {x, y, 0}));
      accepted[id] = 1;
      band.push_back(id);
    }
  }
  if (band.empty())
    throw ResolutionError("fast_march_distance: grid does not straddle the boundary");
  for (const std::size_t id : band) {
    const int ix = static_cast<int>(id % static_cast<std::size_t>(nx));
    const int iy = static_cast<int>(id / static_cast<std::size_t>(nx));
    if (ix > 0) update_node(ix - 1, iy);
    if (ix + 1 < nx) update_node(ix + 1, iy);
    if (iy > 0) update_node(ix, iy - 1);
    if (iy + 1 < ny) update_node(ix, iy + 1);
  }

  while (!heap.empty()) {
    const auto [t, id] = heap.top();
    heap.pop();
    if (accepted[id] || t > mag[id]) continue;
    accepted[id] = 1;
    const int ix = static_cast<int>(id % static_cast<std::size_t>(nx));
    const int iy = static_cast<int>(id / static_cast<std::size_t>(nx));
    if (ix > 0) update_node(ix - 1, iy);
    if (ix + 1 < nx) update_node(ix + 1, iy);
    if (iy > 0) update_node(ix, iy - 1);
    if (iy + 1 < ny) update_node(ix, iy + 1);
  }

  ScalarField f;
  f.grid = std::make_shared<Grid>(Grid{grid});
  f.values.resize(nn);
  f.mask.resize(nn);
  for (std::size_t id = 0; id < nn; ++id) {
    f.values[id] = inside[id] ? mag[id] : -mag[id];
    f.mask[id] = inside[id] ? kMaskInside : kMaskOutside;
  }
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t id = grid.index(ix, iy);
      if (f.mask[id] != kMaskInside) continue;
      const bool edge = ix == 0 || iy == 0 || ix + 1 == nx || iy + 1 == ny;
      auto outside = [&](int jx, int jy) {
        return f.mask[grid.index(jx, jy)] == kMaskOutside;
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
