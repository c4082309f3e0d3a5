#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "difflab/errors.hpp"

namespace difflab {

//! Node mask codes for ScalarField.
enum : std::uint8_t {
  kMaskOutside = 0,
  kMaskInside = 1,
  kMaskBoundaryAdjacent = 2,
};

//! Uniform lattice: node (ix, iy) sits at origin + h * (ix, iy),
//! index = iy * nx + ix (x fastest).
struct CartesianGrid2D {
  std::array<double, 2> origin{0.0, 0.0};
  double h = 0.0;
  int nx = 0, ny = 0;

  std::size_t node_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  }
  std::array<double, 2> pos(int ix, int iy) const {
    return {origin[0] + h * ix, origin[1] + h * iy};
  }
};

enum class RadialMetric { euclidean, sphere, hyperbolic };

//! One-dimensional lattice in the radial coordinate, possibly graded. dim is
//! the ambient dimension N entering the volume weight: r^(N-1) in the
//! Euclidean case, sin(r)^(N-1) / sinh(r)^(N-1) on the model manifolds.
struct RadialGrid {
  std::vector<double> r;
  int dim = 1;
  RadialMetric metric = RadialMetric::euclidean;

  std::size_t node_count() const { return r.size(); }
};

struct Grid {
  std::variant<CartesianGrid2D, RadialGrid> shape;

  bool is_cartesian() const {
    return std::holds_alternative<CartesianGrid2D>(shape);
  }
  bool is_radial() const { return std::holds_alternative<RadialGrid>(shape); }
  const CartesianGrid2D& cartesian() const {
    if (!is_cartesian()) throw ShapeError("grid: expected a Cartesian lattice");
    return std::get<CartesianGrid2D>(shape);
  }
  const RadialGrid& radial() const {
    if (!is_radial()) throw ShapeError("grid: expected a radial lattice");
    return std::get<RadialGrid>(shape);
  }
  std::size_t node_count() const {
    return is_cartesian() ? cartesian().node_count() : radial().node_count();
  }
};

//! Sampled scalar on a grid. values[i] is the primal value at node i; when a
//! solver carried the solution in log form, log_values holds log(u) at the
//! same nodes and values holds exp(log_values) flushed to zero on underflow.
struct ScalarField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  std::optional<std::vector<double>> log_values;

  std::size_t size() const { return values.size(); }
};

//! True when both fields live on the same grid object or on grids with
//! identical layout.
bool same_grid(const ScalarField& a, const ScalarField& b);

//! Nodes of [a, b] with spacing h_min next to each attractor (which must be
//! sorted and within [a, b]; endpoints count automatically when listed),
//! growing linearly with distance at the given rate until h_max. Attractors
//! land exactly on nodes.
std::vector<double> graded_nodes(double a, double b, double h_min,
                                 double grade_ratio, double h_max,
                                 std::vector<double> attractors);

//! Catmull-Rom sample of a Cartesian field. The 4x4 stencil must be fully
//! inside the grid and masked inside; throws DomainError otherwise.
double bicubic_sample(const ScalarField& f, double x, double y);

//! Cubic sample of a radial field at radius r (nodes are graded, slopes from
//! weighted central differences). Clamps to end values outside the range.
double radial_sample(const ScalarField& f, double r);

}  // namespace difflab
