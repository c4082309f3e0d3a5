#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "difflab/geometry.hpp"
#include "difflab/grid.hpp"
#include "difflab/pde_solver.hpp"

namespace difflab {

//! Spread statistics of the solution over a fixed surface, one entry per
//! snapshot. A surface on which the solution is constant in space at every
//! time scores zero up to interpolation error.
struct StationarityScore {
  std::vector<Point> surface_points;
  std::vector<double> times;
  std::vector<double> per_time_std;     // population std of sampled values
  std::vector<double> per_time_spread;  // (max - min) / |mean| per snapshot
  double max_rel_spread = 0.0;
};

//! Samples every snapshot at the surface points: bicubic interpolation on
//! lattice fields, cubic radial interpolation (at |p|) on radial fields.
//! Sampling outside the masked-in region throws DomainError.
StationarityScore stationarity_test(const FieldSeries& series,
                                    const std::vector<Point>& surface);

//! Mirror plane {x : dot(x, normal) = offset} in the lattice plane.
struct ReflectionPlane {
  std::array<double, 2> normal{1.0, 0.0};
  double offset = 0.0;
};

//! Sign pattern of u - w on the cap, where w(x) = u(reflected x) and the cap
//! is the masked-in part of the half-space dot(x, normal) <= offset - margin.
struct ReflectionReport {
  std::vector<double> times;
  std::vector<double> min_gap;  // per snapshot, min over cap of u - w
  std::vector<double> max_gap;
  double min_overall = 0.0;
  double max_abs_overall = 0.0;  // sup |u - w|; small means mirror symmetry
  std::size_t cap_nodes = 0;
  std::size_t skipped_nodes = 0;  // reflection stencil unavailable

  bool symmetric(double tol) const { return max_abs_overall <= tol; }
  bool ordered(double tol) const { return min_overall >= -tol; }
};

//! Compares the 2D lattice solution with its reflection across the plane.
//! Cap nodes whose reflected sample stencil leaves the masked-in region are
//! skipped and counted; an empty cap throws DomainError.
ReflectionReport reflection_comparator(const FieldSeries& series,
                                       const ReflectionPlane& plane,
                                       double margin = 0.0);

//! Values of the offset-surface curvature product sampled over the boundary.
struct CurvatureConstancyReport {
  std::vector<double> products;
  double min_product = 0.0;
  double max_product = 0.0;
  double rel_deviation = 0.0;  // (max - min) / |mean|
  double tol = 0.0;
  bool sphere_consistent = false;  // rel_deviation <= tol
};

//! Samples curvature_product at n boundary points of every primitive.
//! Errors from inadmissible offsets (focal distance reached) propagate.
CurvatureConstancyReport curvature_constancy(const DomainSpec& spec, double R,
                                             int n, double tol = 1e-9);

//! Vector moments over circles around x0: for the linear heat flow the
//! moment of u over every sphere centered at a point of symmetry vanishes.
struct BalanceLawReport {
  std::vector<double> radii;
  std::vector<double> times;
  std::vector<std::vector<double>> moment_norms;  // [time][radius]
  double max_norm = 0.0;
  int angular_samples = 0;
  double tol = 0.0;
  bool pass() const { return max_norm <= tol; }
};

//! Evaluates the circle moment integral of (x - x0) u dS by trapezoidal
//! quadrature in angle for each radius and snapshot. Requires a series from
//! the linear flux (UnsupportedError otherwise) and a 2D lattice grid;
//! circles must stay inside the masked-in region.
BalanceLawReport balance_law_check(const FieldSeries& series,
                                   const std::array<double, 2>& x0,
                                   const std::vector<double>& radii,
                                   double tol, int angular_samples = 256);

}  // namespace difflab
