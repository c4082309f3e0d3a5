#pragma once

#include <cstddef>
#include <vector>

#include "difflab/asymptotics.hpp"
#include "difflab/grid.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"

namespace difflab {

enum class ManifoldModel { sphere, hyperbolic };

//! Constant-curvature model space of curvature +1 (sphere) or -1
//! (hyperbolic), dimension N >= 2.
struct ManifoldSpec {
  ManifoldModel model = ManifoldModel::sphere;
  int dimension = 2;
};

//! Pole-centered geodesic ball (r_inner = 0) or annulus r_inner < r < r_outer.
struct GeodesicDomain {
  double r_inner = 0.0;
  double r_outer = 0.0;

  bool is_ball() const { return r_inner == 0.0; }
};

//! Geodesic distance between embedded points: unit vectors in R^{N+1} for
//! the sphere (arccos of the dot product), upper-hyperboloid coordinates with
//! signature (-,+,...,+) for the hyperbolic space (arcosh of minus the
//! Lorentzian product). Points further than tol from the model surface throw
//! DomainError.
double geodesic_distance(const ManifoldSpec& m, const std::vector<double>& x,
                         const std::vector<double>& y, double tol = 1e-9);

//! Radial heat-flow setup on the model manifold.
struct ManifoldSetup {
  enum class Kind {
    boundary_dirichlet,          // solve inside the domain, u = value on its
                                 // boundary, zero start
    cauchy_complement_indicator  // solve on the whole manifold from the
                                 // indicator of the domain's complement
  };
  Kind kind = Kind::boundary_dirichlet;
  double boundary_value = 1.0;
  //! Cauchy on the hyperbolic model: truncation radius of the radial grid;
  //! 0 picks r_outer + 2. The sphere needs none (the grid ends at the far
  //! pole).
  double truncation_radius = 0.0;
};

//! Radial solve of u_t = Lap u (or the nonlinear flux) with the metric
//! weight of the model: the radial operator is u_rr + (N-1) cot(r) u_r on
//! the sphere and with coth on the hyperbolic space, with the standard
//! series condition at poles. Sphere domains must keep r_outer < pi.
FieldSeries solve_radial_heat_manifold(const ManifoldSpec& m,
                                       const GeodesicDomain& dom,
                                       const ManifoldSetup& setup,
                                       const Nonlinearity& nl, double h,
                                       const SolverOptions& options,
                                       const std::vector<double>& snapshot_times);

//! Signed geodesic distance to the domain boundary (positive inside the
//! domain) sampled on the grid of `like`, with its mask.
ScalarField geodesic_signed_distance_field(const GeodesicDomain& dom,
                                           const ScalarField& like);

//! convergence_report against the squared geodesic distance. The series must
//! come from the linear flux.
VaradhanReport manifold_varadhan_report(const FieldSeries& series,
                                        const ManifoldSpec& m,
                                        const GeodesicDomain& dom,
                                        double K_margin, double K_far = 0.0,
                                        double envelope_tol = 0.05);

//! Outcome of the collar comparison: the two auxiliary Cauchy solutions
//! bracket the domain solution while the wide-collar solution exceeds 1 on
//! the boundary, and the bracket squeezes -4 t log u against d^2 with
//! margins linear in the collar width.
struct KernelSandwichReport {
  double rho = 0.0;   // half-width of the two-sided collar
  double rho0 = 0.0;  // admissible reach (cut loci of the distance function)
  double t_rho = 0.0;  // window on which the upper solution exceeds 1
  bool window_empty = false;
  std::size_t checked_times = 0;

  int lower_violations = 0;  // nodes with u < u_minus - tol in the window
  int upper_violations = 0;  // nodes with u > u_plus + tol in the window
  double worst_lower_gap = 0.0;  // min of u - u_minus
  double worst_upper_gap = 0.0;  // min of u_plus - u
  double tol = 0.0;

  //! Squeeze at the smallest checked time over the closed domain:
  //! d^2 - (2m+1) rho <= -4 t log u <= d^2 + (2m+3) rho, m = max d.
  double m_constant = 0.0;
  double bound_time = 0.0;
  int bound_violations = 0;
  double bound_worst_margin = 0.0;
  std::size_t bound_skipped = 0;  // nodes with no usable log value
  std::size_t K_nodes = 0;

  bool pass() const { return lower_violations == 0 && upper_violations == 0; }
};

//! Re-solves the two collar Cauchy problems (indicator of the outer collar
//! of width rho0; twice the indicator of the symmetric collar of width rho)
//! with the same grid, options, and snapshot times as the given series, and
//! verifies the nodewise bracket on the domain for every snapshot in the
//! window where the wide-collar solution exceeds 1 on the boundary.
//! Requires a linear-flux Cauchy series and 0 < rho < min(1, rho0).
KernelSandwichReport kernel_sandwich_check(const FieldSeries& series,
                                           const ManifoldSpec& m,
                                           const GeodesicDomain& dom,
                                           double rho,
                                           const SolverOptions& options,
                                           double tol = 1e-6);

//! Small-domain rescaling against the Euclidean radial solver: the manifold
//! solution on radii scaled by s at times scaled by s^2 is compared node by
//! node with the Euclidean solution on the base domain.
struct EuclidLimitReport {
  double s = 0.0;
  std::vector<double> ref_times;  // Euclidean times; manifold ran at s^2 t
  double sup_rel_error = 0.0;
  double value_floor = 0.0;  // nodes below this reference value are skipped
  std::size_t compared = 0;
};

EuclidLimitReport euclid_limit_report(const ManifoldSpec& m,
                                      const GeodesicDomain& dom, double s,
                                      double h, const SolverOptions& options,
                                      const std::vector<double>& ref_times,
                                      double value_floor = 1e-3);

}  // namespace difflab
