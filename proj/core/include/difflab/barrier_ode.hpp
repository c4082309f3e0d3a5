#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "difflab/grid.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"

namespace difflab {

//! Self-similar barrier profile: the system
//!   h' = H / phi'(h),  H' = -(1/2) xi H / phi'(h)
//! integrated outward from xi = 0 in both directions and sampled on a
//! symmetric node set. H stays negative, so h is strictly decreasing.
struct BarrierSolution {
  std::vector<double> xi_nodes;  // symmetric, uniform on [-L, L], 0 included
  std::vector<double> h_values;
  std::vector<double> H_values;
  double delta_shift = 0.0;  // delta in f(xi) = h(xi + 2 delta)
  std::pair<double, double> limits{0.0, 0.0};  // h at -L and +L
  std::pair<double, double> initial_data{0.0, 0.0};  // (h0, H0)
  double tail_bound = 0.0;  // bound on |h(+-inf) - h(+-L)| from the envelope
};

//! Closed-form starting pair built from the derivative bounds:
//! h0 = delta1^{3/2} / (2 (delta1^{3/2} + delta2^{3/2})),
//! H0 = -delta1 delta2 / (sqrt(pi) (delta1^{3/2} + delta2^{3/2})).
std::pair<double, double> default_initial_data(double delta1, double delta2);

//! Integrates the profile with an embedded adaptive Runge-Kutta pair, landing
//! exactly on every output node, then audits the result: H < 0 and h strictly
//! decreasing everywhere, and H inside the Gaussian envelope spanned by
//! H0 exp(-xi^2 / (4 delta)) for delta = delta1 and delta2 (endpoints ordered
//! for H0 < 0). Violations beyond tol throw NumericError. delta_shift is
//! filled via choose_shift. Requires H0 < 0, h0 in (0, 1), and L big enough
//! that exp(-L^2 / (4 delta2)) < tol.
BarrierSolution solve_barrier_ode(const Nonlinearity& nl, double h0, double H0,
                                  double L, double tol = 1e-10);

//! Largest delta = 2^{-k}, k >= 1, with h(2 delta) > h(0) / 2. Keeps the
//! shifted profile value at 0 bounded away from zero.
double choose_shift(const BarrierSolution& bs);

//! f(xi) = h(xi + 2 delta_shift) by monotone cubic interpolation between the
//! stored nodes, clamped to the limit values outside the integration range.
double barrier_f(const BarrierSolution& bs, double xi);

//! Nodewise w(x) = f(d_star(x) / sqrt(t)); masked-outside nodes pass through
//! with value 0.
ScalarField subsolution_field(const BarrierSolution& bs,
                              const ScalarField& d_star, double t);

//! Outcome of comparing the subsolution against a Cauchy solution on the
//! boundary collar, plus the resulting positive boundary bound.
struct LowerBoundReport {
  double c0 = 0.0;            // f(0)
  double boundary_min = 0.0;  // min of u next to the boundary over (0, tau]
  double tau_requested = 0.0;
  double tau_effective = 0.0;  // window actually used for the comparison
  bool window_clipped = false;
  double collar_width = 0.0;
  double max_laplacian = 0.0;  // max |lap d_star| over the collar
  std::size_t comparisons = 0;
  int violations = 0;      // collar nodes with w > u + tol in the window
  double worst_gap = 0.0;  // min of u - w over the window
  double tol = 0.0;

  bool pass() const { return violations == 0; }
};

//! Verifies w <= u + tol on the collar {|d_star| <= collar_width} for every
//! snapshot in (0, min(tau, t_w)], where the window end t_w satisfies
//! sqrt(t_w) = delta_shift / (delta2 max|lap d_star|); reports whether tau
//! was clipped to it. Also reports c0 = f(0) and the empirical minimum of u
//! over boundary-adjacent collar nodes across all snapshots up to tau.
//! collar_width <= 0 selects half the smaller one-sided reach of d_star.
//! Fewer than three collar nodes on either side of the boundary throw
//! ResolutionError.
LowerBoundReport lower_bound_c0(const BarrierSolution& bs,
                                const Nonlinearity& nl,
                                const FieldSeries& u_series,
                                const ScalarField& d_star, double tau,
                                double tol = 1e-9, double collar_width = 0.0);

}  // namespace difflab
