#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "difflab/grid.hpp"
#include "difflab/interp.hpp"
#include "difflab/nonlinearity.hpp"
#include "difflab/pde_solver.hpp"

namespace difflab {

//! Bulk evaluator of the logarithmic transform for fields carried in log
//! form: big_phi(exp(L)) = phi'(0) * L + corr(exp(L)), where the bounded
//! correction corr is tabulated against L once and interpolated afterwards.
//! Valid for arbitrarily negative L, far below the underflow limit of
//! exp(L) itself.
class BigPhiEvaluator {
 public:
  explicit BigPhiEvaluator(const Nonlinearity& nl);

  //! big_phi(exp(L)) for any finite L.
  double from_log(double L) const;

  //! big_phi(u) for u > 0; throws DomainError otherwise.
  double from_value(double u) const;

  double dphi_at_zero() const { return dphi0_; }

 private:
  Nonlinearity nl_;
  double dphi0_ = 1.0;
  double corr_floor_ = 0.0;  // correction value kept below the table range
  CubicHermite corr_;        // correction as a function of L = log(u)
};

//! Nodewise -4 t big_phi(u). Nodes masked outside are copied through with
//! value 0. When the snapshot carries log values they are used directly, so
//! no positivity or underflow concerns arise. Otherwise primal values must
//! be positive: values in (0, underflow_threshold] are flagged (masked
//! outside in the result, not evaluated) and negative values throw
//! DomainError.
ScalarField varadhan_field(const ScalarField& u_snapshot, double t,
                           const Nonlinearity& nl,
                           double underflow_threshold = 1e-300);

//! Convergence diagnostics of -4 t big_phi(u) against the squared distance
//! on a compact node set K.
struct VaradhanReport {
  std::vector<double> times;
  std::vector<double> sup_errors;  // per time, sup over K of the deviation
  std::string K_spec;
  std::size_t K_node_count = 0;

  //! Least-squares coefficient of the model error = C * t * log(1/t).
  double convergence_rate_estimate = 0.0;

  //! Two-sided envelope (delta1/delta2) d^2 <= -4 t big_phi(u) <=
  //! (delta2/delta1) d^2, checked at the smallest time with the stated
  //! slack. envelope_worst is the most negative margin observed.
  double envelope_tol = 0.0;
  double envelope_worst = 0.0;
  int envelope_violations = 0;

  //! Nodes of K skipped because the primal value underflowed, worst case
  //! over the examined times. Zero whenever log values are available.
  std::size_t flagged_nodes_worst = 0;

  bool envelope_pass() const { return envelope_violations == 0; }
  bool errors_decreasing() const;
  double final_error() const;
};

//! Evaluates the report over K = {nodes with K_margin <= d <= far cut}.
//! distance must live on the series grid and hold the exact distance to the
//! domain boundary. K_far <= 0 selects the default far cut, half the largest
//! distance present in the field. Throws ConfigError when K is empty.
VaradhanReport convergence_report(const FieldSeries& series,
                                  const Nonlinearity& nl,
                                  const ScalarField& distance, double K_margin,
                                  double K_far = 0.0,
                                  double envelope_tol = 0.05);

//! Rescaled pressure v(x) = -eps * big_phi(u(x, eps * ref_time)). The series
//! is sampled at time eps * ref_time, interpolating linearly between the two
//! bracketing snapshots; snapshots carrying log values interpolate in log
//! form. Requested times outside the snapshot range throw DomainError.
ScalarField pressure_field(const FieldSeries& series, const Nonlinearity& nl,
                           double eps, double ref_time);

//! Pressure fields for a sweep of eps values at shared reference times,
//! plus the per-eps statistics filled in by gradient_monitor.
struct PressureSeries {
  std::vector<double> epsilons;   // strictly decreasing, positive
  std::vector<double> ref_times;  // shared across eps, positive
  std::vector<std::vector<ScalarField>> fields;  // fields[e][j]

  std::vector<double> grad_sup;      // per eps, filled by gradient_monitor
  std::vector<double> holder_const;  // per eps, filled by gradient_monitor
};

PressureSeries build_pressure_series(const FieldSeries& series,
                                     const Nonlinearity& nl,
                                     const std::vector<double>& epsilons,
                                     const std::vector<double>& ref_times);

//! Uniform-boundedness monitor across the eps sweep: per-eps extrema of v,
//! sup of the gradient magnitude, a Hoelder-in-time quotient, and the cutoff
//! diagnostic z = zeta^2 |grad v|^2 - lambda v with
//! lambda = (M^2 + 1) / (2 (c2 + 1)).
struct GradientReport {
  std::vector<double> epsilons;
  std::vector<double> grad_sup;
  std::vector<double> v_min;
  std::vector<double> v_max;
  std::vector<double> holder_quotient;
  std::vector<double> z_max;

  double lambda = 0.0;
  double band_limit = 0.0;

  //! Max over eps divided by min over eps, per monitored quantity.
  double band_factor_grad = 0.0;
  double band_factor_vmax = 0.0;
  double band_factor_holder = 0.0;

  bool uniform_band = false;  // all band factors within band_limit
  bool positive = false;      // v_min > 0 for every eps
  std::string K_spec;
};

//! Evaluates the monitor on K = {nodes with d_lo <= d <= d_hi} and stores
//! grad_sup / holder_const back into ps. Requires at least three epsilons.
GradientReport gradient_monitor(PressureSeries& ps,
                                const ScalarField& distance, double d_lo,
                                double d_hi, double band_limit = 1.5);

}  // namespace difflab
