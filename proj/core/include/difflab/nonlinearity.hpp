#pragma once

#include <functional>
#include <string>
#include <vector>

#include "difflab/errors.hpp"

namespace difflab {

//! Admissible flux for the diffusion u_t = lap(phi(u)): phi(0) = 0 and
//! 0 < delta1 <= phi'(s) <= delta2 for all real s. delta1/delta2 are the
//! declared derivative bounds; validate_bounds() audits them by sampling.
struct Nonlinearity {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  double delta1 = 1.0;
  double delta2 = 1.0;

  //! Optional exact second derivative. When absent, consumers fall back to a
  //! central difference of dphi.
  std::function<double(double)> d2phi;

  //! Optional closed form for the logarithmic transform big_phi below.
  std::function<double(double)> closed_form_big_phi;
};

//! phi(s) = s. Ships with the closed-form transform log(s).
Nonlinearity make_linear();

//! phi(s) = s + amplitude * sin(s); derivative bounds 1 -+ amplitude.
//! Requires 0 <= amplitude < 1.
Nonlinearity make_sin_perturbed(double amplitude = 0.25);

//! phi(s) = s + amplitude * tanh(s); derivative bounds [1, 1 + amplitude].
//! Requires amplitude >= 0.
Nonlinearity make_tanh_blend(double amplitude = 0.2);

//! Lookup by config name: "linear", "sin-perturbed", "tanh-blend".
Nonlinearity nonlinearity_by_name(const std::string& name,
                                  double amplitude = -1.0);

//! Throws ConfigError unless phi(0) == 0 and 0 < delta1 <= delta2.
void validate_invariants(const Nonlinearity& nl);

//! phi''(s): exact when supplied, otherwise a central difference of dphi.
double eval_d2phi(const Nonlinearity& nl, double s);

//! The logarithmic transform big_phi(s) = int_1^s phi'(xi)/xi dxi, s > 0.
//! Uses the closed form when present; otherwise adaptive quadrature with the
//! 1/xi singularity split off analytically for small s, so arguments down to
//! the smallest positive double are fine. Throws DomainError for s <= 0.
double eval_big_phi(const Nonlinearity& nl, double s, double tol = 1e-12);

//! big_phi(s) - phi'(0) * log(s). Bounded as s -> 0+; this is the piece of
//! the transform that survives when the solution is carried in log form.
double big_phi_correction(const Nonlinearity& nl, double s,
                          double tol = 1e-12);

//! Inverse transform: the s > 0 with big_phi(s) = y, found by safeguarded
//! Newton inside the exponential bracket implied by the derivative bounds.
//! Throws NumericError with diagnostics if the bracket fails.
double eval_big_psi(const Nonlinearity& nl, double y, double tol = 1e-10);

struct BoundViolation {
  std::string chain;  // which inequality chain failed
  double s = 0.0;     // sample location
  double lower = 0.0, value = 0.0, upper = 0.0;
};

struct BoundsReport {
  int samples_checked = 0;
  std::vector<BoundViolation> violations;
  bool pass() const { return violations.empty(); }
};

//! Samples the declared derivative bounds and the three comparison chains
//! that follow from them:
//!   delta1*s <= phi(s) <= delta2*s            for s >= 0
//!   delta2*log s <= big_phi(s) <= delta1*log s   for 0 < s <= 1
//!   exp(y/delta1) <= big_psi(y) <= exp(y/delta2) for y <= 0
//! over n points per chain drawn from [lo, hi] intersected with each chain's
//! stated range. Violations report location and the offended chain.
BoundsReport validate_bounds(const Nonlinearity& nl, double lo, double hi,
                             int n);

//! Tabulated transform for bulk evaluation. Strictly increasing values by
//! construction (cumulative quadrature between neighboring nodes); the node
//! at s = 1 carries exactly 0. Interpolation is cubic Hermite with the exact
//! slope phi'(s)/s at the nodes.
class TransformTable {
 public:
  static TransformTable build(const Nonlinearity& nl, double s_min,
                              double s_max, int n, double tol = 1e-12);

  double eval(double s) const;
  double inverse(double y) const;

  double s_min() const { return nodes_.front(); }
  double s_max() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  int interpolation_order() const { return 3; }

 private:
  double eval_panel(std::size_t i, double s) const;

  std::vector<double> nodes_, values_, slopes_;
};

}  // namespace difflab
