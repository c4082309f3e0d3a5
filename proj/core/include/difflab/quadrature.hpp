#pragma once

#include <cmath>
#include <limits>

#include "difflab/errors.hpp"

namespace difflab {

namespace detail {

template <class F>
double simpson(const F& f, double a, double fa, double b, double fb, double m,
               double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Classic adaptive Simpson with Richardson correction. tol is an absolute
// error target for the current interval; it is split between halves.
template <class F>
double adaptive_simpson_rec(const F& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole,
                            double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw NumericError("adaptive quadrature: recursion depth exhausted");
  }
  // Roundoff floor: once the Richardson increment is at the level of the
  // rounding noise in the panel sums, refining cannot reduce it further.
  const double fscale = std::abs(fa) + std::abs(flm) + std::abs(fm) +
                        std::abs(frm) + std::abs(fb);
  const double noise =
      std::numeric_limits<double>::epsilon() * (b - a) * fscale;
  if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= noise) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                              depth - 1);
}

}  // namespace detail

//! Integrate f over [a, b] to absolute tolerance tol by adaptive interval
//! bisection of Simpson's rule. a > b is allowed and flips the sign.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol,
                        int max_depth = 52) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  if (!(tol > 0.0)) throw DomainError("adaptive quadrature: tol must be > 0");
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
  return sign * detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole,
                                             tol, max_depth);
}

}  // namespace difflab
