#pragma once

// Reference computations for the tests, independent of the library's own
// numerics (the library integrates with adaptive Simpson; here Romberg).

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double romberg(const std::function<double(double)>& f, double a,
                      double b, double tol = 1e-13) {
  constexpr int kMax = 22;
  static thread_local double table[kMax][kMax];
  double h = b - a;
  table[0][0] = 0.5 * h * (f(a) + f(b));
  for (int i = 1; i < kMax; ++i) {
    h *= 0.5;
    double sum = 0.0;
    const long n = 1L << i;
    for (long k = 1; k < n; k += 2) sum += f(a + static_cast<double>(k) * h);
    table[i][0] = 0.5 * table[i - 1][0] + h * sum;
    double p = 4.0;
    for (int j = 1; j <= i; ++j) {
      table[i][j] = (p * table[i][j - 1] - table[i - 1][j - 1]) / (p - 1.0);
      p *= 4.0;
    }
    if (i > 4 && std::abs(table[i][i] - table[i - 1][i - 1]) < tol)
      return table[i][i];
  }
  throw std::runtime_error("romberg: no convergence");
}

inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol = 1e-13) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::runtime_error("bisect: no sign change over the bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

//! log(erfc(x)), stable where erfc itself underflows. For large x uses
//! erfc(x) = exp(-x^2)/(x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - ...).
inline double log_erfc(double x) {
  if (x < 20.0) return std::log(std::erfc(x));
  const double ix2 = 1.0 / (x * x);
  double term = 1.0, series = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2.0 * k - 1.0) * 0.5 * ix2;
    series += term;
  }
  return -x * x - std::log(x * std::sqrt(M_PI)) + std::log(series);
}

struct Circle {
  double cx, cy, r;
};

//! Distance from (x, y) to the nearest of the densely sampled circles.
inline double sampled_circle_distance(const std::vector<Circle>& circles,
                                      double x, double y, int n = 100000) {
  double best = std::numeric_limits<double>::infinity();
  for (const Circle& c : circles) {
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * M_PI * k / n;
      best = std::min(best, std::hypot(x - (c.cx + c.r * std::cos(th)),
                                       y - (c.cy + c.r * std::sin(th))));
    }
  }
  return best;
}

}  // namespace oracle
