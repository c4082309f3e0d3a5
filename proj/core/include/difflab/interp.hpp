#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "difflab/errors.hpp"

namespace difflab {

//! Piecewise cubic Hermite interpolant on strictly increasing nodes.
//! Evaluation outside the node range clamps to the end values.
class CubicHermite {
 public:
  CubicHermite() = default;

  //! Build with caller-supplied exact slopes.
  static CubicHermite with_slopes(std::vector<double> x, std::vector<double> y,
                                  std::vector<double> dydx);

  //! Build with slopes estimated by weighted central differences.
  static CubicHermite from_samples(std::vector<double> x,
                                   std::vector<double> y);

  //! Build with Fritsch-Carlson limited slopes; the interpolant preserves
  //! monotonicity of the data on every interval.
  static CubicHermite monotone(std::vector<double> x, std::vector<double> y);

  double eval(double xq) const;
  double derivative(double xq) const;

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  void validate() const;
  std::size_t interval(double xq) const;

  std::vector<double> x_, y_, d_;
};

inline void CubicHermite::validate() const {
  if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != d_.size()) {
    throw ShapeError("cubic interpolant: need >= 2 nodes with matching arrays");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw DomainError("cubic interpolant: nodes must be strictly increasing");
    }
  }
}

inline CubicHermite CubicHermite::with_slopes(std::vector<double> x,
                                              std::vector<double> y,
                                              std::vector<double> dydx) {
  CubicHermite c;
  c.x_ = std::move(x);
  c.y_ = std::move(y);
  c.d_ = std::move(dydx);
  c.validate();
  return c;
}

inline CubicHermite CubicHermite::from_samples(std::vector<double> x,
                                               std::vector<double> y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0) {
        d[i] = (y[1] - y[0]) / (x[1] - x[0]);
      } else if (i + 1 == n) {
        d[i] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
      } else {
        // Slope of the quadratic through the three surrounding samples.
        const double hl = x[i] - x[i - 1];
        const double hr = x[i + 1] - x[i];
        const double sl = (y[i] - y[i - 1]) / hl;
        const double sr = (y[i + 1] - y[i]) / hr;
        d[i] = (hr * sl + hl * sr) / (hl + hr);
      }
    }
  }
  return with_slopes(std::move(x), std::move(y), std::move(d));
}

inline CubicHermite CubicHermite::monotone(std::vector<double> x,
                                           std::vector<double> y) {
  const std::size_t n = x.size();
  if (n < 2) throw ShapeError("cubic interpolant: need >= 2 nodes");
  std::vector<double> sec(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sec[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  }
  d[0] = sec[0];
  d[n - 1] = sec[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (sec[i - 1] * sec[i] > 0.0) ? 0.5 * (sec[i - 1] + sec[i]) : 0.0;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (sec[i] == 0.0) {
      d[i] = d[i + 1] = 0.0;
      continue;
    }
    const double a = d[i] / sec[i];
    const double b = d[i + 1] / sec[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      d[i] = t * a * sec[i];
      d[i + 1] = t * b * sec[i];
    }
  }
  return with_slopes(std::move(x), std::move(y), std::move(d));
}

inline std::size_t CubicHermite::interval(double xq) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  if (it == x_.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

inline double CubicHermite::eval(double xq) const {
  if (xq <= x_.front()) return y_.front();
  if (xq >= x_.back()) return y_.back();
  const std::size_t i = interval(xq);
  const double h = x_[i + 1] - x_[i];
  const double t = (xq - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

inline double CubicHermite::derivative(double xq) const {
  if (xq <= x_.front()) return d_.front();
  if (xq >= x_.back()) return d_.back();
  const std::size_t i = interval(xq);
  const double h = x_[i + 1] - x_[i];
  const double t = (xq - x_[i]) / h;
  const double t2 = t * t;
  const double g00 = (6 * t2 - 6 * t) / h;
  const double g10 = 3 * t2 - 4 * t + 1;
  const double g01 = (-6 * t2 + 6 * t) / h;
  const double g11 = 3 * t2 - 2 * t;
  return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

//! Uniform-grid Catmull-Rom weight for one axis. t in [0, 1] between the two
//! middle samples of a 4-point stencil.
inline void catmull_rom_weights(double t, double w[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

}  // namespace difflab
