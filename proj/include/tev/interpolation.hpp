#ifndef TEV_INTERPOLATION_HPP
#define TEV_INTERPOLATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tev/error.hpp"

namespace tev {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes,
/// as in PCHIP). C1 everywhere, preserves monotonicity of the data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      fail(ErrorCode::BadParams, "interpolation", "monotone cubic needs >= 2 matching knots");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        fail(ErrorCode::BadParams, "interpolation", "knots must be strictly increasing");
    slope_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      slope_[0] = slope_[1] = delta[0];
      return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (delta[k - 1] * delta[k] <= 0.0) {
        slope_[k] = 0.0;
      } else {
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        slope_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
      }
    }
    slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

  /// Derivative order 0, 1 or 2 at x (clamped to the knot range).
  double eval(double x, int order = 0) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double y0 = y_[i], y1 = y_[i + 1];
    const double m0 = slope_[i] * h, m1 = slope_[i + 1] * h;
    switch (order) {
      case 0: {
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
               (t3 - t2) * m1;
      }
      case 1: {
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 +
                (3 * t2 - 2 * t) * m1) /
               h;
      }
      default:
        return ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1) /
               (h * h);
    }
  }

  double operator()(double x) const { return eval(x, 0); }

  std::size_t interval(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

 private:
  static double end_slope(double h0, double h1, double d0, double d1) {
    double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3 * d0)) return 3 * d0;
    return d;
  }

  std::vector<double> x_, y_, slope_;
};

/// Value and first derivative of the Lagrange polynomial through
/// samples[first .. first+count) at nodes x0 + j h, evaluated at z
/// (which may be complex, giving the analytic continuation).
struct LagrangeResult {
  std::complex<double> value;
  std::complex<double> derivative;
};

template <typename T>
LagrangeResult uniform_lagrange(std::span<const T> samples, double x0, double h,
                                   std::complex<double> z, std::size_t first, std::size_t count) {
  using C = std::complex<double>;
  const C s = (z - x0) / h - double(first);
  // Derivative via the logarithmic derivative of the node polynomial is
  // unstable at nodes, so accumulate d/ds of each basis polynomial directly.
  C value = 0.0, deriv = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    C basis = 1.0;
    C dbasis = 0.0;
    double denom = 1.0;
    for (std::size_t m = 0; m < count; ++m) {
      if (m == j) continue;
      denom *= double(j) - double(m);
      dbasis = dbasis * (s - double(m)) + basis;
      basis *= (s - double(m));
    }
    const C fj = C(samples[first + j]);
    value += fj * basis / denom;
    deriv += fj * dbasis / denom;
  }
  return {value, deriv / h};
}

/// Picks a window of `count` consecutive nodes of an n-point uniform grid
/// centred on the real part of z.
inline std::size_t lagrange_window(std::size_t n, double x0, double h, double re_z, std::size_t count) {
  const double pos = (re_z - x0) / h;
  long first = static_cast<long>(std::floor(pos)) - static_cast<long>(count / 2) + 1;
  first = std::clamp(first, 0L, static_cast<long>(n) - static_cast<long>(count));
  return static_cast<std::size_t>(first);
}

}  // namespace tev

#endif  // TEV_INTERPOLATION_HPP
