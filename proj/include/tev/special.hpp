#ifndef TEV_SPECIAL_HPP
#define TEV_SPECIAL_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include "tev/error.hpp"

namespace tev {

using Complex = std::complex<double>;
inline constexpr Complex I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

/// sin(x)/x, exact limit at 0.
inline Complex sinc(Complex x) {
  if (std::abs(x) < 1e-4) {
    const Complex x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// 1 - sin(x)/x without cancellation near 0.
inline Complex one_minus_sinc(Complex x) {
  if (std::abs(x) < 0.5) {
    const Complex x2 = x * x;
    Complex term = x2 / 6.0;
    Complex sum = term;
    for (int n = 2; n < 12; ++n) {
      term *= -x2 / double((2 * n) * (2 * n + 1));
      sum += term;
    }
    return sum;
  }
  return 1.0 - std::sin(x) / x;
}

/// Exponential integral E1(z) = int_z^inf e^{-t}/t dt, principal branch.
/// Power series for |z| < 2, Lentz continued fraction otherwise.
inline Complex expint_e1(Complex z) {
  constexpr double euler_gamma = 0.57721566490153286061;
  if (z == Complex(0.0)) fail(ErrorCode::BadParams, "special", "E1 is singular at 0");
  if (std::abs(z) < 2.0) {
    Complex sum = 0.0;
    Complex term = 1.0;
    for (int n = 1; n < 200; ++n) {
      term *= -z / double(n);
      const Complex add = term / double(n);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(z) - sum;
  }
  constexpr double tiny = 1e-300;
  Complex b = z + 1.0;
  Complex c = 1.0 / tiny;
  Complex d = 1.0 / b;
  Complex h = d;
  for (int i = 1; i < 20000; ++i) {
    const double an = -double(i) * double(i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const Complex del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h * std::exp(-z);
  }
  fail(ErrorCode::QuadratureFailure, "special", "E1 continued fraction did not converge");
}

}  // namespace tev

#endif  // TEV_SPECIAL_HPP
