#ifndef TEV_QUADRATURE_HPP
#define TEV_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tev/error.hpp"

namespace tev {

/// Adaptive Gauss-Kronrod integral of a real function over [lo, hi], split at
/// every breakpoint inside the interval so kinks never sit inside a panel.
template <typename F>
double integrate(F&& f, double lo, double hi, const std::vector<double>& breakpoints = {},
                 double rel_tol = 1e-11, const std::string& stage = "quadrature") {
  if (hi == lo) return 0.0;
  const double sign = hi > lo ? 1.0 : -1.0;
  if (hi < lo) std::swap(lo, hi);
  std::vector<double> nodes{lo};
  for (double x : breakpoints)
    if (x > lo && x < hi) nodes.push_back(x);
  nodes.push_back(hi);
  std::sort(nodes.begin(), nodes.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i + 1] <= nodes[i]) continue;
    double err = 0.0, l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, nodes[i], nodes[i + 1], 15, rel_tol, &err, &l1);
    // Boost's estimate is conservative (it floors near 1e-7 relative on short
    // panels), so only gross failures are reported.
    if (!std::isfinite(v) || err > std::max(1e-6, 1e3 * rel_tol) * std::max(l1, 1e-300))
      fail(ErrorCode::QuadratureFailure, stage, "adaptive quadrature did not converge");
    total += v;
  }
  return sign * total;
}

/// Fixed 20-point Gauss-Legendre rule; for short smooth panels.
template <typename F>
double gauss_legendre(F&& f, double lo, double hi) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, lo, hi);
}

}  // namespace tev

#endif  // TEV_QUADRATURE_HPP
