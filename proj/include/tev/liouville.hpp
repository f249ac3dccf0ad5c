#ifndef TEV_LIOUVILLE_HPP
#define TEV_LIOUVILLE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "tev/error.hpp"
#include "tev/ode.hpp"
#include "tev/profiles.hpp"
#include "tev/quadrature.hpp"

namespace tev {

/// s -> int_0^s density, for a positive density on [0, L], continued with
/// slope 1 beyond L. Cumulative values are stored on a knot grid; queries
/// add a Gauss-Legendre panel, inverses use safeguarded Newton.
class MonotoneIntegralMap {
 public:
  MonotoneIntegralMap(std::function<double(double)> density, double L, std::vector<double> breakpoints = {},
                      std::size_t n_knots = 2048)
      : density_(std::move(density)), L_(L) {
    if (!(L > 0.0)) fail(ErrorCode::BadParams, "liouville", "map length must be positive");
    for (std::size_t i = 0; i <= n_knots; ++i) knots_.push_back(L * double(i) / double(n_knots));
    for (double x : breakpoints)
      if (x > 0.0 && x < L) knots_.push_back(x);
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end(), [L](double a, double b) { return b - a <= 1e-13 * L; }),
                 knots_.end());
    knots_.back() = L;
    cumulative_.assign(knots_.size(), 0.0);
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const double v = gauss_legendre(density_, knots_[i - 1], knots_[i]);
      cumulative_[i] = cumulative_[i - 1] + v;
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!std::isfinite(cumulative_[i]))
        fail(ErrorCode::QuadratureFailure, "liouville", "travel-time integral is not finite");
    }
    for (double x : knots_) {
      const double d = density_(x);
      if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorCode::NonPositive, "liouville", "density must be positive");
    }
  }

  double length() const { return L_; }
  double total() const { return cumulative_.back(); }
  const std::vector<double>& knots() const { return knots_; }

  double density(double s) const { return s >= L_ ? 1.0 : density_(std::max(s, 0.0)); }

  double value(double s) const {
    if (s <= 0.0) return s;
    if (s >= L_) return total() + (s - L_);
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    const std::size_t i = std::size_t(it - knots_.begin()) - 1;
    if (s == knots_[i]) return cumulative_[i];
    return cumulative_[i] + gauss_legendre(density_, knots_[i], s);
  }

  double inverse(double v) const {
    if (v <= 0.0) return v;
    if (v >= total()) return L_ + (v - total());
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), v);
    const std::size_t i = std::size_t(it - cumulative_.begin()) - 1;
    double lo = knots_[i], hi = knots_[i + 1];
    double s = lo + (hi - lo) * (v - cumulative_[i]) / (cumulative_[i + 1] - cumulative_[i]);
    for (int iter = 0; iter < 60; ++iter) {
      const double r = value(s) - v;
      if (r > 0) hi = s; else lo = s;
      double next = s - r / density_(s);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-15 * std::max(1.0, L_)) return next;
      s = next;
    }
    return s;
  }

 private:
  std::function<double(double)> density_;
  double L_;
  std::vector<double> knots_;
  std::vector<double> cumulative_;
};

/// The coordinate change x <-> y between the wave and Schrodinger pictures.
class TravelTimeMap {
 public:
  /// `direct` integrates along x (density sqrt(rho)) when x_to_y, otherwise along y
  /// (density 1/f(y;0)^2).
  TravelTimeMap(std::shared_ptr<const MonotoneIntegralMap> m, bool x_to_y) : map_(std::move(m)), x_to_y_(x_to_y) {}

  double forward(double x) const { return x_to_y_ ? map_->value(x) : map_->inverse(x); }
  double inverse(double y) const { return x_to_y_ ? map_->inverse(y) : map_->value(y); }
  double a() const { return x_to_y_ ? map_->total() : map_->length(); }
  double b() const { return x_to_y_ ? map_->length() : map_->total(); }
  /// dy/dx at x.
  double slope(double x) const {
    return x_to_y_ ? map_->density(x) : 1.0 / map_->density(map_->inverse(x));
  }

 private:
  std::shared_ptr<const MonotoneIntegralMap> map_;
  bool x_to_y_;
};

/// y(x) = int_0^x sqrt(rho), a = y(b).
inline TravelTimeMap travel_time(const RadialProfile& p) {
  auto prof = std::make_shared<RadialProfile>(p);
  auto m = std::make_shared<MonotoneIntegralMap>(
      [prof](double x) { return std::sqrt(prof->eval_left(x).rho); }, p.b(), p.breakpoints());
  return TravelTimeMap(m, true);
}

/// x(y) = int_0^y ds / f(s;0)^2 for y in [0, a]; f must stay positive.
inline TravelTimeMap invert_travel_time(const std::function<double(double)>& f0_zero_energy, double a,
                                        std::vector<double> breakpoints = {}) {
  const int probe = 2048;
  for (int i = 0; i <= probe; ++i) {
    const double y = a * i / probe;
    const double f = f0_zero_energy(y);
    if (!(f > 0.0) || !std::isfinite(f))
      fail(ErrorCode::NonPositiveJost, "liouville", "zero-energy Jost solution is not positive on [0, a]");
  }
  auto m = std::make_shared<MonotoneIntegralMap>(
      [f0_zero_energy](double y) {
        const double f = f0_zero_energy(y);
        return 1.0 / (f * f);
      },
      a, std::move(breakpoints));
  return TravelTimeMap(m, false);
}

/// V(y) = rho''/(4 rho^2) - 5 rho'^2/(16 rho^3) at x = x(y), plus point parts
/// of weight (rho'(x+) - rho'(x-)) / (4 rho^{3/2}) at each derivative jump.
inline Potential to_potential(const RadialProfile& p) {
  auto prof = std::make_shared<RadialProfile>(p);
  auto map = std::make_shared<TravelTimeMap>(travel_time(p));
  const double a = map->a();
  std::vector<PointPart> points;
  std::vector<double> ybreaks;
  for (double x : p.breakpoints()) {
    if (x <= 0.0) continue;
    const RhoValue l = p.eval_left(x), r = p.eval(x);
    const double jump = r.d1 - l.d1;
    const double y = x >= p.b() ? a : map->forward(x);
    if (x < p.b()) ybreaks.push_back(y);
    if (std::abs(jump) > 1e-12 * std::max(1.0, std::abs(l.d1)))
      points.push_back({y, jump / (4.0 * std::pow(r.rho, 1.5))});
  }
  auto smooth = [prof, map](double y) {
    const double x = map->inverse(y);
    const RhoValue v = prof->eval(x);
    return v.d2 / (4.0 * v.rho * v.rho) - 5.0 * v.d1 * v.d1 / (16.0 * v.rho * v.rho * v.rho);
  };
  return Potential(a, smooth, points, ybreaks);
}

/// rho(x)^{1/4} e^{-ik(b-a)} f(x;k). With `check`, also integrates the
/// Schrodinger equation for V = to_potential(p) and raises CrossCheckFailed
/// on disagreement beyond 1e-8.
inline Complex transform_jost(const RadialProfile& p, Complex k, double x, bool check = false) {
  const auto map = travel_time(p);
  const double a = map.a(), b = p.b();
  const Complex v = std::pow(p.rho(x), 0.25) * std::exp(-I * k * (b - a)) * solve_jost_wave(p, k, x).value;
  if (check) {
    const Potential V = to_potential(p);
    const Complex w = solve_jost_schrodinger(V, k, map.forward(x)).value;
    if (std::abs(v - w) > 1e-8 * std::max(1.0, std::abs(w)))
      fail(ErrorCode::CrossCheckFailed, "liouville", "Liouville transform of f disagrees with direct solve");
  }
  return v;
}

/// Residual of g'' - V g = 0 for g(y) = rho(x(y))^{1/4} using an eighth-order
/// central stencil of spacing h; the stencil must stay inside one smooth piece.
inline double zero_energy_residual(const RadialProfile& p, const TravelTimeMap& map, const Potential& V, double y,
                                   double h) {
  static constexpr double c[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  auto g = [&](double s) { return std::pow(p.rho(map.inverse(s)), 0.25); };
  double d2 = c[0] * g(y);
  for (int j = 1; j <= 4; ++j) d2 += c[j] * (g(y + j * h) + g(y - j * h));
  d2 /= h * h;
  return d2 - V.smooth(y) * g(y);
}

}  // namespace tev

#endif  // TEV_LIOUVILLE_HPP
