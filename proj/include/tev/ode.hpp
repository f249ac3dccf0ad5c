#ifndef TEV_ODE_HPP
#define TEV_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "tev/error.hpp"
#include "tev/profiles.hpp"
#include "tev/special.hpp"

namespace tev {

struct IntegratorConfig {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  int max_step_per_period = 20;
  long max_steps = 5'000'000;
};

enum class Equation { Wave, Schrodinger };

/// A solution value and its derivative at one point. For Schrodinger problems
/// with point parts, samples are right limits (the jump at y0 is included).
struct SolutionSample {
  Complex value;
  Complex derivative;
  Complex k;
  double x_or_y = 0.0;
  Equation equation = Equation::Wave;
};

/// Sample plus the k-derivatives of value and derivative.
struct SolutionWithDk {
  SolutionSample sample;
  Complex value_dk;
  Complex derivative_dk;
};

namespace detail {

/// u'' = -(k^2 w(x) - v(x)) u on an interval, with point interactions
/// u'(p+) - u'(p-) = c u(p).
struct LinearProblem {
  Complex k;
  std::function<double(double)> w;  // coefficient of k^2 (rho, or 1)
  std::function<double(double)> v;  // potential part (0 for the wave equation)
  std::vector<double> nodes;        // forced step boundaries
  std::vector<PointPart> jumps;
  struct ConstantPiece {
    double lo, hi, w, v;
  };
  std::vector<ConstantPiece> constant_pieces;  // intervals with constant w and v
  double sqrt_w_max = 1.0;
  double v_bound = 0.0;
};

// The embedded RKF7(8) error estimate is unreliable for nearly quadrature-like
// systems (small |k|), so steps are also capped at a fraction of the span.
inline double step_cap(const LinearProblem& lp, const IntegratorConfig& cfg, double span) {
  const double freq = std::abs(lp.k) * lp.sqrt_w_max + std::sqrt(lp.v_bound);
  const double cap = span / 16.0;
  if (freq <= 0.0) return cap;
  return std::min(cap, 2.0 * pi / freq / cfg.max_step_per_period);
}

template <std::size_t N>
struct System {
  const LinearProblem* lp;
  // Coefficients are sampled strictly inside the current smooth interval so
  // that values at its end nodes are the one-sided limits.
  double lo = -1e300, hi = 1e300, margin = 0.0;
  void operator()(const std::array<double, N>& s, std::array<double, N>& ds, double x_in) const {
    const double x = std::clamp(x_in, lo + margin, hi - margin);
    const double w = lp->w(x);
    const double v = lp->v ? lp->v(x) : 0.0;
    const Complex q = lp->k * lp->k * w - v;
    const Complex u(s[0], s[1]), up(s[2], s[3]);
    const Complex upp = -q * u;
    ds[0] = up.real();
    ds[1] = up.imag();
    ds[2] = upp.real();
    ds[3] = upp.imag();
    if constexpr (N == 8) {
      const Complex p(s[4], s[5]), pp(s[6], s[7]);
      const Complex ppp = -q * p - 2.0 * lp->k * w * u;
      ds[4] = pp.real();
      ds[5] = pp.imag();
      ds[6] = ppp.real();
      ds[7] = ppp.imag();
    }
  }
};

template <std::size_t N>
void apply_jump(std::array<double, N>& s, double c, double direction) {
  // Crossing forward adds c u to u'; crossing backward removes it.
  const Complex u(s[0], s[1]);
  const Complex du = direction * c * u;
  s[2] += du.real();
  s[3] += du.imag();
  if constexpr (N == 8) {
    const Complex p(s[4], s[5]);
    const Complex dp = direction * c * p;
    s[6] += dp.real();
    s[7] += dp.imag();
  }
}

/// Exact propagation across an interval of constant coefficients.
template <std::size_t N>
void constant_transfer(const LinearProblem& lp, double w, double v, std::array<double, N>& st, double h) {
  const Complex q = lp.k * lp.k * w - v;
  const Complex sq = std::sqrt(q);
  const Complex z = sq * h;
  const Complex C = std::cos(z);
  const Complex Sh = h * sinc(z);  // sin(sq h)/sq
  const Complex u0(st[0], st[1]), du0(st[2], st[3]);
  const Complex u1 = C * u0 + Sh * du0;
  const Complex du1 = -q * Sh * u0 + C * du0;
  if constexpr (N == 8) {
    // q-derivatives of the transfer entries.
    const Complex dC = -0.5 * h * Sh;
    Complex dSh;
    if (std::abs(z) < 1e-2)
      dSh = -h * h * h / 6.0 + q * h * h * h * h * h / 60.0 - q * q * std::pow(h, 7) / 2520.0;
    else
      dSh = (h * sq * std::cos(z) - std::sin(z)) / (2.0 * sq * sq * sq);
    const Complex dmqSh = -Sh - q * dSh;
    const Complex dq = 2.0 * lp.k * w;
    const Complex p0(st[4], st[5]), dp0(st[6], st[7]);
    const Complex p1 = C * p0 + Sh * dp0 + dq * (dC * u0 + dSh * du0);
    const Complex dp1 = -q * Sh * p0 + C * dp0 + dq * (dmqSh * u0 + dC * du0);
    st[4] = p1.real();
    st[5] = p1.imag();
    st[6] = dp1.real();
    st[7] = dp1.imag();
  }
  st[0] = u1.real();
  st[1] = u1.imag();
  st[2] = du1.real();
  st[3] = du1.imag();
}

template <std::size_t N>
void integrate_smooth(const LinearProblem& lp, const IntegratorConfig& cfg, std::array<double, N>& s,
                      double t0, double t1, long& steps) {
  namespace odeint = boost::numeric::odeint;
  if (t0 == t1) return;
  for (const auto& c : lp.constant_pieces) {
    if (std::min(t0, t1) >= c.lo && std::max(t0, t1) <= c.hi) {
      // Split long constant stretches so cos/sin arguments stay moderate.
      const int pieces = std::max(1, int(std::ceil(std::abs(t1 - t0) * std::abs(lp.k) * std::sqrt(c.w) / 50.0)));
      for (int i = 0; i < pieces; ++i) constant_transfer(lp, c.w, c.v, s, (t1 - t0) / pieces);
      return;
    }
  }
  using State = std::array<double, N>;
  auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_fehlberg78<State>());
  const double span = std::abs(t1 - t0);
  System<N> sys{&lp, std::min(t0, t1), std::max(t0, t1),
                std::min(1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)}), 0.25 * span)};
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double hmax = step_cap(lp, cfg, span);
  const double hmin = 1e-15 * std::max(1.0, std::max(std::abs(t0), std::abs(t1)));
  double t = t0;
  double dt = dir * hmax;
  while (dir * (t1 - t) > 0.0) {
    if (std::abs(dt) > hmax) dt = dir * hmax;
    bool last = false;
    if (dir * (t + dt - t1) >= 0.0) {
      dt = t1 - t;
      last = true;
    }
    const double before = t;
    const auto res = stepper.try_step(sys, s, t, dt);
    if (res == odeint::success) {
      if (last) t = t1;
      if (++steps > cfg.max_steps) fail(ErrorCode::StepFailure, "ode-engine", "step budget exhausted");
    } else {
      if (std::abs(dt) < hmin || t != before)
        fail(ErrorCode::StepFailure, "ode-engine", "adaptive step size underflow");
    }
  }
  for (double v : s)
    if (!std::isfinite(v)) fail(ErrorCode::StepFailure, "ode-engine", "solution overflowed");
}

/// Propagates s from `start` through each target (in order of travel),
/// recording the state at each. Jumps at the start point are applied first
/// when travelling backwards (start values are right limits); jumps at a
/// target reached forwards are applied before recording.
template <std::size_t N>
std::vector<std::array<double, N>> propagate(const LinearProblem& lp, const IntegratorConfig& cfg,
                                             std::array<double, N> s, double start,
                                             const std::vector<double>& targets) {
  std::vector<std::array<double, N>> out;
  out.reserve(targets.size());
  long steps = 0;
  double t = start;
  for (double target : targets) {
    const double dir = target >= t ? 1.0 : -1.0;
    std::vector<double> stops;
    for (double x : lp.nodes)
      if (dir * (x - t) > 0.0 && dir * (target - x) > 0.0) stops.push_back(x);
    for (const auto& j : lp.jumps)
      if (dir * (j.y - t) > 0.0 && dir * (target - j.y) > 0.0) stops.push_back(j.y);
    std::sort(stops.begin(), stops.end());
    if (dir < 0) std::reverse(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    auto jump_at = [&](double x, double direction) {
      for (const auto& j : lp.jumps)
        if (j.y == x) apply_jump(s, j.weight, direction);
    };
    if (dir < 0 && target < t) jump_at(t, -1.0);
    for (double x : stops) {
      integrate_smooth(lp, cfg, s, t, x, steps);
      t = x;
      jump_at(x, dir);
    }
    integrate_smooth(lp, cfg, s, t, target, steps);
    if (dir > 0 && target > t) jump_at(target, 1.0);
    t = target;
    out.push_back(s);
  }
  return out;
}

inline LinearProblem wave_problem(const RadialProfile& p, Complex k) {
  LinearProblem lp;
  lp.k = k;
  lp.w = [&p](double x) { return p.rho(x); };
  lp.nodes = p.breakpoints();
  lp.sqrt_w_max = p.max_sqrt_rho();
  for (const auto& seg : p.segments())
    if (const auto* c = std::get_if<ConstantShape>(&seg.spec.shape))
      lp.constant_pieces.push_back({seg.spec.x_lo, seg.spec.x_hi, c->value, 0.0});
  return lp;
}

inline LinearProblem schrodinger_problem(const Potential& V, Complex k) {
  LinearProblem lp;
  lp.k = k;
  lp.w = [](double) { return 1.0; };
  lp.v = [&V](double y) { return V.smooth(y); };
  lp.nodes = V.breakpoints();
  lp.nodes.push_back(V.a());
  lp.jumps = V.point_parts();
  lp.v_bound = V.bound();
  if (V.segments())
    for (const auto& seg : *V.segments())
      if (const double* c = std::get_if<double>(&seg.shape)) lp.constant_pieces.push_back({seg.y_lo, seg.y_hi, 1.0, *c});
  return lp;
}

template <std::size_t N>
std::array<double, N> initial_state(Complex u, Complex up) {
  std::array<double, N> s{};
  s[0] = u.real();
  s[1] = u.imag();
  s[2] = up.real();
  s[3] = up.imag();
  return s;
}

template <std::size_t N>
SolutionSample to_sample(const std::array<double, N>& s, Complex k, double x, Equation eq) {
  return {Complex(s[0], s[1]), Complex(s[2], s[3]), k, x, eq};
}

inline void check_range(double x, double hi, const char* what) {
  if (!(x >= 0.0) || x > hi * (1 + 1e-14))
    fail(ErrorCode::BadParams, "ode-engine", std::string(what) + " evaluation point out of range");
}

}  // namespace detail

/// phi'' + k^2 rho phi = 0, phi(0) = 0, phi'(0) = 1, sampled at each x in xs (sorted).
inline std::vector<SolutionSample> solve_regular_path(const RadialProfile& p, Complex k,
                                                      const std::vector<double>& xs,
                                                      const IntegratorConfig& cfg = {}) {
  for (double x : xs) detail::check_range(x, p.b(), "regular");
  const auto lp = detail::wave_problem(p, k);
  const auto states = detail::propagate<4>(lp, cfg, detail::initial_state<4>(0.0, 1.0), 0.0, xs);
  std::vector<SolutionSample> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(detail::to_sample(states[i], k, xs[i], Equation::Wave));
  return out;
}

inline SolutionSample solve_regular(const RadialProfile& p, Complex k, double x_eval,
                                    const IntegratorConfig& cfg = {}) {
  return solve_regular_path(p, k, {x_eval}, cfg).front();
}

/// Regular solution at x_eval together with its k-derivative (variational equation).
inline SolutionWithDk solve_regular_dk(const RadialProfile& p, Complex k, double x_eval,
                                       const IntegratorConfig& cfg = {}) {
  detail::check_range(x_eval, p.b(), "regular");
  const auto lp = detail::wave_problem(p, k);
  const auto s = detail::propagate<8>(lp, cfg, detail::initial_state<8>(0.0, 1.0), 0.0, {x_eval}).front();
  return {detail::to_sample(s, k, x_eval, Equation::Wave), Complex(s[4], s[5]), Complex(s[6], s[7])};
}

/// Jost solution of the wave equation: f = e^{ikx} for x >= b, integrated backwards.
inline std::vector<SolutionSample> solve_jost_wave_path(const RadialProfile& p, Complex k,
                                                        std::vector<double> xs,
                                                        const IntegratorConfig& cfg = {}) {
  std::vector<SolutionSample> out(xs.size());
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 0.0)) fail(ErrorCode::BadParams, "ode-engine", "jost evaluation point must be >= 0");
    if (xs[i] >= p.b()) {
      const Complex e = std::exp(I * k * xs[i]);
      out[i] = {e, I * k * e, k, xs[i], Equation::Wave};
    } else {
      inside.push_back(i);
    }
  }
  std::sort(inside.begin(), inside.end(), [&](auto l, auto r) { return xs[l] > xs[r]; });
  std::vector<double> targets;
  for (auto i : inside) targets.push_back(xs[i]);
  const auto lp = detail::wave_problem(p, k);
  const Complex eb = std::exp(I * k * p.b());
  const auto states = detail::propagate<4>(lp, cfg, detail::initial_state<4>(eb, I * k * eb), p.b(), targets);
  for (std::size_t j = 0; j < inside.size(); ++j)
    out[inside[j]] = detail::to_sample(states[j], k, targets[j], Equation::Wave);
  return out;
}

inline SolutionSample solve_jost_wave(const RadialProfile& p, Complex k, double x_eval,
                                      const IntegratorConfig& cfg = {}) {
  return solve_jost_wave_path(p, k, {x_eval}, cfg).front();
}

/// Regular solution of -u'' + V u = k^2 u, u(0) = 0, u'(0) = 1. Samples are right limits.
inline std::vector<SolutionSample> solve_regular_schrodinger_path(const Potential& V, Complex k,
                                                                  const std::vector<double>& ys,
                                                                  const IntegratorConfig& cfg = {}) {
  for (double y : ys) detail::check_range(y, V.a(), "regular");
  const auto lp = detail::schrodinger_problem(V, k);
  const auto states = detail::propagate<4>(lp, cfg, detail::initial_state<4>(0.0, 1.0), 0.0, ys);
  std::vector<SolutionSample> out;
  for (std::size_t i = 0; i < ys.size(); ++i)
    out.push_back(detail::to_sample(states[i], k, ys[i], Equation::Schrodinger));
  return out;
}

inline SolutionSample solve_regular_schrodinger(const Potential& V, Complex k, double y_eval,
                                                const IntegratorConfig& cfg = {}) {
  return solve_regular_schrodinger_path(V, k, {y_eval}, cfg).front();
}

inline SolutionWithDk solve_regular_schrodinger_dk(const Potential& V, Complex k, double y_eval,
                                                   const IntegratorConfig& cfg = {}) {
  detail::check_range(y_eval, V.a(), "regular");
  const auto lp = detail::schrodinger_problem(V, k);
  const auto s = detail::propagate<8>(lp, cfg, detail::initial_state<8>(0.0, 1.0), 0.0, {y_eval}).front();
  return {detail::to_sample(s, k, y_eval, Equation::Schrodinger), Complex(s[4], s[5]), Complex(s[6], s[7])};
}

/// Jost solution of the Schrodinger equation: e^{iky} for y > a, integrated backwards.
inline std::vector<SolutionSample> solve_jost_schrodinger_path(const Potential& V, Complex k,
                                                               std::vector<double> ys,
                                                               const IntegratorConfig& cfg = {}) {
  std::vector<SolutionSample> out(ys.size());
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!(ys[i] >= 0.0)) fail(ErrorCode::BadParams, "ode-engine", "jost evaluation point must be >= 0");
    if (ys[i] >= V.a()) {
      const Complex e = std::exp(I * k * ys[i]);
      out[i] = {e, I * k * e, k, ys[i], Equation::Schrodinger};
    } else {
      inside.push_back(i);
    }
  }
  std::sort(inside.begin(), inside.end(), [&](auto l, auto r) { return ys[l] > ys[r]; });
  std::vector<double> targets;
  for (auto i : inside) targets.push_back(ys[i]);
  const auto lp = detail::schrodinger_problem(V, k);
  const Complex ea = std::exp(I * k * V.a());
  const auto states = detail::propagate<4>(lp, cfg, detail::initial_state<4>(ea, I * k * ea), V.a(), targets);
  for (std::size_t j = 0; j < inside.size(); ++j)
    out[inside[j]] = detail::to_sample(states[j], k, targets[j], Equation::Schrodinger);
  return out;
}

inline SolutionSample solve_jost_schrodinger(const Potential& V, Complex k, double y_eval,
                                             const IntegratorConfig& cfg = {}) {
  return solve_jost_schrodinger_path(V, k, {y_eval}, cfg).front();
}

/// [g; h] = g h' - g' h.
inline Complex wronskian(const SolutionSample& s1, const SolutionSample& s2) {
  const double tol = 1e-14 * std::max(1.0, std::abs(s1.x_or_y));
  if (std::abs(s1.x_or_y - s2.x_or_y) > tol || s1.equation != s2.equation)
    fail(ErrorCode::MismatchedPoint, "ode-engine", "wronskian of samples at different points or equations");
  return s1.value * s2.derivative - s1.derivative * s2.value;
}

}  // namespace tev

#endif  // TEV_ODE_HPP
