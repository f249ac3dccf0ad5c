#ifndef TEV_FORWARD_HPP
#define TEV_FORWARD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "tev/error.hpp"
#include "tev/ode.hpp"
#include "tev/parallel.hpp"
#include "tev/profiles.hpp"
#include "tev/special.hpp"

namespace tev {

using ComplexFn = std::function<Complex(Complex)>;

enum class Symmetry { EvenInK, ConjugateSymmetric, None };

/// A complex function sampled on a real grid symmetric about 0.
struct SpectralSamples {
  std::vector<double> k;
  std::vector<Complex> values;
  Symmetry symmetry = Symmetry::None;

  std::size_t size() const { return k.size(); }
  double k_max() const { return k.empty() ? 0.0 : k.back(); }
  /// Uniform spacing, or 0 if the grid is not uniform.
  double spacing() const {
    if (k.size() < 2) return 0.0;
    const double h = (k.back() - k.front()) / double(k.size() - 1);
    for (std::size_t i = 1; i < k.size(); ++i)
      if (std::abs(k[i] - k[i - 1] - h) > 1e-9 * h) return 0.0;
    return h;
  }
};

/// n points (n odd) uniformly on [-K, K].
inline std::vector<double> symmetric_grid(double K, std::size_t n) {
  if (n < 3 || n % 2 == 0 || !(K > 0.0)) fail(ErrorCode::BadParams, "forward", "grid needs odd n >= 3 and K > 0");
  std::vector<double> g(n);
  const std::size_t mid = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (double(i) - double(mid)) / double(mid);
    g[i] = K * t;
  }
  g[mid] = 0.0;
  return g;
}

/// Evaluates fn on the grid in parallel. For symmetric kinds only k >= 0 is
/// evaluated and the other half is filled by the symmetry, which makes the
/// invariant exact.
inline SpectralSamples sample_function(const ComplexFn& fn, const std::vector<double>& grid, Symmetry sym) {
  SpectralSamples s;
  s.k = grid;
  s.symmetry = sym;
  s.values.assign(grid.size(), 0.0);
  const std::size_t n = grid.size();
  if (sym == Symmetry::None) {
    parallel_for(n, [&](std::size_t i) { s.values[i] = fn(grid[i]); });
    return s;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(grid[i] + grid[n - 1 - i]) > 1e-12 * std::max(1.0, std::abs(grid[i])))
      fail(ErrorCode::BadParams, "forward", "grid is not symmetric about 0");
  const std::size_t first = n / 2;
  parallel_for(n - first, [&](std::size_t j) { s.values[first + j] = fn(grid[first + j]); });
  for (std::size_t i = 0; i < first; ++i) {
    const Complex v = s.values[n - 1 - i];
    s.values[i] = sym == Symmetry::EvenInK ? v : std::conj(v);
  }
  return s;
}

namespace detail {

/// d/dk [sin(kb)/k]
inline Complex dsinc_over_k(Complex k, double b) {
  const Complex z = k * b;
  if (std::abs(z) < 1e-3) return -b * b * b * k / 3.0 + b * b * b * b * b * k * k * k / 30.0;
  return (z * std::cos(z) - std::sin(z)) / (k * k);
}

inline Complex combine_D(Complex k, double b, const SolutionSample& s) {
  return sinc(k * b) * b * s.derivative - std::cos(k * b) * s.value;
}

}  // namespace detail

/// D(k) = sin(kb)/k phi'(b;k) - cos(kb) phi(b;k).
inline Complex dispersion_D(const RadialProfile& p, Complex k, const IntegratorConfig& cfg = {}) {
  return detail::combine_D(k, p.b(), solve_regular(p, k, p.b(), cfg));
}

/// D(k) and dD/dk from the variational equation.
inline std::pair<Complex, Complex> dispersion_D_dk(const RadialProfile& p, Complex k,
                                                   const IntegratorConfig& cfg = {}) {
  const double b = p.b();
  const auto r = solve_regular_dk(p, k, b, cfg);
  const Complex D = detail::combine_D(k, b, r.sample);
  const Complex dD = detail::dsinc_over_k(k, b) * r.sample.derivative + sinc(k * b) * b * r.derivative_dk +
                     b * std::sin(k * b) * r.sample.value - std::cos(k * b) * r.value_dk;
  return {D, dD};
}

/// (f(0;k) - f(0;-k)) / (2ik), the Jost-function route to D.
inline Complex dispersion_D_via_jost(const RadialProfile& p, Complex k, const IntegratorConfig& cfg = {}) {
  if (k == Complex(0.0)) fail(ErrorCode::BadParams, "forward", "jost route to D undefined at k = 0");
  const Complex fp = solve_jost_wave(p, k, 0.0, cfg).value;
  const Complex fm = solve_jost_wave(p, -k, 0.0, cfg).value;
  return (fp - fm) / (2.0 * I * k);
}

/// Evaluates D by both routes and raises CrossCheckFailed if they disagree.
inline Complex dispersion_D_checked(const RadialProfile& p, Complex k, double tol = 1e-9,
                                    const IntegratorConfig& cfg = {}) {
  const Complex d = dispersion_D(p, k, cfg);
  if (std::abs(k) < 1e-3) return d;
  const Complex dj = dispersion_D_via_jost(p, k, cfg);
  if (std::abs(d - dj) > tol * (1.0 + std::abs(d)))
    fail(ErrorCode::CrossCheckFailed, "forward", "regular and Jost routes to D disagree");
  return d;
}

/// Schrodinger analogue with support bound a.
inline Complex dispersion_D_schrodinger(const Potential& V, Complex k, const IntegratorConfig& cfg = {}) {
  return detail::combine_D(k, V.a(), solve_regular_schrodinger(V, k, V.a(), cfg));
}

inline std::pair<Complex, Complex> dispersion_D_schrodinger_dk(const Potential& V, Complex k,
                                                               const IntegratorConfig& cfg = {}) {
  const double a = V.a();
  const auto r = solve_regular_schrodinger_dk(V, k, a, cfg);
  const Complex D = detail::combine_D(k, a, r.sample);
  const Complex dD = detail::dsinc_over_k(k, a) * r.sample.derivative + sinc(k * a) * a * r.derivative_dk +
                     a * std::sin(k * a) * r.sample.value - std::cos(k * a) * r.value_dk;
  return {D, dD};
}

inline Complex dispersion_D_schrodinger_via_jost(const Potential& V, Complex k, const IntegratorConfig& cfg = {}) {
  if (k == Complex(0.0)) fail(ErrorCode::BadParams, "forward", "jost route to D undefined at k = 0");
  const Complex fp = solve_jost_schrodinger(V, k, 0.0, cfg).value;
  const Complex fm = solve_jost_schrodinger(V, -k, 0.0, cfg).value;
  return (fp - fm) / (2.0 * I * k);
}

inline Complex dispersion_D_schrodinger_checked(const Potential& V, Complex k, double tol = 1e-9,
                                                const IntegratorConfig& cfg = {}) {
  const Complex d = dispersion_D_schrodinger(V, k, cfg);
  if (std::abs(k) < 1e-3) return d;
  const Complex dj = dispersion_D_schrodinger_via_jost(V, k, cfg);
  if (std::abs(d - dj) > tol * (1.0 + std::abs(d)))
    fail(ErrorCode::CrossCheckFailed, "forward", "regular and Jost routes to D disagree");
  return d;
}

// ---------------------------------------------------------------------------
// Zeros

struct SearchWindow {
  double k_max = 40.0;
  double im_band = 20.0;
};

struct Eigenvalue {
  Complex k;
  int multiplicity = 1;
};

struct EigenvalueSet {
  int d = 0;
  std::vector<Eigenvalue> zeros;  // closed under k -> -k and k -> conj(k)
  double gamma = 0.0;
  SearchWindow window;

  /// One zero per +-k pair (Re k > 0, or Re k = 0 and Im k > 0), sorted by |k|.
  std::vector<Eigenvalue> representatives() const {
    std::vector<Eigenvalue> out;
    for (const auto& z : zeros)
      if (z.k.real() > 0.0 || (z.k.real() == 0.0 && z.k.imag() > 0.0)) out.push_back(z);
    std::sort(out.begin(), out.end(), [](const Eigenvalue& l, const Eigenvalue& r) {
      if (std::abs(l.k) != std::abs(r.k)) return std::abs(l.k) < std::abs(r.k);
      return l.k.imag() > r.k.imag();
    });
    return out;
  }
};

struct ZeroSearchOptions {
  double newton_tol = 1e-13;
  double min_cell = 1e-6;
  double real_part_floor = 1e-2;  // left edge of the search rectangle, in units of 1/k_max scale
  int imag_axis_intervals = 400;
  int max_depth = 40;
  double max_segment = 0.05;  // longest contour piece without a sample; ~0.05/b
};

namespace detail {

/// Argument-principle machinery over a memoised analytic function.
class ZeroFinder {
 public:
  ZeroFinder(ComplexFn D, std::optional<ComplexFn> dD, ZeroSearchOptions opt)
      : D_(std::move(D)), dD_(std::move(dD)), opt_(opt) {}

  Complex eval(Complex z) {
    const auto key = std::make_pair(z.real(), z.imag());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const Complex v = D_(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorCode::StepFailure, "forward", "dispersion function not finite on contour");
    memo_.emplace(key, v);
    return v;
  }

  Complex derivative(Complex z) {
    if (dD_) return (*dD_)(z);
    const double h = 1e-3 * std::max(1.0, std::abs(z)) * scale_;
    Complex s = 0.0;
    const Complex rot[4] = {1.0, I, -1.0, -I};
    for (int j = 0; j < 4; ++j) s += D_(z + h * rot[j]) / rot[j];
    return s / (4.0 * h);
  }

  void set_scale(double s) { scale_ = s; }

  /// Accumulated argument change of D along the segment z0 -> z1.
  double phase_change(Complex z0, Complex z1, Complex f0, Complex f1, int depth) {
    const double tiny = 1e-300;
    if (std::abs(f0) <= tiny || std::abs(f1) <= tiny)
      fail(ErrorCode::ContourThroughZero, "forward", "contour passes through a zero");
    const double d = std::arg(f1 / f0);
    if (std::abs(d) <= pi / 4.0 && std::abs(z1 - z0) <= opt_.max_segment) return d;
    if (depth >= opt_.max_depth)
      fail(ErrorCode::ContourThroughZero, "forward", "could not resolve phase along contour (zero on contour?)");
    const Complex zm = 0.5 * (z0 + z1);
    const Complex fm = eval(zm);
    return phase_change(z0, zm, f0, fm, depth + 1) + phase_change(zm, z1, fm, f1, depth + 1);
  }

  int winding_polygon(const std::vector<Complex>& pts) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Complex z0 = pts[i], z1 = pts[(i + 1) % pts.size()];
      total += phase_change(z0, z1, eval(z0), eval(z1), 0);
    }
    const double w = total / (2.0 * pi);
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-3) fail(ErrorCode::NonIntegerWinding, "forward", "winding number not an integer");
    return int(r);
  }

  int winding_rect(double x0, double x1, double y0, double y1) {
    // Edges are pre-split into a few pieces so shared edges reuse samples.
    std::vector<Complex> pts;
    const int n = 4;
    for (int i = 0; i < n; ++i) pts.emplace_back(x0 + (x1 - x0) * i / n, y0);
    for (int i = 0; i < n; ++i) pts.emplace_back(x1, y0 + (y1 - y0) * i / n);
    for (int i = 0; i < n; ++i) pts.emplace_back(x1 - (x1 - x0) * i / n, y1);
    for (int i = 0; i < n; ++i) pts.emplace_back(x0, y1 - (y1 - y0) * i / n);
    return winding_polygon(pts);
  }

  int winding_circle(Complex c, double r, int n = 16) {
    std::vector<Complex> pts;
    for (int i = 0; i < n; ++i) pts.push_back(c + r * std::exp(I * (2.0 * pi * i / n)));
    return winding_polygon(pts);
  }

  std::optional<Complex> newton(Complex z, int mult) {
    for (int it = 0; it < 80; ++it) {
      const Complex f = D_(z);
      if (f == Complex(0.0)) return z;
      const Complex df = derivative(z);
      if (df == Complex(0.0)) return std::nullopt;
      const Complex step = double(mult) * f / df;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
      if (std::abs(step) <= opt_.newton_tol * std::max(1.0, std::abs(z))) return z;
    }
    return std::nullopt;
  }

 private:
  ComplexFn D_;
  std::optional<ComplexFn> dD_;
  ZeroSearchOptions opt_;
  double scale_ = 1.0;
  std::map<std::pair<double, double>, Complex> memo_;
};

struct Cell {
  double x0, x1, y0, y1;
  int w;
  double diameter() const { return std::hypot(x1 - x0, y1 - y0); }
};

inline bool same_zero(Complex a, Complex b) { return std::abs(a - b) <= 1e-7 * std::max(1.0, std::abs(a)); }

inline void add_unique(std::vector<Eigenvalue>& v, Eigenvalue e) {
  for (auto& x : v)
    if (same_zero(x.k, e.k)) return;
  v.push_back(e);
}

}  // namespace detail

/// Zeros of an even, real-on-the-real-axis analytic D inside
/// [-k_max, k_max] x [-im_band, im_band] with multiplicities; the zero at the
/// origin is excluded (see extract_gamma_d).
inline std::vector<Eigenvalue> find_zeros(const ComplexFn& D, SearchWindow win, std::optional<ComplexFn> dD = {},
                                          ZeroSearchOptions opt = {}) {
  detail::ZeroFinder zf(D, dD, opt);
  zf.set_scale(1.0);
  const double floor_re = opt.real_part_floor;
  std::vector<Eigenvalue> found;

  // Rectangle in Re k > 0. Retry with slightly nudged outer edges if the
  // boundary happens to pass through a zero.
  std::vector<detail::Cell> queue;
  double kmax = win.k_max, band = win.im_band;
  for (int attempt = 0;; ++attempt) {
    try {
      const int w = zf.winding_rect(floor_re, kmax, -band, band);
      queue.push_back({floor_re, kmax, -band, band, w});
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ContourThroughZero || attempt >= 4) throw;
      kmax *= 1.0 + 1.37e-3;
      band *= 1.0 + 0.91e-3;
    }
  }

  const double fx = 0.5137, fy = 0.4871;  // never split exactly through the real axis
  while (!queue.empty()) {
    const detail::Cell c = queue.back();
    queue.pop_back();
    if (c.w == 0) continue;
    if (c.w < 0) fail(ErrorCode::NonIntegerWinding, "forward", "negative winding (poles?) in cell");
    const Complex centre(0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1));
    const double diam = c.diameter();
    if (diam < opt.min_cell) {
      found.push_back({centre, c.w});
      continue;
    }
    if (c.w == 1 || diam < 0.05 * std::max(1.0, std::abs(centre))) {
      auto z = zf.newton(centre, c.w);
      const double mx = 0.05 * (c.x1 - c.x0), my = 0.05 * (c.y1 - c.y0);
      if (z && z->real() >= c.x0 - mx && z->real() <= c.x1 + mx && z->imag() >= c.y0 - my &&
          z->imag() <= c.y1 + my) {
        const double r = std::max(1e-6, std::min(0.25 * std::min(c.x1 - c.x0, c.y1 - c.y0),
                                                 1e-2 * std::max(1.0, std::abs(*z))));
        bool ok = false;
        try {
          ok = zf.winding_circle(*z, r) == c.w;
        } catch (const Error&) {
          ok = false;
        }
        if (ok) {
          found.push_back({*z, c.w});
          continue;
        }
      }
    }
    const double xm = c.x0 + fx * (c.x1 - c.x0), ym = c.y0 + fy * (c.y1 - c.y0);
    const detail::Cell kids[4] = {{c.x0, xm, c.y0, ym, 0}, {xm, c.x1, c.y0, ym, 0}, {c.x0, xm, ym, c.y1, 0},
                                  {xm, c.x1, ym, c.y1, 0}};
    int sum = 0;
    for (auto kid : kids) {
      kid.w = zf.winding_rect(kid.x0, kid.x1, kid.y0, kid.y1);
      sum += kid.w;
      queue.push_back(kid);
    }
    if (sum != c.w) fail(ErrorCode::NonIntegerWinding, "forward", "sub-cell windings do not add up");
  }

  // Imaginary axis: D(i beta) is real; sign scan then bracketing refinement.
  const int n = opt.imag_axis_intervals;
  auto g = [&](double beta) { return D(Complex(0.0, beta)).real(); };
  double prev_b = floor_re, prev_v = g(prev_b);
  for (int i = 1; i <= n; ++i) {
    const double beta = floor_re + (band - floor_re) * i / n;
    const double v = g(beta);
    if (prev_v == 0.0 || prev_v * v < 0.0) {
      std::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      auto [lo, hi] = boost::math::tools::toms748_solve(g, prev_b, beta, prev_v, v, tol, iters);
      const double root = 0.5 * (lo + hi);
      int m = 1;
      try {
        m = zf.winding_circle(Complex(0.0, root), std::min(1e-2, 0.25 * (beta - prev_b)));
      } catch (const Error&) {
      }
      found.push_back({Complex(0.0, root), std::max(1, m)});
    }
    prev_b = beta;
    prev_v = v;
  }

  // Symmetric closure.
  std::vector<Eigenvalue> closed;
  for (const auto& z : found) {
    Complex k = z.k;
    if (std::abs(k.imag()) < 1e-10 * std::max(1.0, std::abs(k))) k = Complex(k.real(), 0.0);
    if (std::abs(k.real()) < 1e-10 * std::max(1.0, std::abs(k))) k = Complex(0.0, k.imag());
    for (Complex img : {k, std::conj(k), -k, -std::conj(k)}) detail::add_unique(closed, {img, z.multiplicity});
  }
  std::sort(closed.begin(), closed.end(), [](const Eigenvalue& l, const Eigenvalue& r) {
    if (std::abs(l.k) != std::abs(r.k)) return std::abs(l.k) < std::abs(r.k);
    if (l.k.real() != r.k.real()) return l.k.real() > r.k.real();
    return l.k.imag() > r.k.imag();
  });
  return closed;
}

/// d and gamma from D(k) = gamma k^{2d} + ... via the winding number and the
/// trapezoid rule for the Taylor coefficient on |k| = r.
inline std::pair<int, double> extract_gamma_d(const ComplexFn& D, double probe_radius) {
  ZeroSearchOptions opt;
  opt.max_segment = probe_radius;
  detail::ZeroFinder zf(D, std::nullopt, opt);
  int n = 64;
  const int w = zf.winding_circle(0.0, probe_radius, n);
  if (w % 2 != 0 || w < 0) fail(ErrorCode::NonIntegerWinding, "forward", "winding at the origin is not even");
  const int d = w / 2;
  auto coefficient = [&](int npts) {
    Complex s = 0.0;
    for (int i = 0; i < npts; ++i) {
      const Complex z = probe_radius * std::exp(I * (2.0 * pi * (i + 0.5) / npts));
      s += zf.eval(z) / std::pow(z, 2 * d);
    }
    return s / double(npts);
  };
  Complex g = coefficient(n);
  for (int it = 0; it < 4; ++it) {
    n *= 2;
    const Complex g2 = coefficient(n);
    const bool done = std::abs(g2 - g) <= 1e-13 * std::max(1e-300, std::abs(g2));
    g = g2;
    if (done) break;
  }
  if (std::abs(g.imag()) > 1e-8)
    fail(ErrorCode::CrossCheckFailed, "forward", "gamma has a non-negligible imaginary part");
  return {d, g.real()};
}

/// Full forward eigenvalue computation for a profile.
inline EigenvalueSet compute_eigenvalues(const ComplexFn& D, std::optional<ComplexFn> dD, double b,
                                         SearchWindow win, double probe_radius = 0.0) {
  const double r = probe_radius > 0.0 ? probe_radius : 0.5 / b;
  double dmax = 0.0;
  for (int i = 0; i < 8; ++i) dmax = std::max(dmax, std::abs(D(r * std::exp(I * (2 * pi * i / 8 + 0.1)))));
  if (dmax < 1e-13)
    fail(ErrorCode::GammaZero, "forward", "D vanishes identically: trivial medium (rho = 1) has gamma = 0");
  EigenvalueSet es;
  auto [d, g] = extract_gamma_d(D, r);
  es.d = d;
  es.gamma = g;
  es.window = win;
  ZeroSearchOptions opt;
  opt.real_part_floor = 1e-2 / b;
  opt.max_segment = 0.05 / b;
  es.zeros = find_zeros(D, win, std::move(dD), opt);
  return es;
}

inline EigenvalueSet find_eigenvalues(const RadialProfile& p, std::optional<SearchWindow> win = {}) {
  const double b = p.b();
  const SearchWindow w = win.value_or(SearchWindow{40.0 / b, 20.0 / b});
  return compute_eigenvalues([&p](Complex k) { return dispersion_D(p, k); },
                             ComplexFn([&p](Complex k) { return dispersion_D_dk(p, k).second; }), b, w);
}

inline EigenvalueSet find_eigenvalues(const Potential& V, std::optional<SearchWindow> win = {}) {
  const double a = V.a();
  const SearchWindow w = win.value_or(SearchWindow{40.0 / a, 20.0 / a});
  return compute_eigenvalues([&V](Complex k) { return dispersion_D_schrodinger(V, k); },
                             ComplexFn([&V](Complex k) { return dispersion_D_schrodinger_dk(V, k).second; }), a,
                             w);
}

struct ProductValue {
  Complex value;
  double error_estimate = 0.0;
  std::size_t factors_used = 0;
};

/// E(k) = k^{2d} prod (1 - k^2/k_n^2)^{m_n} over the first `truncation`
/// representatives (0 means all). The error estimate models the omitted
/// factors as exp(-k^2 sum 1/k_n^2) with sum_{n>N} ~ N/|k_N|^2.
inline ProductValue evaluate_E(const EigenvalueSet& es, Complex k, std::size_t truncation = 0) {
  const auto reps = es.representatives();
  const std::size_t n = truncation == 0 ? reps.size() : std::min(truncation, reps.size());
  Complex v = std::pow(k, 2 * es.d);
  std::size_t counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex kn2 = reps[i].k * reps[i].k;
    v *= std::pow(1.0 - k * k / kn2, reps[i].multiplicity);
    counted += std::size_t(reps[i].multiplicity);
  }
  double err = 0.0;
  if (n > 0) err = std::abs(v) * std::abs(k * k) * double(counted) / std::norm(reps[n - 1].k);
  return {v, err, n};
}

}  // namespace tev

#endif  // TEV_FORWARD_HPP
