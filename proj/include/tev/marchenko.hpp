#ifndef TEV_MARCHENKO_HPP
#define TEV_MARCHENKO_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "tev/error.hpp"
#include "tev/forward.hpp"
#include "tev/interpolation.hpp"
#include "tev/parallel.hpp"
#include "tev/profiles.hpp"

namespace tev {

struct BoundState {
  double beta = 0.0;
  double c = 0.0;  // norming constant; zero means "not yet known"
};

struct ScatteringData {
  SpectralSamples f0;  // f(0;k) of the half-line problem
  SpectralSamples S;   // S(k) = f(0;-k) / f(0;k)
  std::vector<BoundState> bound_states;
  double a = 0.0;
};

/// S(k) = conj(f(0;k)) / f(0;k) on a real grid.
inline SpectralSamples scattering_matrix(const SpectralSamples& f0) {
  SpectralSamples S;
  S.k = f0.k;
  S.symmetry = Symmetry::ConjugateSymmetric;
  S.values.resize(f0.size());
  double scale = 0.0;
  for (const auto& v : f0.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < f0.size(); ++i) {
    const Complex f = f0.values[i];
    if (std::abs(f) <= 1e-14 * std::max(scale, 1e-300)) {
      if (f0.k[i] != 0.0) fail(ErrorCode::ZeroDenominator, "marchenko", "f(0;k) vanishes at a real k != 0");
      // Exceptional case: S(0) = -1 by continuity.
      S.values[i] = -1.0;
      continue;
    }
    S.values[i] = std::conj(f) / f;
    if (std::abs(std::abs(S.values[i]) - 1.0) > 1e-9)
      fail(ErrorCode::ZeroDenominator, "marchenko", "scattering matrix is not unimodular");
  }
  return S;
}

inline ScatteringData make_scattering_data(SpectralSamples f0, double a, std::vector<BoundState> bound = {}) {
  if (!(a > 0.0)) fail(ErrorCode::BadParams, "marchenko", "support bound a must be positive");
  ScatteringData sd;
  sd.S = scattering_matrix(f0);
  sd.f0 = std::move(f0);
  sd.bound_states = std::move(bound);
  sd.a = a;
  return sd;
}

// ---------------------------------------------------------------------------
// Bound states

struct BoundStateOptions {
  double beta_max_times_a = 30.0;
  int intervals = 256;
  int contour_points = 64;
};

/// Zeros of the real function f(0;i beta) on (0, beta_max], by sign changes.
inline std::vector<double> bound_state_betas(const ComplexFn& f0, double a, const BoundStateOptions& opt = {}) {
  const double bmax = opt.beta_max_times_a / a;
  const int n = opt.intervals;
  auto g = [&](double beta) { return f0(Complex(0.0, beta)).real(); };
  std::vector<double> grid(n + 1), vals(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = bmax * (i == 0 ? 1e-6 : double(i) / n);
  parallel_for(std::size_t(n + 1), [&](std::size_t i) { vals[i] = g(grid[i]); });
  std::vector<double> betas;
  for (int i = 0; i < n; ++i) {
    if (vals[i] == 0.0) {
      betas.push_back(grid[i]);
      continue;
    }
    if ((vals[i] < 0.0) == (vals[i + 1] < 0.0)) continue;
    std::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(g, grid[i], grid[i + 1], vals[i], vals[i + 1],
                                               boost::math::tools::eps_tolerance<double>(50), iters);
    betas.push_back(0.5 * (r.first + r.second));
  }
  return betas;
}

/// Bound states with norming constants c^2 = i Res(S, i beta), from a
/// contour integral of S(k) = f(0;-k)/f(0;k). `f0` must be entire.
inline std::vector<BoundState> bound_states(const ComplexFn& f0, double a, const BoundStateOptions& opt = {}) {
  const auto betas = bound_state_betas(f0, a, opt);
  std::vector<BoundState> out;
  for (std::size_t j = 0; j < betas.size(); ++j) {
    double r = 0.1 * betas[j];
    if (j > 0) r = std::min(r, 0.25 * (betas[j] - betas[j - 1]));
    if (j + 1 < betas.size()) r = std::min(r, 0.25 * (betas[j + 1] - betas[j]));
    const Complex centre(0.0, betas[j]);
    Complex res = 0.0;
    for (int m = 0; m < opt.contour_points; ++m) {
      const Complex e = std::exp(I * (2.0 * pi * (m + 0.5) / opt.contour_points));
      const Complex k = centre + r * e;
      res += f0(-k) / f0(k) * r * e;
    }
    res /= double(opt.contour_points);
    const Complex c2 = I * res;
    if (!(c2.real() > 0.0) || std::abs(c2.imag()) > 1e-6 * std::abs(c2))
      fail(ErrorCode::ResidueNotPositiveReal, "marchenko", "i Res(S, i beta) is not positive real");
    out.push_back({betas[j], std::sqrt(c2.real())});
  }
  return out;
}

/// Smallest |f(0;i beta)| over a log grid of beta in [lo, hi].
inline double min_jost_imaginary_axis(const ComplexFn& f0, double lo = 1e-3, double hi = 30.0, int n = 400) {
  std::vector<double> v(n + 1);
  parallel_for(std::size_t(n + 1), [&](std::size_t i) {
    const double beta = lo * std::pow(hi / lo, double(i) / n);
    v[i] = std::abs(f0(Complex(0.0, beta)));
  });
  return *std::min_element(v.begin(), v.end());
}

// ---------------------------------------------------------------------------
// Marchenko kernel M(xi)

struct MarchenkoOptions {
  int nodes = 512;              // Nystrom intervals on [0, 2a]
  double tail_fit_fraction = 0.7;
  double leak_tol = 1e-4;
  double max_condition = 1e12;
  double point_part_tol = 1e-4;
};

/// M(xi) = (1/2pi) int (1 - S(k)) e^{ik xi} dk + sum c_j^2 e^{-beta_j xi}.
/// The slowly decaying part of 1 - S is fitted by rational terms times
/// e^{i s k a} and transformed in closed form; the remainder goes through
/// the trapezoid rule.
class MarchenkoKernel {
 public:
  MarchenkoKernel(const ScatteringData& sd, const MarchenkoOptions& opt = {}) : a_(sd.a), opt_(opt) {
    const auto& S = sd.S;
    if (S.size() < 33) fail(ErrorCode::GridTooShort, "marchenko", "scattering samples too short");
    dk_ = S.spacing();
    lambda_ = 2.0 / a_;
    fit_model(S);
    k_ = S.k;
    rem_.resize(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) rem_[i] = (1.0 - S.values[i]) - model(S.k[i]);

    h_ = 2.0 * a_ / opt_.nodes;
    const std::size_t n2 = opt_.nodes;
    const std::size_t count = n2 + n2 / 2 + 1;  // xi in [0, 3a]
    std::vector<Complex> cont(count);
    // Trapezoid sums via the recurrence e^{ik(m+1)h} = e^{ikh} e^{ikmh}.
    for (std::size_t j = 0; j < k_.size(); ++j) {
      const double w = (j == 0 || j + 1 == k_.size()) ? 0.5 : 1.0;
      const Complex step = std::exp(I * k_[j] * h_);
      Complex z = w * rem_[j] * dk_ / (2.0 * pi);
      for (std::size_t m = 0; m < count; ++m) {
        cont[m] += z;
        z *= step;
      }
    }
    grid_.resize(count);
    double imag = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
      const double xi = m * h_;
      const int side = (m == n2) ? -1 : +1;  // left limit at 2a, right limit elsewhere
      const Complex v = cont[m] + model_transform(xi, side);
      grid_[m] = v.real();
      imag = std::max(imag, std::abs(v.imag()));
      scale = std::max(scale, std::abs(v));
    }
    imag_residue_ = scale > 0.0 ? imag / scale : 0.0;

    bound_ = sd.bound_states;
    bool need_fit = false;
    for (const auto& b : bound_) need_fit = need_fit || !(b.c > 0.0);
    if (need_fit) fit_norming_constants();
    for (std::size_t m = 0; m < count; ++m)
      for (const auto& b : bound_) grid_[m] += b.c * b.c * std::exp(-b.beta * m * h_);

    leak_ = 0.0;
    for (std::size_t m = n2 + 1; m < count; ++m) leak_ = std::max(leak_, std::abs(grid_[m]));
    if (leak_ > opt_.leak_tol)
      fail(ErrorCode::SupportLeak, "marchenko", "M(xi) does not vanish beyond xi = 2a");
  }

  double a() const { return a_; }
  double h() const { return h_; }
  int nodes() const { return opt_.nodes; }
  /// M at xi = m h for m = 0 .. 3 nodes / 2; the entry at xi = 2a is the left limit.
  const std::vector<double>& grid_values() const { return grid_; }
  double support_leak() const { return leak_; }
  double imag_residue() const { return imag_residue_; }
  const std::vector<BoundState>& bound_states() const { return bound_; }

  /// M(xi) at any xi >= 0 by direct summation; side picks the limit at jumps.
  double operator()(double xi, int side = +1) const {
    Complex s = 0.0;
    for (std::size_t j = 0; j < k_.size(); ++j) {
      const double w = (j == 0 || j + 1 == k_.size()) ? 0.5 : 1.0;
      s += w * rem_[j] * std::exp(I * k_[j] * xi);
    }
    double v = (s * dk_ / (2.0 * pi) + model_transform(xi, side)).real();
    for (const auto& b : bound_) v += b.c * b.c * std::exp(-b.beta * xi);
    return v;
  }

 private:
  struct Term {
    double shift;  // in units of a
    int order;     // 1: k/(k^2+l^2), 2: 1/(k^2+l^2), 3: k/(k^2+l^2)^2
  };
  // The 1/k part carries frequencies 0 and +-2a; products of it at orders
  // 1/k^2 and 1/k^3 add +-4a and +-6a.
  static constexpr int kTerms = 16;
  static constexpr Term kBasis[kTerms] = {{0, 1},  {2, 1},  {-2, 1}, {0, 2},  {2, 2},  {-2, 2},
                                          {4, 2},  {-4, 2}, {0, 3},  {2, 3},  {-2, 3}, {4, 3},
                                          {-4, 3}, {6, 3},  {-6, 3}, {6, 2}};

  Complex basis(int t, double k) const {
    const double q = k * k + lambda_ * lambda_;
    const int o = kBasis[t].order;
    const double v = o == 1 ? k / q : (o == 2 ? 1.0 / q : k / (q * q));
    return v * std::exp(I * k * kBasis[t].shift * a_);
  }
  static double column_scale(int t, double K) {
    const int o = kBasis[t].order;
    return o == 1 ? K : (o == 2 ? K * K : K * K * K);
  }

  Complex model(double k) const {
    Complex s = 0.0;
    for (int t = 0; t < kTerms; ++t) s += coef_[t] * basis(t, k);
    return s;
  }

  // (1/2pi) int basis(k) e^{ik xi} dk; e^{ik shift} moves xi to xi + shift.
  Complex model_transform(double xi, int side) const {
    Complex s = 0.0;
    for (int t = 0; t < kTerms; ++t) {
      const double x = xi + kBasis[t].shift * a_;
      const double e = std::exp(-lambda_ * std::abs(x));
      if (kBasis[t].order == 1) {
        const double sg = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : double(side));
        s += coef_[t] * (0.5 * I * sg * e);
      } else if (kBasis[t].order == 2) {
        s += coef_[t] * (e / (2.0 * lambda_));
      } else {
        s += coef_[t] * (I * x * e / (4.0 * lambda_));
      }
    }
    return s;
  }

  void fit_model(const SpectralSamples& S) {
    const double K = S.k_max();
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < S.size(); ++i)
      if (std::abs(S.k[i]) >= (1.0 - opt_.tail_fit_fraction) * K) rows.push_back(i);
    Eigen::MatrixXcd A(rows.size(), kTerms);
    Eigen::VectorXcd b(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double k = S.k[rows[r]];
      // Columns scaled to O(1) at |k| = K.
      for (int t = 0; t < kTerms; ++t) A(r, t) = basis(t, k) * column_scale(t, K);
      b(r) = 1.0 - S.values[rows[r]];
    }
    const Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
    for (int t = 0; t < kTerms; ++t) coef_[t] = x(t) * column_scale(t, K);
  }

  // c_j^2 chosen so that M vanishes on (2a, 3a].
  void fit_norming_constants() {
    const std::size_t n2 = opt_.nodes;
    const std::size_t rows = grid_.size() - n2 - 1;
    Eigen::MatrixXd A(rows, bound_.size());
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const double xi = (n2 + 1 + r) * h_;
      for (std::size_t j = 0; j < bound_.size(); ++j) A(r, j) = std::exp(-bound_[j].beta * xi);
      y(r) = -grid_[n2 + 1 + r];
    }
    const Eigen::VectorXd c2 = A.colPivHouseholderQr().solve(y);
    for (std::size_t j = 0; j < bound_.size(); ++j) {
      if (!(c2(j) > 0.0))
        fail(ErrorCode::ResidueNotPositiveReal, "marchenko", "fitted norming constant is not positive");
      bound_[j].c = std::sqrt(c2(j));
    }
  }

  double a_ = 0.0;
  MarchenkoOptions opt_;
  double dk_ = 0.0, lambda_ = 0.0, h_ = 0.0;
  Complex coef_[kTerms] = {};
  std::vector<double> k_;
  std::vector<Complex> rem_;
  std::vector<double> grid_;
  std::vector<BoundState> bound_;
  double leak_ = 0.0, imag_residue_ = 0.0;
};

inline MarchenkoKernel marchenko_kernel(const ScatteringData& sd, const MarchenkoOptions& opt = {}) {
  return MarchenkoKernel(sd, opt);
}

// ---------------------------------------------------------------------------
// Integral equation and recovery

namespace detail {

/// Composite weights on L + 1 equispaced nodes (unit spacing): Gregory
/// end corrections when there is room, trapezoid otherwise.
inline std::vector<double> row_weights(std::size_t L) {
  std::vector<double> w(L + 1, 1.0);
  if (L == 0) {
    w[0] = 0.0;
    return w;
  }
  if (L < 5) {
    w.front() = w.back() = 0.5;
    return w;
  }
  const double g[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int i = 0; i < 3; ++i) {
    w[i] = g[i];
    w[L - i] = g[i];
  }
  return w;
}

/// d/dy of uniformly sampled values at node i, fourth order, using only
/// nodes in [lo, hi].
inline double derivative4(const std::vector<double>& f, std::size_t i, std::size_t lo, std::size_t hi, double h) {
  if (i >= lo + 2 && i + 2 <= hi) return (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
  static const double fwd[5][5] = {{-25, 48, -36, 16, -3},
                                   {-3, -10, 18, -6, 1},
                                   {1, -8, 0, 8, -1},
                                   {-1, 6, -18, 10, 3},
                                   {3, -16, 36, -48, 25}};
  if (hi - lo < 4) {
    if (hi == lo) return 0.0;
    const std::size_t j = std::min(i, hi - 1);
    return (f[j + 1] - f[j]) / h;
  }
  const std::size_t start = (i < lo + 2) ? lo : hi - 4;
  const std::size_t row = i - start;
  double s = 0.0;
  for (int m = 0; m < 5; ++m) s += fwd[row][m] * f[start + m];
  return s / (12 * h);
}

}  // namespace detail

/// V = -2 d/dy K(y,y) from the diagonal sampled at y_i = i h, i = 0..n, on
/// [0, a]. Jumps in the diagonal become point parts of weight -2 jump; the
/// last sample is the left limit at y = a, where K vanishes to the right.
inline Potential potential_from_K(double a, const std::vector<double>& diag, double point_tol = 1e-4) {
  const std::size_t n = diag.size() - 1;
  if (n < 4) fail(ErrorCode::GridTooShort, "marchenko", "too few diagonal samples");
  const double h = a / double(n);
  double scale = 1.0;
  for (double v : diag) scale = std::max(scale, std::abs(v));

  // Interior jumps: a first difference far out of line with its neighbours.
  std::vector<std::size_t> cuts;  // jump between node c and c + 1
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = diag[i + 1] - diag[i];
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double trend = 0.5 * (d[i - 1] + d[i + 1]);
    const double excess = std::abs(d[i] - trend);
    const double local = std::max(std::abs(d[i - 1] - d[i - 2]), std::abs(d[i + 2] - d[i + 1]));
    if (excess > point_tol * scale && excess > 50.0 * local) cuts.push_back(i);
  }
  std::vector<PointPart> points;
  std::vector<std::size_t> lo{0}, hi;
  for (auto c : cuts) {
    // Extrapolate each side to the midpoint to estimate the jump there.
    const double left = diag[c] + 0.5 * d[c - 1];
    const double right = diag[c + 1] - 0.5 * d[c + 1];
    points.push_back({(c + 0.5) * h, -2.0 * (right - left)});
    hi.push_back(c);
    lo.push_back(c + 1);
  }
  hi.push_back(n);
  const double wend = 2.0 * diag[n];
  if (std::abs(wend) > point_tol * scale) points.push_back({a, wend});

  std::vector<double> ys(n + 1), vs(n + 1);
  for (std::size_t s = 0; s < lo.size(); ++s)
    for (std::size_t i = lo[s]; i <= hi[s]; ++i) {
      ys[i] = i * h;
      vs[i] = -2.0 * detail::derivative4(diag, i, lo[s], hi[s], h);
    }
  return make_potential(a, {{0.0, a, TableShape{ys, vs}}}, std::move(points));
}

/// Rows K(y_i, y_i + j h) of the Marchenko equation
/// K(y,xi) + M(y+xi) + int_y^{2a-y} K(y,s) M(s+xi) ds = 0, with potential
/// and Jost solution recovered from them.
class MarchenkoSolution {
 public:
  MarchenkoSolution(const MarchenkoKernel& M, double point_tol = 1e-4, double max_condition = 1e12)
      : a_(M.a()), h_(M.h()) {
    const std::size_t n2 = M.nodes();
    if (n2 % 2 != 0) fail(ErrorCode::BadParams, "marchenko", "Nystrom node count must be even");
    const std::size_t n = n2 / 2;
    const auto& Mg = M.grid_values();
    rows_.resize(n + 1);
    std::vector<char> bad(n + 1, 0);
    parallel_for(n + 1, [&](std::size_t i) {
      const std::size_t N = 2 * (n - i);
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N + 1, N + 1);
      Eigen::VectorXd rhs(N + 1);
      for (std::size_t j = 0; j <= N; ++j) {
        rhs(j) = -Mg[2 * i + j];
        const auto w = detail::row_weights(N - j);
        for (std::size_t l = 0; l <= N - j; ++l) A(j, l) += h_ * w[l] * Mg[2 * i + l + j];
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rcond() * max_condition < 1.0) bad[i] = 1;
      const Eigen::VectorXd x = lu.solve(rhs);
      rows_[i].assign(x.data(), x.data() + x.size());
    });
    if (std::any_of(bad.begin(), bad.end(), [](char b) { return b != 0; }))
      fail(ErrorCode::SingularSystem, "marchenko", "Nystrom system is numerically singular");

    y_.resize(n + 1);
    diag_.resize(n + 1);
    f0_zero_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      y_[i] = i * h_;
      diag_[i] = rows_[i][0];
      f0_zero_[i] = jost_at_node(i, 0.0).real();
    }
    V_ = potential_from_K(a_, diag_, point_tol);
  }

  double a() const { return a_; }
  double h() const { return h_; }
  const std::vector<double>& y_grid() const { return y_; }
  /// K(y_i, y_i + j h) for j = 0 .. 2(n - i); zero beyond.
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<double>& diagonal() const { return diag_; }
  const Potential& potential() const { return V_; }
  const std::vector<double>& f0_zero() const { return f0_zero_; }

  double K(std::size_t i, double xi) const {
    const double j = (xi - y_[i]) / h_;
    const auto& r = rows_[i];
    if (j < -1e-9 || j > double(r.size() - 1) + 1e-9) return 0.0;
    const std::size_t cnt = std::min<std::size_t>(6, r.size());
    const std::size_t first = lagrange_window(r.size(), 0.0, 1.0, j, cnt);
    return uniform_lagrange<double>(std::span<const double>(r), 0.0, 1.0, j, first, cnt).value.real();
  }

  /// f(y_i;k) = e^{ik y_i} + int K(y_i,s) e^{iks} ds.
  Complex jost_at_node(std::size_t i, Complex k) const {
    const auto& r = rows_[i];
    const auto w = detail::row_weights(r.size() - 1);
    Complex s = 0.0;
    for (std::size_t l = 0; l < r.size(); ++l) s += w[l] * r[l] * std::exp(I * k * (y_[i] + l * h_));
    return std::exp(I * k * y_[i]) + h_ * s;
  }

  /// f(y;k) for y in [0, a] by interpolation across rows; e^{iky} beyond a.
  Complex jost(Complex k, double y) const {
    if (y >= a_) return std::exp(I * k * y);
    const std::size_t cnt = 6;
    const std::size_t first = lagrange_window(y_.size(), 0.0, h_, y, cnt);
    std::vector<Complex> vals(cnt);
    for (std::size_t m = 0; m < cnt; ++m) vals[m] = jost_at_node(first + m, k);
    return uniform_lagrange<Complex>(std::span<const Complex>(vals), first * h_, h_, y, 0, cnt).value;
  }

  /// f(y;0) interpolated from the node values.
  double jost_zero(double y) const {
    if (y >= a_) return 1.0;
    const std::size_t cnt = 6;
    const std::size_t first = lagrange_window(y_.size(), 0.0, h_, y, cnt);
    return uniform_lagrange<double>(std::span<const double>(f0_zero_), 0.0, h_, y, first, cnt).value.real();
  }

 private:
  double a_ = 0.0, h_ = 0.0;
  std::vector<double> y_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> diag_;
  std::vector<double> f0_zero_;
  Potential V_;
};

inline MarchenkoSolution solve_marchenko(const MarchenkoKernel& M, const MarchenkoOptions& opt = {}) {
  return MarchenkoSolution(M, opt.point_part_tol, opt.max_condition);
}

}  // namespace tev

#endif  // TEV_MARCHENKO_HPP
