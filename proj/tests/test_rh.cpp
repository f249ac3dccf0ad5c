#include <gtest/gtest.h>

#include "tev/rh.hpp"

using namespace tev;

namespace {

const std::vector<double>& big_grid() {
  static const auto g = symmetric_grid(500.0, (1u << 16) + 1);
  return g;
}

JumpData rational_jump() {
  JumpData j;
  j.samples = sample_function([](Complex k) { return 2.0 * k / (k * k + 1.0); }, big_grid(), Symmetry::None);
  return j;
}

const CauchySolver& rational_solver() {
  static const CauchySolver s(rational_jump());
  return s;
}

Complex rational_exact(Complex k) { return 1.0 / (k + I); }

}  // namespace

TEST(CauchySplit, ZeroJumpGivesZero) {
  JumpData j;
  j.samples = sample_function([](Complex) { return Complex(0.0); }, symmetric_grid(100.0, 4097), Symmetry::None);
  CauchySolver s(j);
  for (Complex k : {Complex(0.0), Complex(3.0), Complex(1.0, 0.5), Complex(-2.0, 4.0)}) EXPECT_EQ(std::abs(s(k)), 0.0);
}

TEST(CauchySplit, RationalOracleOnRealAxis) {
  const auto& s = rational_solver();
  double err = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double k = -10.0 + 20.0 * i / 400;
    err = std::max(err, std::abs(s(k) - rational_exact(k)));
  }
  EXPECT_LT(err, 1e-8);
  EXPECT_LT(std::abs(s(0.0) - Complex(0.0, -1.0)), 1e-8);
  EXPECT_LT(std::abs(s(2.0) - 1.0 / Complex(2.0, 1.0)), 1e-8);
}

TEST(CauchySplit, RationalOracleInUpperHalfPlane) {
  const auto& s = rational_solver();
  for (int i = 0; i < 20; ++i) {
    const Complex k(-8.0 + 0.8 * i, 1e-3 * std::pow(3.0, i % 10));
    EXPECT_LT(std::abs(s(k) - rational_exact(k)), 1e-8) << k;
  }
}

TEST(CauchySplit, PlemeljLimit) {
  const auto& s = rational_solver();
  for (double k : {-3.0, 0.4, 2.5}) {
    const Complex bv = s(k);
    std::vector<double> gaps;
    for (double eta : {1e-2, 1e-3, 1e-4}) gaps.push_back(std::abs(s(Complex(k, eta)) - bv));
    // First-order approach: each tenfold reduction of eta shrinks the gap about tenfold.
    for (std::size_t i = 1; i < gaps.size(); ++i) {
      const double ratio = gaps[i - 1] / gaps[i];
      EXPECT_GT(ratio, 7.0) << k;
      EXPECT_LT(ratio, 13.0) << k;
    }
    EXPECT_LT(gaps.back(), 2e-4);
  }
}

TEST(CauchySplit, MeanValueProperty) {
  const auto& s = rational_solver();
  const Complex c(1.0, 0.5);
  const double r = 0.3;
  const int n = 64;
  Complex mean = 0.0;
  for (int i = 0; i < n; ++i) mean += s(c + r * std::exp(I * (2.0 * pi * i / n)));
  mean /= double(n);
  EXPECT_LT(std::abs(mean - s(c)), 1e-9);
}

TEST(CauchySplit, DecaysLikeInverseK) {
  const auto& s = rational_solver();
  const auto& bv = s.boundary_values();
  const auto& k = s.data().samples.k;
  double C = 0.0;
  for (std::size_t m = 0; m < k.size(); ++m)
    if (std::abs(k[m]) >= 0.1 * s.K()) C = std::max(C, std::abs(k[m] * bv[m]));
  EXPECT_TRUE(std::isfinite(C));
  EXPECT_NEAR(C, 1.0, 1e-3);
}

TEST(CauchySplit, SquareSincJump) {
  // D(k) = c sin^2(ka)/k^2 with c = 2, a = 1; the split of 2ikD plus one is
  // 1 - c/(2ik) + c e^{2ika}/(2ik).
  const double c = 2.0, a = 1.0;
  JumpData j;
  j.samples = sample_function(
      [&](Complex k) {
        if (k == 0.0) return Complex(0.0);
        return 2.0 * I * k * c * std::pow(std::sin(k * a) / k, 2);
      },
      big_grid(), Symmetry::None);
  j.tail_frequencies = {0.0, 2.0 * a};
  CauchySolver s(j);
  double err = 0.0;
  for (int i = 0; i <= 800; ++i) {
    const double k = -20.0 + 40.0 * i / 800;
    if (k == 0.0) continue;
    const Complex exact = 1.0 - c / (2.0 * I * k) + c / (2.0 * I * k) * std::exp(2.0 * I * k * a);
    err = std::max(err, std::abs(1.0 + s(k) - exact));
  }
  EXPECT_LT(err, 1e-6);
  // The removable singularity at k = 0 gives 1 + ca.
  EXPECT_NEAR(1.0 + s(0.0).real(), 1.0 + c * a, 1e-6);
  EXPECT_NEAR(s(0.0).imag(), 0.0, 1e-6);
}

TEST(CauchySplit, Errors) {
  JumpData j;
  j.samples = sample_function([](Complex k) { return 1.0 / (k * k + 1.0); }, symmetric_grid(100.0, 4097), Symmetry::None);
  EXPECT_THROW(
      {
        try {
          CauchySolver s(j);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::AsymmetricJump);
          throw;
        }
      },
      Error);

  const auto& s = rational_solver();
  EXPECT_THROW(
      {
        try {
          s(Complex(60.0, 0.0));
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::GridTooShort);
          throw;
        }
      },
      Error);
  EXPECT_THROW(s(Complex(1.0, -0.1)), Error);
}

TEST(Schwarz, RecoversFromImaginaryPart) {
  auto im = sample_function([](Complex t) { return Complex(-1.0 / (t * t + 1.0)); }, big_grid(), Symmetry::None);
  auto sw = schwarz_solver(im);
  double err = 0.0;
  for (Complex k : {Complex(0.0), Complex(2.0), Complex(-4.5), Complex(1.0, 0.5), Complex(-3.0, 2.0), Complex(0.2, 1e-3)})
    err = std::max(err, std::abs(sw(k) - rational_exact(k)));
  EXPECT_LT(err, 1e-6);

  // Same result as the Cauchy split of 2i Im F assembled by hand.
  JumpData j;
  j.samples = im;
  for (auto& v : j.samples.values) v = 2.0 * I * v.real();
  CauchyOptions opt;
  opt.require_odd = false;
  CauchySolver cs(j, opt);
  for (Complex k : {Complex(0.3), Complex(-7.0), Complex(1.0, 2.0)}) EXPECT_LT(std::abs(sw(k) - cs(k)), 1e-10);

  auto zero = sample_function([](Complex) { return Complex(0.0); }, symmetric_grid(50.0, 2049), Symmetry::None);
  EXPECT_EQ(std::abs(schwarz_reconstruct(zero, Complex(1.0, 1.0))), 0.0);
}

TEST(Schwarz, BoundaryValuesByPuncturedTrapezoid) {
  auto im = sample_function([](Complex t) { return Complex(-1.0 / (t * t + 1.0)); }, big_grid(), Symmetry::None);
  const auto bv = schwarz_boundary_values(im);
  double err = 0.0;
  for (std::size_t i = 0; i < im.size(); ++i)
    if (std::abs(im.k[i]) <= 10.0) err = std::max(err, std::abs(bv[i] - rational_exact(im.k[i])));
  EXPECT_LT(err, 1e-8);
  // Oscillatory data with an O(1/t) tail: F = (e^{2ik} - 1)/(2ik) has Im F = sin^2(t)/t.
  auto osc = sample_function([](Complex t) { return t == 0.0 ? Complex(0.0) : std::pow(std::sin(t), 2) / t; },
                             big_grid(), Symmetry::None);
  const auto ob = schwarz_boundary_values(osc, {0.0, 2.0});
  double oerr = 0.0;
  for (std::size_t i = 0; i < osc.size(); ++i) {
    const double k = osc.k[i];
    if (std::abs(k) > 20.0) continue;
    const Complex exact = k == 0.0 ? Complex(1.0, 0.0) : (std::exp(2.0 * I * k) - 1.0) / (2.0 * I * k);
    oerr = std::max(oerr, std::abs(ob[i] - exact));
  }
  EXPECT_LT(oerr, 1e-8);
}

TEST(Asymptotics, TravelTimeDefectFromE) {
  auto ex = example_profile(ExampleName::Ex62Second);
  auto E = sample_function([&](Complex k) { return ex.meta.E(k); }, big_grid(), Symmetry::EvenInK);
  auto fit = extract_asymptotics(E, 1.0);
  EXPECT_NEAR(fit.b_minus_a, 0.5, 1e-6);
  EXPECT_NEAR(fit.gamma_rho0_quarter, 1.0 / 12.0, 1e-6);
  EXPECT_LT(fit.relative_residual, 1e-6);

  // Without b the correction frequencies are unknown; the leading terms stay accurate.
  auto loose = extract_asymptotics(E);
  EXPECT_NEAR(loose.b_minus_a, 0.5, 1e-4);
  EXPECT_NEAR(loose.gamma_rho0_quarter, 1.0 / 12.0, 1e-4);
}

TEST(Asymptotics, NegativeDefectFlagged) {
  auto ex = example_profile(ExampleName::Ex61, {1.0, 2.0, 1.0});
  auto D = sample_function([&](Complex k) { return ex.meta.D(k); }, big_grid(), Symmetry::EvenInK);
  auto fit = extract_asymptotics(D, 1.0, true);
  EXPECT_NEAR(fit.b_minus_a, -0.5, 1e-6);
  EXPECT_GT(fit.gamma_rho0_quarter, 0.0);
}

TEST(Asymptotics, InverseSquareDecayIsDegenerate) {
  auto E = sample_function([](Complex k) { return k == 0.0 ? Complex(1.0) : std::pow(std::sin(k) / k, 2); },
                           big_grid(), Symmetry::EvenInK);
  try {
    extract_asymptotics(E, 1.0);
    FAIL() << "expected FitDegenerate";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FitDegenerate);
  }
}
