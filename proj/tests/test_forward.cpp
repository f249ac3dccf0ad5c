#include <gtest/gtest.h>

#include <random>

#include "tev/forward.hpp"

using namespace tev;

namespace {

/// Independent oracle: nonzero root of z - sin z = 0 by complex Newton.
Complex z_minus_sin_root(Complex z) {
  for (int i = 0; i < 100; ++i) {
    const Complex step = (z - std::sin(z)) / (1.0 - std::cos(z));
    z -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return z;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace

TEST(Forward, TrivialMediumHasZeroDispersion) {
  auto p = constant_profile(1.0);
  for (double k : {0.0, 0.7, 5.0, 30.0}) EXPECT_LT(std::abs(dispersion_D(p, k)), 1e-12);
  EXPECT_THROW(find_eigenvalues(p), Error);
}

TEST(Forward, Ex62FirstClosedFormAtK3) {
  auto ex = example_profile(ExampleName::Ex62First, {1.0});
  const double k = 3.0;
  const double oracle = (1.0 / 36.0) * (std::cos(1.5) - std::cos(4.5) - 6.0 * std::sin(1.5));
  EXPECT_LT(rel(dispersion_D(ex.profile, k), oracle), 1e-9);
  EXPECT_LT(rel(dispersion_D_via_jost(ex.profile, k), oracle), 1e-9);
}

TEST(Forward, ImaginaryPartOfJostIsKD) {
  auto ex = example_profile(ExampleName::Ex63, {1.0, 2.0, 1.0});
  for (double k : {0.3, 2.0, 11.0, 50.0}) {
    const Complex f0 = solve_jost_wave(ex.profile, k, 0.0).value;
    EXPECT_LT(std::abs(f0.imag() - k * dispersion_D(ex.profile, k).real()), 1e-9) << k;
  }
}

TEST(Forward, EvenAndTwoPathIdentity) {
  auto ex = example_profile(ExampleName::Ex63, {1.0, 2.0, 1.0});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> re(0.05, 40.0), im(-5.0, 5.0);
  for (int i = 0; i < 10; ++i) {
    const Complex k(re(rng), im(rng));
    const Complex d = dispersion_D(ex.profile, k);
    EXPECT_LT(rel(dispersion_D(ex.profile, -k), d), 1e-10);
    EXPECT_LT(rel(dispersion_D_via_jost(ex.profile, k), d), 1e-9);
  }
  EXPECT_NO_THROW(dispersion_D_checked(ex.profile, 4.0));
}

TEST(Forward, DerivativeFromVariationalEquation) {
  auto ex = example_profile(ExampleName::Ex61, {1.0, 2.0, 1.0});
  const Complex k(3.2, 0.7);
  const double h = 1e-5;
  const Complex fd = (ex.meta.D(k + h) - ex.meta.D(k - h)) / (2 * h);
  auto [D, dD] = dispersion_D_dk(ex.profile, k);
  EXPECT_LT(rel(D, ex.meta.D(k)), 1e-9);
  EXPECT_LT(std::abs(dD - fd), 1e-7 * (1 + std::abs(fd)));
}

TEST(Forward, SchrodingerDispersionForPointInteraction) {
  auto V = delta_potential(2.0, 1.0);
  EXPECT_NEAR(std::abs(dispersion_D_schrodinger(V, pi / 2) - 8.0 / (pi * pi)), 0.0, 1e-10);
  auto [D, dD] = dispersion_D_schrodinger_dk(V, pi);
  EXPECT_LT(std::abs(D), 1e-10);
  EXPECT_LT(std::abs(dD), 1e-9);
  EXPECT_LT(std::abs(dispersion_D_schrodinger(Potential::zero(1.0), 2.5)), 1e-13);
  EXPECT_NO_THROW(dispersion_D_schrodinger_checked(V, 3.3));
}

TEST(Forward, GammaAndMultiplicityAtOrigin) {
  auto first = example_profile(ExampleName::Ex62First, {1.0});
  auto [d1, g1] = extract_gamma_d([&](Complex k) { return dispersion_D(first.profile, k); }, 0.5);
  EXPECT_EQ(d1, 1);
  EXPECT_NEAR(g1, -1.0 / 24.0, 1e-8);
  auto ex63 = example_profile(ExampleName::Ex63, {1.0, 2.0, 1.0});
  auto [d3, g3] = extract_gamma_d([&](Complex k) { return dispersion_D(ex63.profile, k); }, 0.5);
  EXPECT_EQ(d3, 1);
  EXPECT_NEAR(g3, 8 * std::log(2.0) - 17.0 / 3.0, 1e-8);
}

TEST(Forward, ZerosOfClosedFormEx62) {
  auto ex = example_profile(ExampleName::Ex62Second, {1.0});
  auto es = compute_eigenvalues(ex.meta.D, std::nullopt, 1.0, {40.0, 20.0});
  EXPECT_EQ(es.d, 1);
  EXPECT_NEAR(es.gamma, 1.0 / 6.0, 1e-10);
  auto reps = es.representatives();
  int real_found = 0;
  for (int n = 1; n <= 6; ++n) {
    for (const auto& z : reps)
      if (std::abs(z.k - 2.0 * n * pi) < 1e-8) {
        EXPECT_EQ(z.multiplicity, 1);
        ++real_found;
      }
  }
  EXPECT_EQ(real_found, 6);
  const Complex oracle = z_minus_sin_root(Complex(7.4977, 2.7687));
  bool hit = false, partner = false;
  for (const auto& z : es.zeros) {
    if (std::abs(z.k - oracle) < 1e-8) hit = true;
    if (std::abs(z.k - std::conj(oracle)) < 1e-8) partner = true;
  }
  EXPECT_TRUE(hit);
  EXPECT_TRUE(partner);
  // Symmetric closure.
  for (const auto& z : es.zeros) {
    bool neg = false;
    for (const auto& w : es.zeros) neg |= std::abs(w.k + z.k) < 1e-9;
    EXPECT_TRUE(neg);
  }
}

TEST(Forward, DoubleZerosOfPointInteraction) {
  const double c = 2.0, a = 1.0;
  auto closed = [&](Complex k) { return c * a * a * std::pow(sinc(k * a), 2); };
  auto es = compute_eigenvalues(closed, std::nullopt, a, {12.0, 6.0});
  auto reps = es.representatives();
  ASSERT_EQ(reps.size(), 3u);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_NEAR(std::abs(reps[n - 1].k - n * pi), 0.0, 1e-7);
    EXPECT_EQ(reps[n - 1].multiplicity, 2);
  }
  EXPECT_NEAR(es.gamma, c * a * a, 1e-10);
}

TEST(Forward, ProductConvergesToClosedForm) {
  auto ex = example_profile(ExampleName::Ex62First, {1.0});
  auto es = compute_eigenvalues(ex.meta.D, std::nullopt, 1.0, {120.0, 20.0});
  EXPECT_EQ(evaluate_E(es, 0.0).value, Complex(0.0));
  const Complex target = ex.meta.E(1.0);
  double prev = 1e9;
  for (std::size_t n : {4u, 16u, 0u}) {
    auto v = evaluate_E(es, 1.0, n);
    const double err = std::abs(v.value - target);
    EXPECT_LT(err, prev);
    EXPECT_LT(err, 3.0 * v.error_estimate + 1e-12);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2);
  auto reps = es.representatives();
  EXPECT_LT(std::abs(evaluate_E(es, reps[2].k).value), 1e-12);
}
