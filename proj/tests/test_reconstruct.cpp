#include <gtest/gtest.h>

#include "tev/reconstruct.hpp"

using namespace tev;

namespace {

const std::vector<double>& grid() {
  static const auto g = symmetric_grid(500.0, (1u << 13) + 1);
  return g;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::BadParams;
}

RadialProfile bump_profile() {
  return make_piecewise_profile(1.0, {{0.0, 0.1, ConstantShape{1.0}},
                                      {0.1, 0.9, RaisedCosineShape{-0.75, false}},
                                      {0.9, 1.0, ConstantShape{1.0}}});
}

// sqrt(rho) = 1 + sin^2 / 2 on the first half and 1 - sin^2 / 2 on the second:
// the two halves contribute 5/8 and 3/8 to the travel time, so a = b = 1.
RadialProfile balanced_profile() {
  return make_piecewise_profile(1.0, {{0.0, 0.5, RaisedCosineShape{0.5, true}},
                                      {0.5, 1.0, RaisedCosineShape{-0.5, true}}});
}

const SpectralSamples& balanced_D() {
  static const auto p = balanced_profile();
  static const auto D = sample_function([](Complex k) { return dispersion_D(p, k); }, grid(), Symmetry::EvenInK);
  return D;
}

SpectralSamples closed_form(ExampleName name, ExampleParams prm, bool use_D) {
  auto ex = example_profile(name, prm);
  return sample_function([&](Complex k) { return use_D ? ex.meta.D(k) : ex.meta.E(k); }, grid(), Symmetry::EvenInK);
}

SpectralSamples square_sinc(double c, double a) {
  return sample_function(
      [=](Complex k) { return k == 0.0 ? Complex(c * a * a) : c * std::pow(std::sin(k * a) / k, 2); }, grid(),
      Symmetry::EvenInK);
}

double sup_error(const RadialProfile& p, const std::function<double(double)>& exact, double lo, double hi) {
  double e = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = lo + (hi - lo) * i / 1000.0;
    e = std::max(e, std::abs(p.rho(x) - exact(x)));
  }
  return e;
}

}  // namespace

TEST(Classify, Regimes) {
  EXPECT_EQ(classify_regime(closed_form(ExampleName::Ex62Second, {}, true), 1.0), Regime::a_lt_b);
  EXPECT_EQ(code_of([] { classify_regime(closed_form(ExampleName::Ex61, {1.0, 2.0, 1.0}, true), 1.0); }),
            ErrorCode::Unsupported);
  EXPECT_NEAR(travel_time(balanced_profile()).a(), 1.0, 1e-10);
  EXPECT_EQ(classify_regime(balanced_D(), 1.0), Regime::a_eq_b);
  auto zero = sample_function([](Complex) { return Complex(0.0); }, grid(), Symmetry::EvenInK);
  EXPECT_EQ(classify_regime(zero), Regime::a_eq_b);
  // Envelope of k D decaying like k^{-1/2}: neither regime.
  auto mid = sample_function([](Complex k) { return k == 0.0 ? Complex(0.0) : std::sin(k) / std::pow(std::abs(k), 1.5); },
                             grid(), Symmetry::EvenInK);
  EXPECT_EQ(code_of([&] { classify_regime(mid); }), ErrorCode::Ambiguous);
}

TEST(ReconstructALtB, Example62Second) {
  auto ex = example_profile(ExampleName::Ex62Second);
  auto E = closed_form(ExampleName::Ex62Second, {}, false);
  auto r = reconstruct_a_lt_b(E, 1.0);
  ASSERT_TRUE(r.profile.has_value());
  EXPECT_EQ(r.regime, Regime::a_lt_b);
  // rho(x) = 1/(2 - x)^4 on [0, 1).
  EXPECT_LT(sup_error(*r.profile, [](double x) { return std::pow(2.0 - x, -4); }, 0.0, 0.95), 1e-2);
  EXPECT_NEAR(r.a, 0.5, 1e-3);
  EXPECT_NEAR(r.gamma, 1.0 / 6.0, 1e-3);
  EXPECT_LT(std::abs(r.gamma * std::pow(r.profile->rho(0.0), 0.25) - r.diagnostics.at("fit_amplitude")), 1e-6);
  EXPECT_LT(r.diagnostics.at("a_consistency"), 1e-3);
  EXPECT_GE(r.diagnostics.at("min_jost_imaginary_axis"), 1e-3);
  EXPECT_LT(r.diagnostics.at("forward_roundtrip"), 1e-3);
  for (int i = 0; i <= 100; ++i) EXPECT_GT(r.profile->rho(i / 100.0), 0.0);

  // f(0;k) in the Schrodinger picture is rho(0)^{1/4} e^{-ik(b-a)} times the wave-picture Jost value.
  double err = 0.0;
  for (std::size_t i = 0; i < r.f0.size(); ++i) {
    const double k = r.f0.k[i];
    if (std::abs(k) > 20.0) continue;
    err = std::max(err, std::abs(r.f0.values[i] - 0.5 * std::exp(-I * k * 0.5) * ex.meta.jost0(k)));
  }
  EXPECT_LT(err, 1e-6);
}

TEST(ReconstructALtB, Errors) {
  auto zero = sample_function([](Complex) { return Complex(0.0); }, grid(), Symmetry::EvenInK);
  EXPECT_EQ(code_of([&] { reconstruct_a_lt_b(zero, 1.0); }), ErrorCode::GammaZero);
  // K (b - a) = 70 * 0.5 = 35 is below the required 40; K = 30 fails already on K b.
  auto ex = example_profile(ExampleName::Ex62Second);
  auto shortE = sample_function([&](Complex k) { return ex.meta.E(k); }, symmetric_grid(70.0, 4097), Symmetry::EvenInK);
  EXPECT_EQ(code_of([&] { reconstruct_a_lt_b(shortE, 1.0); }), ErrorCode::GridTooShort);
  auto tiny = sample_function([&](Complex k) { return ex.meta.E(k); }, symmetric_grid(30.0, 4097), Symmetry::EvenInK);
  EXPECT_EQ(code_of([&] { reconstruct_a_lt_b(tiny, 1.0); }), ErrorCode::GridTooShort);
}

TEST(ReconstructALtB, SmoothBumpRoundTrip) {
  const auto bump = bump_profile();
  auto D = [&bump](Complex k) { return dispersion_D(bump, k); };
  const double gamma = extract_gamma_d(D, 0.5).second;
  auto E = sample_function([&](Complex k) { return D(k) / gamma; }, grid(), Symmetry::EvenInK);
  auto r = reconstruct_a_lt_b(E, 1.0);
  EXPECT_LT(sup_error(*r.profile, [&](double x) { return bump.rho(x); }, 0.0, 1.0), 1e-3);
  EXPECT_NEAR(r.a, travel_time(bump).a(), 1e-3);
  EXPECT_NEAR(r.gamma, gamma, 1e-3 * std::abs(gamma));
  EXPECT_LT(r.diagnostics.at("forward_roundtrip"), 1e-3);
}

TEST(ReconstructAEqB, BalancedProfileRoundTrip) {
  const auto p = balanced_profile();
  auto r = reconstruct_a_eq_b(balanced_D(), 1.0);
  EXPECT_EQ(r.regime, Regime::a_eq_b);
  EXPECT_LT(sup_error(*r.profile, [&](double x) { return p.rho(x); }, 0.0, 1.0), 1e-2);
  EXPECT_LT(r.diagnostics.at("schwarz_vs_cauchy"), 1e-8);
  EXPECT_LT(r.diagnostics.at("a_consistency"), 1e-3);
  EXPECT_LT(r.diagnostics.at("forward_roundtrip"), 1e-3);
}

TEST(ReconstructAEqB, TrivialAndOutOfRange) {
  auto zero = sample_function([](Complex) { return Complex(0.0); }, grid(), Symmetry::EvenInK);
  auto r = reconstruct_a_eq_b(zero, 1.0);
  for (double x : {0.0, 0.3, 0.99}) EXPECT_EQ(r.profile->rho(x), 1.0);
  EXPECT_EQ(r.diagnostics.at("Q0"), 0.0);
  // D = c sin^2(kb)/k^2 has Q(0) = cb; c = 2 puts Q(0) above one.
  EXPECT_EQ(code_of([] { reconstruct_a_eq_b(square_sinc(2.0, 1.0), 1.0); }), ErrorCode::QZeroOutOfRange);
}

TEST(ReconstructPotential, DeltaPotential) {
  const double c = 2.0, a = 1.0;
  auto r = reconstruct_potential(square_sinc(c, a), a);
  EXPECT_EQ(r.regime, Regime::schrodinger);
  double err = 0.0;
  for (std::size_t i = 0; i < r.f0.size(); ++i) {
    const double k = r.f0.k[i];
    if (std::abs(k) > 20.0 || k == 0.0) continue;
    const Complex exact = 1.0 - c / (2.0 * I * k) + c / (2.0 * I * k) * std::exp(2.0 * I * k * a);
    err = std::max(err, std::abs(r.f0.values[i] - exact));
  }
  EXPECT_LT(err, 1e-6);
  ASSERT_TRUE(r.potential.has_value());
  ASSERT_EQ(r.potential->point_parts().size(), 1u);
  EXPECT_NEAR(r.potential->point_parts()[0].y, 1.0, 1e-3);
  EXPECT_NEAR(r.potential->point_parts()[0].weight, 2.0, 1e-2);
  double smooth = 0.0;
  for (int i = 1; i < 1000; ++i) smooth = std::max(smooth, std::abs(r.potential->smooth(i / 1000.0)));
  EXPECT_LT(smooth, 1e-2);
  EXPECT_TRUE(r.bound_states.empty());
}

TEST(ReconstructPotential, SmoothBumpRoundTrip) {
  Potential V(1.0, [](double y) { return 3.0 * std::pow(std::sin(pi * y), 2); }, {}, {}, 3.0);
  auto D = sample_function([&](Complex k) { return dispersion_D_schrodinger(V, k); }, grid(), Symmetry::EvenInK);
  auto r = reconstruct_potential(D, 1.0);
  EXPECT_TRUE(r.potential->point_parts().empty());
  double err = 0.0;
  for (int i = 0; i <= 1000; ++i) err = std::max(err, std::abs(r.potential->smooth(i / 1000.0) - V.smooth(i / 1000.0)));
  EXPECT_LT(err, 1e-3);
  EXPECT_LT(r.diagnostics.at("forward_roundtrip"), 1e-3);
}

TEST(ReconstructPotential, SquareWellBoundState) {
  // Shooting oracle: the even-parity condition q cot q = -beta with q^2 + beta^2 = 9.
  const double depth = 9.0;
  auto g = [&](double beta) {
    const double q = std::sqrt(depth - beta * beta);
    return q * std::cos(q) + beta * std::sin(q);
  };
  double lo = 0.5, hi = 2.9;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    ((g(lo) < 0) == (g(m) < 0) ? lo : hi) = m;
  }
  const double beta = 0.5 * (lo + hi);
  const double q = std::sqrt(depth - beta * beta);
  // f(y) = e^{-beta} (cos q(y-1) - (beta/q) sin q(y-1)) inside, e^{-beta y} outside.
  auto f = [&](double y) {
    return y >= 1.0 ? std::exp(-beta * y)
                    : std::exp(-beta) * (std::cos(q * (y - 1.0)) - beta / q * std::sin(q * (y - 1.0)));
  };
  const int n = 20000;
  double norm = std::exp(-2.0 * beta) / (2.0 * beta);
  for (int i = 0; i <= n; ++i) norm += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * std::pow(f(double(i) / n), 2) / (3.0 * n);
  const double c = 1.0 / std::sqrt(norm);

  auto V = square_well(depth, 1.0);
  auto D = sample_function([&](Complex k) { return dispersion_D_schrodinger(V, k); }, grid(), Symmetry::EvenInK);
  auto r = reconstruct_potential(D, 1.0);
  ASSERT_EQ(r.bound_states.size(), 1u);
  EXPECT_NEAR(r.bound_states[0].beta, beta, 1e-6);
  EXPECT_NEAR(r.bound_states[0].c, c, 1e-6);
  double err = 0.0;
  for (int i = 20; i <= 980; ++i) err = std::max(err, std::abs(r.potential->smooth(i / 1000.0) + depth));
  EXPECT_LT(err, 1e-3);
}

TEST(ReconstructPotential, ZeroDataAndDeterminism) {
  auto zero = sample_function([](Complex) { return Complex(0.0); }, grid(), Symmetry::EvenInK);
  auto r = reconstruct_potential(zero, 1.0);
  EXPECT_TRUE(r.potential->point_parts().empty());
  for (double y : {0.1, 0.5, 0.9}) EXPECT_EQ(r.potential->smooth(y), 0.0);

  ReconstructOptions opt;
  opt.roundtrip = false;
  const auto D = square_sinc(1.5, 1.0);
  const auto r1 = reconstruct_potential(D, 1.0, opt);
  const auto r2 = reconstruct_potential(D, 1.0, opt);
  EXPECT_EQ(r1.f_zero, r2.f_zero);
  EXPECT_EQ(r1.f0.values, r2.f0.values);
}

TEST(Nonuniqueness, SameEDifferentProfiles) {
  auto rep = demonstrate_nonuniqueness(1.0);
  EXPECT_LE(rep.max_relative_difference, 1e-9);
  EXPECT_NEAR(rep.gamma_first, -1.0 / 24.0, 1e-9);
  EXPECT_NEAR(rep.a_first, 1.5, 1e-9);
  EXPECT_NEAR(rep.gamma_second, 1.0 / 6.0, 1e-9);
  EXPECT_NEAR(rep.a_second, 0.5, 1e-9);
  EXPECT_LE(rep.schrodinger_max_relative_difference, 1e-9);
  EXPECT_NEAR(rep.gamma_tilde_c1, 1.0, 1e-9);
  EXPECT_NEAR(rep.gamma_tilde_c3, 3.0, 1e-9);

  auto rep2 = demonstrate_nonuniqueness(2.0);
  EXPECT_LE(rep2.max_relative_difference, 1e-9);
  EXPECT_NEAR(rep2.gamma_first, -1.0 / 3.0, 1e-8);
  EXPECT_NEAR(rep2.a_first, 3.0, 1e-9);
  EXPECT_NEAR(rep2.gamma_second, 4.0 / 3.0, 1e-8);
  EXPECT_NEAR(rep2.a_second, 1.0, 1e-9);
  EXPECT_NEAR(rep2.gamma_tilde_c1, 4.0, 1e-8);
  EXPECT_NEAR(rep2.gamma_tilde_c3, 12.0, 1e-8);
}

TEST(SamplesFromEigenvalues, TruncatedProductOfSine) {
  // Zeros at n pi with d = 1: E(k) = k^2 prod (1 - k^2/(n pi)^2) = k sin k.
  EigenvalueSet es;
  es.d = 1;
  es.gamma = 1.0;
  for (int n = 1; n <= 2000; ++n) {
    es.zeros.push_back({Complex(n * pi), 1});
    es.zeros.push_back({Complex(-n * pi), 1});
  }
  auto [s, trunc] = samples_from_eigenvalues(es, symmetric_grid(2.0, 41));
  EXPECT_GT(trunc, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k = s.k[i];
    EXPECT_NEAR(s.values[i].real(), k * std::sin(k), 1.2 * trunc + 1e-14) << k;
  }
}
