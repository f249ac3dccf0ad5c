#ifndef TEV_VALIDATION_HPP
#define TEV_VALIDATION_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tev/forward.hpp"
#include "tev/io.hpp"
#include "tev/liouville.hpp"
#include "tev/reconstruct.hpp"
#include "tev/rh.hpp"

namespace tev {

/// One comparison against a closed form: passes when measured <= tolerance.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct CheckGroup {
  std::string name;
  std::function<std::vector<CheckResult>()> run;
};

namespace detail {

inline CheckResult check(std::string name, double measured, double tol, std::string detail_text = {}) {
  return {std::move(name), measured, tol, std::isfinite(measured) && measured <= tol, std::move(detail_text)};
}

inline double dispersion_vs_closed_form(const ExampleProfile& ex) {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double k = 0.05 + (50.0 - 0.05) * i / 199.0;
    const Complex exact = ex.meta.D(k);
    worst = std::max(worst, std::abs(dispersion_D(ex.profile, k) - exact) / (1.0 + std::abs(exact)));
  }
  return worst;
}

inline std::vector<CheckResult> validate_ex61() {
  auto ex = example_profile(ExampleName::Ex61, {1.0, 2.0, 1.0});
  std::vector<CheckResult> out;
  out.push_back(check("ex61.dispersion_closed_form", dispersion_vs_closed_form(ex), 1e-8));
  const auto [d, g] = extract_gamma_d([&](Complex k) { return dispersion_D(ex.profile, k); }, 0.5);
  out.push_back(check("ex61.d", std::abs(d - ex.meta.d), 0.0));
  out.push_back(check("ex61.gamma", std::abs(g - ex.meta.gamma), 1e-6));
  out.push_back(check("ex61.travel_time", std::abs(travel_time(ex.profile).a() - 1.5), 1e-10));
  return out;
}

inline std::vector<CheckResult> validate_ex62() {
  std::vector<CheckResult> out;
  const double targets[] = {-1.0 / 24.0, 1.0 / 6.0};
  const double as[] = {1.5, 0.5};
  int idx = 0;
  for (auto name : {ExampleName::Ex62First, ExampleName::Ex62Second}) {
    auto ex = example_profile(name);
    const std::string tag = ex.meta.name;
    const auto [d, g] = extract_gamma_d([&](Complex k) { return dispersion_D(ex.profile, k); }, 0.5);
    out.push_back(check(tag + ".d", std::abs(d - 1), 0.0));
    out.push_back(check(tag + ".gamma", std::abs(g - targets[idx]), 1e-6));
    out.push_back(check(tag + ".a", std::abs(travel_time(ex.profile).a() - as[idx]), 1e-10));
    ++idx;
  }
  // Real zeros at 2 n pi, simple.
  auto ex = example_profile(ExampleName::Ex62Second);
  const auto es = find_eigenvalues(ex.profile, SearchWindow{33.0, 10.0});
  double worst = 0.0;
  int bad_mult = 0;
  for (int n = 1; n <= 5; ++n) {
    double best = 1e300;
    int mult = 0;
    for (const auto& z : es.zeros)
      if (std::abs(z.k - 2.0 * n * pi) < best) {
        best = std::abs(z.k - 2.0 * n * pi);
        mult = z.multiplicity;
      }
    worst = std::max(worst, best);
    bad_mult += mult != 1;
  }
  out.push_back(check("ex62_second.real_zeros", worst, 1e-6));
  out.push_back(check("ex62_second.real_zero_multiplicity", double(bad_mult), 0.0));
  return out;
}

inline std::vector<CheckResult> validate_ex63() {
  auto ex = example_profile(ExampleName::Ex63, {1.0, 2.0, 1.0});
  std::vector<CheckResult> out;
  out.push_back(check("ex63.dispersion_closed_form", dispersion_vs_closed_form(ex), 1e-8));
  const auto [d, g] = extract_gamma_d([&](Complex k) { return dispersion_D(ex.profile, k); }, 0.5);
  const double expected = 8.0 * std::log(2.0) - 17.0 / 3.0;
  out.push_back(check("ex63.d", std::abs(d - 1), 0.0));
  out.push_back(check("ex63.gamma", std::abs(g - expected), 1e-5,
                      "gamma = " + format_double(g) + ", expected 8 ln 2 - 17/3 = " + format_double(expected)));
  out.push_back(check("ex63.gamma_negative", g < 0.0 ? 0.0 : 1.0, 0.0));
  return out;
}

inline std::vector<CheckResult> validate_nonuniqueness() {
  const auto rep = demonstrate_nonuniqueness(1.0);
  std::vector<CheckResult> out;
  out.push_back(check("nonuniqueness.E_agreement", rep.max_relative_difference, 1e-9));
  out.push_back(check("nonuniqueness.gamma_first", std::abs(rep.gamma_first + 1.0 / 24.0), 1e-6));
  out.push_back(check("nonuniqueness.a_first", std::abs(rep.a_first - 1.5), 1e-6));
  out.push_back(check("nonuniqueness.gamma_second", std::abs(rep.gamma_second - 1.0 / 6.0), 1e-6));
  out.push_back(check("nonuniqueness.a_second", std::abs(rep.a_second - 0.5), 1e-6));
  out.push_back(check("nonuniqueness.schrodinger_E_agreement", rep.schrodinger_max_relative_difference, 1e-9));
  out.push_back(check("nonuniqueness.gamma_tilde_ratio", std::abs(rep.gamma_tilde_c3 / rep.gamma_tilde_c1 - 3.0), 1e-8));
  return out;
}

inline std::vector<CheckResult> validate_example55() {
  std::vector<CheckResult> out;
  const double c = 2.0, a = 1.0;
  const auto V = delta_potential(c, a);
  const auto es = find_eigenvalues(V, SearchWindow{10.0, 6.0});
  double worst = 0.0;
  int bad = 0;
  const auto reps = es.representatives();
  for (int n = 1; n <= 3; ++n) {
    double best = 1e300;
    int mult = 0;
    for (const auto& z : reps)
      if (std::abs(z.k - n * pi) < best) {
        best = std::abs(z.k - n * pi);
        mult = z.multiplicity;
      }
    worst = std::max(worst, best);
    bad += mult != 2;
  }
  out.push_back(check("example55.double_zeros", worst, 1e-6));
  out.push_back(check("example55.multiplicity_two", double(bad), 0.0));
  out.push_back(check("example55.gamma_tilde", std::abs(es.gamma - c * a * a), 1e-8));

  const auto D = sample_function(
      [=](Complex k) { return k == 0.0 ? Complex(c * a * a) : c * std::pow(std::sin(k * a) / k, 2); },
      symmetric_grid(500.0, (1u << 14) + 1), Symmetry::EvenInK);
  const auto r = reconstruct_potential(D, a);
  double ferr = 0.0;
  for (std::size_t i = 0; i < r.f0.size(); ++i) {
    const double k = r.f0.k[i];
    if (std::abs(k) > 20.0 || k == 0.0) continue;
    const Complex exact = 1.0 - c / (2.0 * I * k) + c / (2.0 * I * k) * std::exp(2.0 * I * k * a);
    ferr = std::max(ferr, std::abs(r.f0.values[i] - exact));
  }
  out.push_back(check("example55.jost_at_origin", ferr, 1e-6));
  const auto& pts = r.potential->point_parts();
  out.push_back(check("example55.point_part_count", std::abs(double(pts.size()) - 1.0), 0.0));
  if (pts.size() == 1) {
    out.push_back(check("example55.point_part_location", std::abs(pts[0].y - a), 1e-3));
    out.push_back(check("example55.point_part_weight", std::abs(pts[0].weight - c), 1e-2));
  }
  double smooth = 0.0;
  for (int i = 1; i < 1000; ++i) smooth = std::max(smooth, std::abs(r.potential->smooth(a * i / 1000.0)));
  out.push_back(check("example55.smooth_part", smooth, 1e-2));
  return out;
}

inline std::vector<CheckResult> validate_reconstruct_ex62() {
  auto ex = example_profile(ExampleName::Ex62Second);
  const auto E = sample_function([&](Complex k) { return ex.meta.E(k); }, symmetric_grid(500.0, (1u << 14) + 1),
                                 Symmetry::EvenInK);
  const auto r = reconstruct_a_lt_b(E, 1.0);
  double err = 0.0;
  for (int i = 0; i <= 950; ++i) {
    const double x = i / 1000.0;
    err = std::max(err, std::abs(r.profile->rho(x) - ex.profile.rho(x)));
  }
  return {check("reconstruct_ex62.rho", err, 1e-2), check("reconstruct_ex62.a", std::abs(r.a - 0.5), 1e-3),
          check("reconstruct_ex62.gamma", std::abs(r.gamma - 1.0 / 6.0), 1e-3)};
}

inline std::vector<CheckResult> validate_regimes() {
  std::vector<CheckResult> out;
  const auto grid = symmetric_grid(500.0, (1u << 14) + 1);
  auto sample_D = [&](ExampleName n) {
    auto ex = example_profile(n, {1.0, 2.0, 1.0});
    return sample_function([&](Complex k) { return ex.meta.D(k); }, grid, Symmetry::EvenInK);
  };
  out.push_back(check("regime.ex62_second", classify_regime(sample_D(ExampleName::Ex62Second), 1.0) == Regime::a_lt_b ? 0.0 : 1.0, 0.0));
  double rejected = 1.0;
  try {
    classify_regime(sample_D(ExampleName::Ex61), 1.0);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Unsupported) rejected = 0.0;
  }
  out.push_back(check("regime.ex61_unsupported", rejected, 0.0));
  return out;
}

}  // namespace detail

/// The closed-form comparisons behind `tev validate`, grouped by example.
inline std::vector<CheckGroup> validation_suite() {
  return {
      {"ex61", detail::validate_ex61},
      {"ex62", detail::validate_ex62},
      {"ex63", detail::validate_ex63},
      {"nonuniqueness", detail::validate_nonuniqueness},
      {"example55", detail::validate_example55},
      {"reconstruct_ex62", detail::validate_reconstruct_ex62},
      {"regimes", detail::validate_regimes},
  };
}

}  // namespace tev

#endif  // TEV_VALIDATION_HPP
