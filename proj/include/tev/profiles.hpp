#ifndef TEV_PROFILES_HPP
#define TEV_PROFILES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tev/error.hpp"
#include "tev/interpolation.hpp"
#include "tev/special.hpp"

namespace tev {

/// rho and its first two x-derivatives at a point.
struct RhoValue {
  double rho = 1.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Segment shapes. Each is evaluated on its own closed interval [x_lo, x_hi].
struct ConstantShape {
  double value = 1.0;
};
/// rho = eps^4 / (eps c x + 1)^4
struct RationalEx61Shape {
  double eps = 2.0;
  double c = 1.0;
};
/// rho = scale * (x + shift)^exponent
struct PowerShape {
  double scale = 1.0;
  double shift = 0.0;
  double exponent = 0.0;
};
/// Monotone cubic through (x, rho) knots; knots span the segment exactly.
struct TableShape {
  std::vector<double> x;
  std::vector<double> rho;
};
/// rho = 1 + amplitude sin^2(pi t), t the segment-relative coordinate.
/// With in_sqrt the formula gives sqrt(rho) instead.
struct RaisedCosineShape {
  double amplitude = 0.0;
  bool in_sqrt = false;
};

using SegmentShape =
    std::variant<ConstantShape, RationalEx61Shape, PowerShape, TableShape, RaisedCosineShape>;

struct SegmentSpec {
  double x_lo = 0.0;
  double x_hi = 0.0;
  SegmentShape shape;
};

inline std::string shape_kind(const SegmentShape& s) {
  struct V {
    std::string operator()(const ConstantShape&) const { return "constant"; }
    std::string operator()(const RationalEx61Shape&) const { return "rational_ex61"; }
    std::string operator()(const PowerShape&) const { return "power"; }
    std::string operator()(const TableShape&) const { return "table"; }
    std::string operator()(const RaisedCosineShape& r) const {
      return r.in_sqrt ? "sqrt_raised_cosine" : "raised_cosine";
    }
  };
  return std::visit(V{}, s);
}

namespace detail {

using RhoEval = std::function<RhoValue(double)>;

inline RhoEval make_evaluator(const SegmentSpec& spec) {
  const double lo = spec.x_lo, len = spec.x_hi - spec.x_lo;
  struct V {
    double lo, len;
    RhoEval operator()(const ConstantShape& s) const {
      return [v = s.value](double) { return RhoValue{v, 0.0, 0.0}; };
    }
    RhoEval operator()(const RationalEx61Shape& s) const {
      return [e = s.eps, c = s.c](double x) {
        const double u = e * c * x + 1.0;
        const double e4 = e * e * e * e;
        return RhoValue{e4 / std::pow(u, 4), -4.0 * e4 * e * c / std::pow(u, 5),
                        20.0 * e4 * e * e * c * c / std::pow(u, 6)};
      };
    }
    RhoEval operator()(const PowerShape& s) const {
      return [s](double x) {
        const double u = x + s.shift;
        const double p = s.exponent;
        return RhoValue{s.scale * std::pow(u, p), s.scale * p * std::pow(u, p - 1.0),
                        s.scale * p * (p - 1.0) * std::pow(u, p - 2.0)};
      };
    }
    RhoEval operator()(const TableShape& s) const {
      auto spline = std::make_shared<MonotoneCubic>(s.x, s.rho);
      return [spline](double x) {
        return RhoValue{spline->eval(x, 0), spline->eval(x, 1), spline->eval(x, 2)};
      };
    }
    RhoEval operator()(const RaisedCosineShape& s) const {
      return [lo = lo, len = len, s](double x) {
        const double t = (x - lo) / len;
        const double w = pi / len;
        const double q = s.amplitude * std::pow(std::sin(pi * t), 2);
        const double q1 = s.amplitude * w * std::sin(2 * pi * t);
        const double q2 = 2.0 * s.amplitude * w * w * std::cos(2 * pi * t);
        if (!s.in_sqrt) return RhoValue{1.0 + q, q1, q2};
        const double r = 1.0 + q;
        return RhoValue{r * r, 2.0 * r * q1, 2.0 * q1 * q1 + 2.0 * r * q2};
      };
    }
  };
  return std::visit(V{lo, len}, spec.shape);
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// Piecewise-smooth rho on [0, b], identically 1 beyond b. Immutable.
class RadialProfile {
 public:
  struct Segment {
    SegmentSpec spec;
    detail::RhoEval eval;
  };

  RadialProfile(double b, std::vector<Segment> segments)
      : b_(b), segments_(std::move(segments)) {
    breakpoints_.push_back(0.0);
    for (const auto& s : segments_) {
      breakpoints_.push_back(s.spec.x_hi);
      if (const auto* t = std::get_if<TableShape>(&s.spec.shape))
        breakpoints_.insert(breakpoints_.end(), t->x.begin(), t->x.end());
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end(),
                                   [](double a, double c) { return std::abs(a - c) <= 1e-15; }),
                       breakpoints_.end());
  }

  double b() const { return b_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  std::vector<SegmentSpec> specs() const {
    std::vector<SegmentSpec> out;
    for (const auto& s : segments_) out.push_back(s.spec);
    return out;
  }

  /// Right-continuous evaluation; 1 for x >= b.
  RhoValue eval(double x) const {
    if (x >= b_) return {};
    return segment_at(x).eval(std::max(x, 0.0));
  }
  /// Left-limit evaluation at x (uses the segment ending at x).
  RhoValue eval_left(double x) const {
    if (x > b_) return {};
    if (x <= 0.0) return eval(0.0);
    for (const auto& s : segments_)
      if (x > s.spec.x_lo && x <= s.spec.x_hi) return s.eval(x);
    return segments_.back().eval(x);
  }

  double rho(double x) const { return eval(x).rho; }
  double operator()(double x) const { return rho(x); }

  /// Largest sqrt(rho) over the probe grid plus breakpoints; used for ODE step caps.
  double max_sqrt_rho() const {
    if (max_sqrt_rho_ > 0.0) return max_sqrt_rho_;
    double m = 1.0;
    const int n = 400;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::sqrt(rho(b_ * i / n)));
    for (double x : breakpoints_) m = std::max(m, std::sqrt(eval_left(x).rho));
    max_sqrt_rho_ = m;
    return m;
  }

 private:
  const Segment& segment_at(double x) const {
    for (const auto& s : segments_)
      if (x < s.spec.x_hi) return s;
    return segments_.back();
  }

  double b_;
  std::vector<Segment> segments_;
  std::vector<double> breakpoints_;
  mutable double max_sqrt_rho_ = 0.0;
};

/// Builds and validates a profile from segments that tile [0, b].
inline RadialProfile make_piecewise_profile(double b, std::vector<SegmentSpec> specs) {
  const std::string stage = "profiles";
  if (!(b > 0.0) || !std::isfinite(b)) fail(ErrorCode::BadParams, stage, "b must be positive");
  if (specs.empty()) fail(ErrorCode::GapOrOverlap, stage, "no segments");
  std::sort(specs.begin(), specs.end(),
            [](const SegmentSpec& l, const SegmentSpec& r) { return l.x_lo < r.x_lo; });
  const double tol = 1e-12 * b;
  if (std::abs(specs.front().x_lo) > tol)
    fail(ErrorCode::GapOrOverlap, stage, "first segment must start at 0");
  if (std::abs(specs.back().x_hi - b) > tol)
    fail(ErrorCode::GapOrOverlap, stage, "last segment must end at b");
  specs.front().x_lo = 0.0;
  specs.back().x_hi = b;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!(specs[i].x_hi > specs[i].x_lo))
      fail(ErrorCode::GapOrOverlap, stage, "empty or reversed segment");
    if (i > 0) {
      if (std::abs(specs[i].x_lo - specs[i - 1].x_hi) > tol)
        fail(ErrorCode::GapOrOverlap, stage,
             "segments do not tile [0,b] near x=" + detail::fmt(specs[i].x_lo));
      specs[i].x_lo = specs[i - 1].x_hi;
    }
    if (auto* t = std::get_if<TableShape>(&specs[i].shape)) {
      if (t->x.size() < 2 || t->x.size() != t->rho.size())
        fail(ErrorCode::BadParams, stage, "table needs matching x/rho arrays of length >= 2");
      if (std::abs(t->x.front() - specs[i].x_lo) > tol || std::abs(t->x.back() - specs[i].x_hi) > tol)
        fail(ErrorCode::BadParams, stage, "table knots must span the segment");
      t->x.front() = specs[i].x_lo;
      t->x.back() = specs[i].x_hi;
    }
    if (const auto* e = std::get_if<RationalEx61Shape>(&specs[i].shape)) {
      if (!(e->eps > 0.0) || e->c == 0.0)
        fail(ErrorCode::BadParams, stage, "rational_ex61 needs eps > 0 and c != 0");
    }
  }

  std::vector<RadialProfile::Segment> segs;
  for (auto& s : specs) segs.push_back({s, detail::make_evaluator(s)});

  // Continuity at interior junctions and against rho = 1 beyond b.
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double x = segs[i].spec.x_hi;
    const double left = segs[i].eval(x).rho;
    const double right = (i + 1 < segs.size()) ? segs[i + 1].eval(x).rho : 1.0;
    if (!(std::abs(left - right) <= 1e-12 * std::max({1.0, std::abs(left), std::abs(right)})))
      fail(ErrorCode::DiscontinuousJunction, stage,
           "rho jumps from " + detail::fmt(left) + " to " + detail::fmt(right) + " at x=" +
               detail::fmt(x));
  }

  RadialProfile p(b, std::move(segs));
  const int n = 1000;
  auto check = [&](double x, double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      fail(ErrorCode::NonPositive, stage, "rho <= 0 (or not finite) at x=" + detail::fmt(x));
  };
  for (int i = 0; i <= n; ++i) {
    const double x = b * i / n;
    check(x, p.rho(x));
  }
  for (double x : p.breakpoints()) {
    check(x, p.eval_left(x).rho);
    check(x, p.rho(x));
  }
  return p;
}

inline RadialProfile constant_profile(double b) {
  return make_piecewise_profile(b, {{0.0, b, ConstantShape{1.0}}});
}

// ---------------------------------------------------------------------------
// Admissibility

enum class ViolationReason { NonPositive, RhoPrimeJump, NotOneBeyondB, Discontinuous };

inline std::string_view to_string(ViolationReason r) {
  switch (r) {
    case ViolationReason::NonPositive: return "nonpositive";
    case ViolationReason::RhoPrimeJump: return "rho-prime-jump";
    case ViolationReason::NotOneBeyondB: return "not-one-beyond-b";
    case ViolationReason::Discontinuous: return "discontinuous";
  }
  return "unknown";
}

struct Violation {
  double x = 0.0;
  ViolationReason reason{};
  double left = 0.0;   // left one-sided value (rho or rho')
  double right = 0.0;  // right one-sided value
};

struct AdmissibilityReport {
  bool is_class_A = true;
  std::vector<Violation> violations;
};

/// Probes positivity, continuity of rho and rho' across breakpoints (second-order
/// one-sided differences with step 1e-7 b), and rho = 1 beyond b.
inline AdmissibilityReport check_admissible(const RadialProfile& p) {
  AdmissibilityReport rep;
  const double b = p.b();
  const double h = 1e-7 * b;
  auto add = [&](double x, ViolationReason r, double l, double rt) {
    rep.violations.push_back({x, r, l, rt});
  };

  const int n = 1000;
  for (int i = 0; i <= n; ++i) {
    const double x = b * i / n;
    const double v = p.rho(x);
    if (!(v > 0.0)) add(x, ViolationReason::NonPositive, v, v);
  }
  for (int i = 1; i <= n; ++i) {
    const double x = b + b * i / n;
    if (p.rho(x) != 1.0) add(x, ViolationReason::NotOneBeyondB, p.rho(x), 1.0);
  }

  for (double x : p.breakpoints()) {
    if (x <= 0.0) continue;
    const double left = p.eval_left(x).rho;
    const double right = p.rho(x);
    if (std::abs(left - right) > 1e-12 * std::max(1.0, std::abs(left)))
      add(x, ViolationReason::Discontinuous, left, right);
    // One-sided derivatives from values only, so the check does not trust
    // segment derivative formulas.
    const double dl = (3.0 * left - 4.0 * p.eval_left(x - h).rho + p.eval_left(x - 2 * h).rho) / (2 * h);
    const double dr = (-3.0 * right + 4.0 * p.rho(x + h) - p.rho(x + 2 * h)) / (2 * h);
    if (std::abs(dl - dr) > 1e-6 * std::max({1.0, std::abs(dl), std::abs(dr)}))
      add(x, ViolationReason::RhoPrimeJump, dl, dr);
  }
  rep.is_class_A = rep.violations.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Potentials (Schrodinger side)

struct PointPart {
  double y = 0.0;
  double weight = 0.0;
};

/// Serializable description of a potential's smooth part on [0, a].
struct PotentialSegment {
  double y_lo = 0.0;
  double y_hi = 0.0;
  std::variant<double, TableShape> shape;  // constant value, or linear table (x = y knots)
};

/// Compactly supported V on [0, a]: a smooth (integrable) part plus delta components.
class Potential {
 public:
  Potential() = default;
  Potential(double a, std::function<double(double)> smooth, std::vector<PointPart> points,
            std::vector<double> breakpoints = {}, double bound = -1.0)
      : a_(a), smooth_(std::move(smooth)), points_(std::move(points)), breakpoints_(std::move(breakpoints)) {
    if (!(a > 0.0)) fail(ErrorCode::BadParams, "profiles", "potential support bound a must be positive");
    for (const auto& pp : points_)
      if (!(pp.y > 0.0 && pp.y <= a * (1 + 1e-14)))
        fail(ErrorCode::BadParams, "profiles", "point part location outside (0, a]");
    std::sort(points_.begin(), points_.end(), [](auto& l, auto& r) { return l.y < r.y; });
    std::sort(breakpoints_.begin(), breakpoints_.end());
    bound_ = bound >= 0.0 ? bound : probe_bound();
  }

  static Potential zero(double a) {
    Potential p(a, [](double) { return 0.0; }, {}, {}, 0.0);
    p.set_segments({{0.0, a, 0.0}});
    return p;
  }

  double a() const { return a_; }
  const std::vector<PointPart>& point_parts() const { return points_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  /// sup |V_smooth| estimate, used for ODE step caps.
  double bound() const { return bound_; }

  double smooth(double y) const {
    if (y <= 0.0 || y >= a_ || !smooth_) return 0.0;
    return smooth_(y);
  }
  double operator()(double y) const { return smooth(y); }

  /// Segment description when the potential was built from one (for export).
  const std::optional<std::vector<PotentialSegment>>& segments() const { return segments_; }
  void set_segments(std::vector<PotentialSegment> s) { segments_ = std::move(s); }

 private:
  double probe_bound() const {
    double m = 0.0;
    for (int i = 1; i < 400; ++i) m = std::max(m, std::abs(smooth(a_ * i / 400.0)));
    return m;
  }

  double a_ = 1.0;
  std::function<double(double)> smooth_;
  std::vector<PointPart> points_;
  std::vector<double> breakpoints_;
  double bound_ = 0.0;
  std::optional<std::vector<PotentialSegment>> segments_;
};

/// Potential from constant/table segments tiling [0, a] plus point parts.
inline Potential make_potential(double a, std::vector<PotentialSegment> segs, std::vector<PointPart> points) {
  std::sort(segs.begin(), segs.end(), [](auto& l, auto& r) { return l.y_lo < r.y_lo; });
  const double tol = 1e-12 * a;
  std::vector<double> bps;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!(segs[i].y_hi > segs[i].y_lo)) fail(ErrorCode::GapOrOverlap, "profiles", "empty potential segment");
    if (i == 0 && std::abs(segs[i].y_lo) > tol) fail(ErrorCode::GapOrOverlap, "profiles", "potential segments must start at 0");
    if (i > 0 && std::abs(segs[i].y_lo - segs[i - 1].y_hi) > tol)
      fail(ErrorCode::GapOrOverlap, "profiles", "potential segments do not tile [0,a]");
    bps.push_back(segs[i].y_hi);
  }
  if (!segs.empty() && std::abs(segs.back().y_hi - a) > tol)
    fail(ErrorCode::GapOrOverlap, "profiles", "potential segments must end at a");
  struct Piece {
    double lo, hi;
    std::function<double(double)> f;
  };
  auto pieces = std::make_shared<std::vector<Piece>>();
  for (const auto& s : segs) {
    if (const double* v = std::get_if<double>(&s.shape)) {
      pieces->push_back({s.y_lo, s.y_hi, [v = *v](double) { return v; }});
    } else {
      const auto& t = std::get<TableShape>(s.shape);
      if (t.x.size() < 2 || t.x.size() != t.rho.size())
        fail(ErrorCode::BadParams, "profiles", "potential table needs matching arrays");
      pieces->push_back({s.y_lo, s.y_hi, [t](double y) {
                           auto it = std::upper_bound(t.x.begin(), t.x.end(), y);
                           std::size_t i = std::clamp<std::size_t>(it - t.x.begin(), 1, t.x.size() - 1);
                           const double w = (y - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
                           return (1 - w) * t.rho[i - 1] + w * t.rho[i];
                         }});
      bps.insert(bps.end(), t.x.begin(), t.x.end());
    }
  }
  auto f = [pieces](double y) {
    for (const auto& p : *pieces)
      if (y < p.hi) return p.f(y);
    return pieces->empty() ? 0.0 : pieces->back().f(y);
  };
  Potential pot(a, f, std::move(points), bps);
  pot.set_segments(std::move(segs));
  return pot;
}

/// V(y) = c delta(y - a).
inline Potential delta_potential(double c, double a) {
  Potential p(a, [](double) { return 0.0; }, {{a, c}}, {}, 0.0);
  p.set_segments({{0.0, a, 0.0}});
  return p;
}

/// V(y) = -depth on (0, width).
inline Potential square_well(double depth, double width) {
  return make_potential(width, {{0.0, width, -depth}}, {});
}

// ---------------------------------------------------------------------------
// Closed-form examples

enum class ExampleName { Ex61, Ex62First, Ex62Second, Ex63 };

inline std::optional<ExampleName> parse_example_name(const std::string& s) {
  if (s == "ex61") return ExampleName::Ex61;
  if (s == "ex62_first") return ExampleName::Ex62First;
  if (s == "ex62_second") return ExampleName::Ex62Second;
  if (s == "ex63") return ExampleName::Ex63;
  return std::nullopt;
}

struct ExampleParams {
  double b = 1.0;
  double eps = 2.0;  // ex61
  double c = 1.0;    // ex61, ex63
};

/// Closed-form data attached to an example profile for oracle tests.
struct ExampleMetadata {
  std::string name;
  double a = 0.0;
  double gamma = 0.0;
  int d = 1;
  std::function<Complex(Complex)> D;               // dispersion function
  std::function<Complex(Complex)> E;               // D / gamma
  std::function<Complex(Complex)> jost0;           // f(0;k) when known in closed form
  std::function<Complex(double, Complex)> phi;     // regular solution when known
};

struct ExampleProfile {
  RadialProfile profile;
  ExampleMetadata meta;
};

namespace detail {

/// Ex. 6.1 family: eps > 0, c != 0, sign(c) = sign(eps - 1), and x0 <= b.
inline ExampleProfile ex61_family(double eps, double c, double b, std::string name) {
  if (!(eps > 0.0) || c == 0.0 || eps == 1.0 || (eps > 1.0) != (c > 0.0) || !(b > 0.0))
    fail(ErrorCode::BadParams, "profiles", "ex61 needs eps>0, eps!=1, c!=0, sign(c)=sign(eps-1), b>0");
  const double x0 = (eps - 1.0) / (eps * c);
  const double y0 = (eps - 1.0) / c;
  if (x0 > b * (1 + 1e-14)) fail(ErrorCode::BadParams, "profiles", "ex61 breakpoint x0 exceeds b");
  std::vector<SegmentSpec> segs;
  if (std::abs(x0 - b) <= 1e-14 * b) {
    segs.push_back({0.0, b, RationalEx61Shape{eps, c}});
  } else {
    segs.push_back({0.0, x0, RationalEx61Shape{eps, c}});
    segs.push_back({x0, b, ConstantShape{1.0}});
  }
  ExampleMetadata m;
  m.name = std::move(name);
  m.a = y0 + b - x0;
  m.d = 1;
  const double em1 = eps - 1.0;
  m.gamma = -std::pow(em1, 4) / (3.0 * eps * eps * eps * c * c * c);
  const double w1 = em1 * em1 / (eps * c);
  const double w2 = (eps * eps - 1.0) / (eps * c);
  m.D = [=](Complex k) -> Complex {
    if (k == 0.0) return 0.0;
    if (std::abs(k) * std::max(std::abs(w1), std::abs(w2)) < 1.0) {
      // Taylor expansion of the bracket: the 1/k^2 prefactor cancels.
      const Complex k2 = k * k;
      auto series = [&](int terms) {
        // cos(k w1) - cos(k w2) - (2k/c) sin(k w1)
        Complex s = 0.0;
        Complex kp = k2;
        double fact = 2.0;
        for (int n = 1; n <= terms; ++n) {
          const double sign = (n % 2) ? -1.0 : 1.0;
          s += sign * (std::pow(w1, 2 * n) - std::pow(w2, 2 * n)) * kp / fact;
          s -= (2.0 / c) * sign * -1.0 * std::pow(w1, 2 * n - 1) * kp / (fact / (2 * n));
          kp *= k2;
          fact *= (2 * n + 1) * (2 * n + 2);
        }
        return s;
      };
      return c / (2.0 * eps * k2) * series(24);
    }
    return c / (2.0 * eps * k * k) *
           (std::cos(k * w1) - std::cos(k * w2) - (2.0 * k / c) * std::sin(k * w1));
  };
  const double gamma = m.gamma;
  m.E = [D = m.D, gamma](Complex k) { return D(k) / gamma; };
  m.jost0 = [=](Complex k) -> Complex {
    return std::exp(-I * k * w1) / (2.0 * eps * k) *
           ((2.0 * k + I * c) - I * c * std::exp(2.0 * I * k * em1 / c));
  };
  m.phi = [=](double x, Complex k) -> Complex {
    if (x <= x0) {
      const double u = eps * c * x + 1.0;
      return u / (eps * eps * k) * std::sin(eps * eps * k * x / u);
    }
    const double v1 = (1.0 - eps) * (1.0 - eps) / (eps * c);
    const double v2 = (1.0 - eps * eps) / (eps * c);
    // Matching value and slope at x0 gives twice the commonly printed constants.
    const Complex c3 = std::cos(k * v1) / (eps * k) +
                       c / (2.0 * eps * k * k) * (std::sin(k * v1) - std::sin(k * v2));
    const Complex c4 = std::sin(k * v1) / (eps * k) -
                       c / (2.0 * eps * k * k) * (std::cos(k * v1) - std::cos(k * v2));
    return c3 * std::sin(k * x) + c4 * std::cos(k * x);
  };
  return {make_piecewise_profile(b, segs), std::move(m)};
}

}  // namespace detail

/// The closed-form profiles used as oracles. ex62_first/ex62_second are the
/// eps = 2, c = 1/b and eps = 1/2, c = -1/b members of the ex61 family.
inline ExampleProfile example_profile(ExampleName name, const ExampleParams& prm = {}) {
  const double b = prm.b;
  switch (name) {
    case ExampleName::Ex61:
      return detail::ex61_family(prm.eps, prm.c, b, "ex61");
    case ExampleName::Ex62First: {
      auto ex = detail::ex61_family(2.0, 1.0 / b, b, "ex62_first");
      // E(k) = 12/(b^3 k) sin(bk/2) (1 - sin(bk)/(bk)), shared by both ex62 profiles.
      ex.meta.E = [b](Complex k) {
        if (std::abs(k) < 1e-8) return k * k;
        return 12.0 / (b * b * b * k) * std::sin(b * k / 2.0) * one_minus_sinc(b * k);
      };
      ex.meta.D = [E = ex.meta.E, g = ex.meta.gamma](Complex k) { return g * E(k); };
      return ex;
    }
    case ExampleName::Ex62Second: {
      auto ex = detail::ex61_family(0.5, -1.0 / b, b, "ex62_second");
      ex.meta.E = [b](Complex k) {
        if (std::abs(k) < 1e-8) return k * k;
        return 12.0 / (b * b * b * k) * std::sin(b * k / 2.0) * one_minus_sinc(b * k);
      };
      ex.meta.D = [E = ex.meta.E, g = ex.meta.gamma](Complex k) { return g * E(k); };
      return ex;
    }
    case ExampleName::Ex63: {
      const double c = prm.c;
      if (!(b > 0.0) || !(c > 0.0 || c < -b))
        fail(ErrorCode::BadParams, "profiles", "ex63 needs b>0 and either c>0 or c<-b");
      auto prof = make_piecewise_profile(b, {{0.0, b, PowerShape{(b + c) * (b + c), c, -2.0}}});
      ExampleMetadata m;
      m.name = "ex63";
      m.a = (b + c) * std::log1p(b / c);
      m.d = 1;
      const double u = b / c;
      m.gamma = c * c * c *
                (-2.0 / 3.0 * u * u * u - 3.0 * u * u - 2.0 * u + 2.0 * (1 + u) * (1 + u) * std::log1p(u));
      // Euler-equation solution written as c u^{1/2} L sinh(z)/z with u = 1 + x/c,
      // L = log u, z = (r+ - r-) L / 2, which stays finite when r+ = r-.
      auto phi_pair = [=](double x, Complex k) {
        const Complex disc = std::sqrt(Complex(1.0) - 4.0 * (b + c) * (b + c) * k * k);
        const double u = 1.0 + x / c;
        const double L = std::log(u);
        const Complex z = 0.5 * disc * L;
        const Complex shc = sinc(I * z);
        const double su = std::sqrt(u);
        const Complex val = c * su * L * shc;
        const Complex der = c / (x + c) * su * (0.5 * L * shc + std::cosh(z));
        return std::pair<Complex, Complex>{val, der};
      };
      m.phi = [phi_pair](double x, Complex k) { return phi_pair(x, k).first; };
      m.D = [=](Complex k) -> Complex {
        auto [ph, dph] = phi_pair(b, k);
        return sinc(k * b) * b * dph - std::cos(k * b) * ph;
      };
      m.E = [D = m.D, g = m.gamma](Complex k) { return D(k) / g; };
      return {std::move(prof), std::move(m)};
    }
  }
  fail(ErrorCode::BadParams, "profiles", "unknown example");
}

}  // namespace tev

#endif  // TEV_PROFILES_HPP
