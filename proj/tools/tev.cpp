#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tev/tev.hpp"

using namespace tev;

namespace {

enum Exit { kOk = 0, kValidation = 1, kUsage = 2, kIo = 3, kNumerical = 4 };

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
      return kIo;
    case ErrorCode::GapOrOverlap:
    case ErrorCode::DiscontinuousJunction:
    case ErrorCode::NonPositive:
    case ErrorCode::BadParams:
      return kValidation;
    default:
      return kNumerical;
  }
}

void report_error(const std::string& stage, const std::string& code, const std::string& message) {
  Json rec;
  rec["error"] = {{"stage", stage}, {"code", code}, {"message", message}};
  std::cerr << rec.dump() << std::endl;
}

/// Where the medium comes from: a profile file, a built-in example, or a potential file.
struct Source {
  std::string profile_path;
  std::string example;
  std::string potential_path;
  ExampleParams params;
  bool schrodinger = false;

  void add_options(CLI::App* app) {
    auto* p = app->add_option("--profile", profile_path, "profile JSON file");
    auto* e = app->add_option("--example", example, "built-in profile: ex61, ex62_first, ex62_second, ex63");
    auto* v = app->add_option("--potential", potential_path, "potential JSON file (Schrodinger picture)");
    p->excludes(e)->excludes(v);
    e->excludes(v);
    app->add_option("--b", params.b, "example parameter b")->check(CLI::PositiveNumber);
    app->add_option("--eps", params.eps, "example parameter eps (ex61)")->check(CLI::PositiveNumber);
    app->add_option("--c", params.c, "example parameter c (ex61, ex63)");
    app->add_flag("--schrodinger", schrodinger, "work with the Liouville-transformed potential");
  }

  bool has_profile() const { return !profile_path.empty() || !example.empty(); }

  RadialProfile profile() const {
    if (!profile_path.empty()) return read_profile(profile_path);
    if (!example.empty()) {
      const auto name = parse_example_name(example);
      if (!name) fail(ErrorCode::BadParams, "cli", "unknown example '" + example + "'");
      return example_profile(*name, params).profile;
    }
    fail(ErrorCode::BadParams, "cli", "one of --profile, --example or --potential is required");
  }

  bool use_potential() const { return !potential_path.empty() || schrodinger; }

  Potential potential() const {
    if (!potential_path.empty()) return read_potential(potential_path);
    return to_potential(profile());
  }
};

std::vector<double> half_grid(double kmax, std::size_t n, const std::vector<double>& extra) {
  if (!(kmax > 0.0)) fail(ErrorCode::BadParams, "cli", "--kmax must be positive");
  if (n < 2) fail(ErrorCode::BadParams, "cli", "--n must be at least 2");
  std::vector<double> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back(kmax * double(i) / double(n - 1));
  for (double k : extra) {
    if (!(k >= 0.0)) fail(ErrorCode::BadParams, "cli", "extra k values must be nonnegative");
    g.push_back(k);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

// ---------------------------------------------------------------------------

struct ForwardCmd {
  Source src;
  double kmax = 50.0;
  std::size_t n = 1001;
  std::vector<double> extra;
  std::string quantity = "D";
  std::string output;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("forward", "sample the dispersion function on k >= 0");
    src.add_options(c);
    c->add_option("--kmax", kmax, "largest k")->check(CLI::PositiveNumber);
    c->add_option("--n", n, "number of uniform points on [0, kmax]");
    c->add_option("--k", extra, "additional k values (breaks grid uniformity)");
    c->add_option("--quantity", quantity, "D, or E = D / gamma")->check(CLI::IsMember({"D", "E"}));
    c->add_option("-o,--output", output, "output file (default stdout)");
    c->callback([this] { run(); });
  }

  void run() {
    const auto grid = half_grid(kmax, n, extra);
    SampleFile f;
    ComplexFn D;
    std::optional<RadialProfile> prof;
    std::optional<Potential> pot;
    double scale;
    if (src.use_potential()) {
      pot = src.potential();
      D = [&pot](Complex k) { return dispersion_D_schrodinger(*pot, k); };
      f.meta["a"] = pot->a();
      scale = pot->a();
    } else {
      prof = src.profile();
      D = [&prof](Complex k) { return dispersion_D(*prof, k); };
      f.meta["b"] = prof->b();
      scale = prof->b();
    }
    double gamma = 1.0;
    if (quantity == "E") {
      const auto [d, g] = extract_gamma_d(D, 0.5 / scale);
      if (g == 0.0) fail(ErrorCode::GammaZero, "cli", "gamma = 0: E is undefined for the trivial medium");
      gamma = g;
      f.meta["d"] = d;
      f.meta["gamma"] = g;
    }
    f.quantity = src.use_potential() ? (quantity == "E" ? "Etilde" : "Dtilde") : quantity;
    f.samples.k = grid;
    f.samples.values.resize(grid.size());
    f.samples.symmetry = Symmetry::EvenInK;
    parallel_for(grid.size(), [&](std::size_t i) { f.samples.values[i] = D(grid[i]) / gamma; });
    emit(output, format_samples(f));
  }
};

struct EigsCmd {
  Source src;
  double kmax = 0.0;
  double im_band = 0.0;
  std::string output;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("eigs", "transmission eigenvalues with multiplicities, d and gamma");
    src.add_options(c);
    c->add_option("--kmax", kmax, "search window half-width in Re k (default 40/b)")->check(CLI::PositiveNumber);
    c->add_option("--im-band", im_band, "search window half-height in Im k (default 20/b)")->check(CLI::PositiveNumber);
    c->add_option("-o,--output", output, "output file (default stdout)");
    c->callback([this] { run(); });
  }

  void run() {
    EigenvalueSet es;
    if (src.use_potential()) {
      const auto V = src.potential();
      es = find_eigenvalues(V, SearchWindow{kmax > 0 ? kmax : 40.0 / V.a(), im_band > 0 ? im_band : 20.0 / V.a()});
    } else {
      const auto p = src.profile();
      es = find_eigenvalues(p, SearchWindow{kmax > 0 ? kmax : 40.0 / p.b(), im_band > 0 ? im_band : 20.0 / p.b()});
    }
    emit(output, format_eigenvalues(es));
  }
};

struct TransformCmd {
  Source src;
  std::string output;
  std::string table;
  std::size_t n = 1024;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("transform", "Liouville transform of a profile to its potential");
    src.add_options(c);
    c->add_option("-o,--output", output, "potential JSON file (default stdout)");
    c->add_option("--table", table, "plot table: columns x y rho V");
    c->add_option("--n", n, "samples for the table and the potential file");
    c->callback([this] { run(); });
  }

  void run() {
    if (n < 2) fail(ErrorCode::BadParams, "cli", "--n must be at least 2");
    const auto p = src.profile();
    const auto map = travel_time(p);
    const auto V = to_potential(p);
    const std::string pot = potential_to_json(V, n).dump(2) + "\n";
    std::string tab;
    if (!table.empty()) {
      std::ostringstream o;
      o << "# b: " << format_double(p.b()) << "\n# a: " << format_double(map.a()) << "\n# columns: x y rho V\n";
      for (std::size_t i = 0; i <= n; ++i) {
        const double x = p.b() * double(i) / double(n);
        const double y = map.forward(x);
        o << format_double(x) << ' ' << format_double(y) << ' ' << format_double(p.rho(x)) << ' '
          << format_double(V.smooth(y)) << '\n';
      }
      for (const auto& pp : V.point_parts())
        o << "# point_part: y = " << format_double(pp.y) << " weight = " << format_double(pp.weight) << "\n";
      tab = o.str();
    }
    emit(output, pot);
    if (!table.empty()) write_file(table, tab);
  }
};

struct ReconstructCmd {
  std::string samples_path;
  std::string eigs_path;
  std::string regime = "auto";
  double b = 0.0;
  double a = 0.0;
  double kmax = 500.0;
  std::size_t n = 8193;
  std::string output;
  std::string diagnostics;
  std::string curve;
  int nodes = 512;
  double max_truncation = 1e-3;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("reconstruct", "recover the profile (or potential) from spectral data");
    auto* s = c->add_option("--samples", samples_path, "sample file (quantity E, D or Dtilde)");
    auto* e = c->add_option("--eigs", eigs_path, "eigenvalue table; E is rebuilt by the product formula");
    s->excludes(e);
    c->add_option("--regime", regime, "auto, a_lt_b, a_eq_b or schrodinger")
        ->check(CLI::IsMember({"auto", "a_lt_b", "a_eq_b", "schrodinger"}));
    c->add_option("--b", b, "support radius b of the profile")->check(CLI::PositiveNumber);
    c->add_option("--a", a, "support bound a of the potential")->check(CLI::PositiveNumber);
    c->add_option("--kmax", kmax, "grid half-width when sampling the product formula")->check(CLI::PositiveNumber);
    c->add_option("--n", n, "points on [0, kmax] when sampling the product formula");
    c->add_option("--max-truncation", max_truncation, "largest accepted product truncation estimate (--eigs)")
        ->check(CLI::PositiveNumber);
    c->add_option("--nodes", nodes, "Marchenko intervals on [0, 2a]")->check(CLI::PositiveNumber);
    c->add_option("-o,--output", output, "recovered profile / potential JSON (default stdout)");
    c->add_option("--diagnostics", diagnostics, "per-stage diagnostics JSON");
    c->add_option("--curve", curve, "plot table: x rho, or y V");
    c->callback([this] { run(); });
  }

  void run() {
    if (samples_path.empty() && eigs_path.empty())
      fail(ErrorCode::BadParams, "cli", "one of --samples or --eigs is required");
    if (nodes % 2 != 0) fail(ErrorCode::BadParams, "cli", "--nodes must be even");
    SampleFile f;
    Json extra;
    if (!samples_path.empty()) {
      f = read_samples(samples_path);
    } else {
      const auto es = read_eigenvalues(eigs_path);
      auto [s, trunc] = samples_from_eigenvalues(es, symmetric_grid(kmax, 2 * n - 1));
      f.samples = std::move(s);
      f.quantity = "E";
      f.meta["gamma"] = es.gamma;
      extra["product_truncation_estimate"] = trunc;
      if (!(trunc <= max_truncation))
        fail(ErrorCode::GridTooShort, "reconstruct",
             "product truncation estimate " + format_double(trunc) + " exceeds " + format_double(max_truncation) +
                 ": the eigenvalue table is too short for --kmax; widen the eigenvalue window or lower --kmax");
      if (regime == "a_eq_b" || regime == "schrodinger") {
        for (auto& v : f.samples.values) v *= es.gamma;
        f.quantity = regime == "a_eq_b" ? "D" : "Dtilde";
      }
    }
    if (b <= 0.0 && f.meta.count("b")) b = f.meta.at("b");
    if (a <= 0.0 && f.meta.count("a")) a = f.meta.at("a");

    ReconstructOptions opt;
    opt.marchenko.nodes = nodes;
    std::string reg = regime;
    if (reg == "auto") {
      if (f.quantity == "Dtilde") {
        reg = "schrodinger";
      } else if (f.quantity == "E") {
        if (detail::envelope_slope(f.samples) < -0.7)
          fail(ErrorCode::Unsupported, "reconstruct",
               "E decays like 1/k^2 (a = b): this regime needs D = gamma E, not E alone");
        reg = "a_lt_b";
      } else if (f.quantity == "D") {
        if (b <= 0.0) fail(ErrorCode::BadParams, "cli", "--b is required");
        reg = std::string(to_string(classify_regime(f.samples, b)));
      } else {
        fail(ErrorCode::BadParams, "cli", "cannot reconstruct from quantity '" + f.quantity + "'");
      }
    }
    ReconstructionResult r;
    if (reg == "schrodinger") {
      if (a <= 0.0) fail(ErrorCode::BadParams, "cli", "--a is required for the Schrodinger pipeline");
      r = reconstruct_potential(f.samples, a, opt);
    } else {
      if (b <= 0.0) fail(ErrorCode::BadParams, "cli", "--b is required");
      if (reg == "a_lt_b") {
        r = reconstruct_a_lt_b(f.samples, b, opt);
        if (f.quantity == "D") {
          // With D as data the fitted amplitude absorbs gamma; recover it from the result.
          const RadialProfile& p = *r.profile;
          r.gamma = extract_gamma_d([&p](Complex k) { return dispersion_D(p, k); }, 0.5 / b).second;
        }
      } else {
        r = reconstruct_a_eq_b(f.samples, b, opt);
      }
    }

    std::string body, curve_text;
    std::ostringstream c;
    if (r.profile) {
      body = profile_to_json(*r.profile).dump(2) + "\n";
      c << "# columns: x rho\n";
      const double bb = r.profile->b();
      for (int i = 0; i <= 1000; ++i) {
        const double x = bb * i / 1000.0;
        c << format_double(x) << ' ' << format_double(r.profile->rho(x)) << '\n';
      }
    } else {
      body = potential_to_json(*r.potential).dump(2) + "\n";
      c << "# columns: y V\n";
      for (const auto& pp : r.potential->point_parts())
        c << "# point_part: y = " << format_double(pp.y) << " weight = " << format_double(pp.weight) << "\n";
      for (int i = 0; i <= 1000; ++i) {
        const double y = r.a * i / 1000.0;
        c << format_double(y) << ' ' << format_double(r.potential->smooth(y)) << '\n';
      }
    }
    curve_text = c.str();

    Json d;
    d["regime"] = std::string(to_string(r.regime));
    d["gamma"] = r.gamma;
    d["a"] = r.a;
    if (std::isfinite(r.b)) d["b"] = r.b;
    Json bs = Json::array();
    for (const auto& s : r.bound_states) bs.push_back({{"beta", s.beta}, {"c", s.c}});
    d["bound_states"] = bs;
    Json stages = extra.is_null() ? Json::object() : extra;
    for (const auto& [k, v] : r.diagnostics) stages[k] = v;
    d["diagnostics"] = stages;

    emit(output, body);
    if (!diagnostics.empty()) write_file(diagnostics, d.dump(2) + "\n");
    else std::cerr << d.dump() << std::endl;
    if (!curve.empty()) write_file(curve, curve_text);
  }
};

struct ValidateCmd {
  std::string only;
  int failures = 0;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("validate", "compare against the built-in closed forms");
    c->add_option("--only", only, "run a single group: ex61, ex62, ex63, nonuniqueness, example55, reconstruct_ex62, regimes");
    c->callback([this] { run(); });
  }

  void run() {
    bool matched = false;
    for (const auto& g : validation_suite()) {
      if (!only.empty() && g.name != only) continue;
      matched = true;
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<CheckResult> res;
      try {
        res = g.run();
      } catch (const Error& e) {
        res.push_back({g.name + ".error", 0.0, 0.0, false, std::string(to_string(e.code())) + ": " + e.what()});
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (const auto& r : res) {
        std::printf("%s  %-42s measured %-12.4g tol %.3g", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.measured,
                    r.tolerance);
        if (!r.detail.empty()) std::printf("  %s", r.detail.c_str());
        std::printf("\n");
        failures += !r.passed;
      }
      std::printf("      group %s: %.2f s\n", g.name.c_str(), secs);
    }
    if (!matched) fail(ErrorCode::BadParams, "cli", "unknown validation group '" + only + "'");
    std::printf("%s: %d failing check(s)\n", failures ? "FAILED" : "OK", failures);
  }
};

struct NonuniquenessCmd {
  double b = 1.0;
  std::string output;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("nonuniqueness", "two profiles with the same E(k) but different (gamma, a)");
    c->add_option("--b", b, "support radius")->check(CLI::PositiveNumber);
    c->add_option("-o,--output", output, "report JSON (default stdout)");
    c->callback([this] { run(); });
  }

  void run() {
    const auto rep = demonstrate_nonuniqueness(b);
    Json j;
    j["b"] = rep.b;
    j["max_relative_difference_E"] = rep.max_relative_difference;
    j["ex62_first"] = {{"gamma", rep.gamma_first}, {"a", rep.a_first}};
    j["ex62_second"] = {{"gamma", rep.gamma_second}, {"a", rep.a_second}};
    j["delta_potential"] = {{"a", rep.schrodinger_a},
                            {"max_relative_difference_E", rep.schrodinger_max_relative_difference},
                            {"gamma_tilde_c1", rep.gamma_tilde_c1},
                            {"gamma_tilde_c3", rep.gamma_tilde_c3}};
    emit(output, j.dump(2) + "\n");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission eigenvalues of radial media and their inverse problem"};
  app.require_subcommand(1);
  ForwardCmd forward;
  EigsCmd eigs;
  TransformCmd transform;
  ReconstructCmd reconstruct;
  ValidateCmd validate;
  NonuniquenessCmd nonuniq;
  forward.setup(app);
  eigs.setup(app);
  transform.setup(app);
  reconstruct.setup(app);
  validate.setup(app);
  nonuniq.setup(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    report_error(e.stage(), std::string(to_string(e.code())), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report_error("cli", "Internal", e.what());
    return kNumerical;
  }
  return validate.failures > 0 ? kValidation : kOk;
}
