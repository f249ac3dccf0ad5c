#ifndef TEV_IO_HPP
#define TEV_IO_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tev/error.hpp"
#include "tev/forward.hpp"
#include "tev/profiles.hpp"

namespace tev {

using Json = nlohmann::ordered_json;

inline constexpr const char* kProfileSchema = "tev-profile/1";
inline constexpr const char* kPotentialSchema = "tev-potential/1";
inline constexpr const char* kSamplesSchema = "tev-samples/1";
inline constexpr const char* kEigsSchema = "tev-eigs/1";

/// %.17g: enough digits for every double to read back exactly.
inline std::string format_double(double v) {
  char buf[40];
  if (v == 0.0) v = 0.0;
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "io", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes the whole content at once, so a failed command leaves no partial file.
inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "io", "cannot write " + path);
  out << content;
  if (!out) fail(ErrorCode::IoError, "io", "write failed for " + path);
}

namespace detail {

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::ParseError, "io", what + ": " + e.what());
  }
}

inline double get_number(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_number())
    fail(ErrorCode::ParseError, "io", what + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

inline std::vector<double> get_array(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_array())
    fail(ErrorCode::ParseError, "io", what + ": missing array field '" + key + "'");
  std::vector<double> v;
  for (const auto& e : j.at(key)) {
    if (!e.is_number()) fail(ErrorCode::ParseError, "io", what + ": non-numeric entry in '" + key + "'");
    v.push_back(e.get<double>());
  }
  return v;
}

inline void check_schema(const Json& j, const char* schema, const std::string& what) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "io", what + ": expected a JSON object");
  if (!j.contains("schema") || j.at("schema") != schema)
    fail(ErrorCode::ParseError, "io", what + ": schema tag must be \"" + std::string(schema) + "\"");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Profiles

inline Json profile_to_json(const RadialProfile& p) {
  Json j;
  j["schema"] = kProfileSchema;
  j["b"] = p.b();
  Json segs = Json::array();
  for (const auto& s : p.segments()) {
    Json e;
    e["x_lo"] = s.spec.x_lo;
    e["x_hi"] = s.spec.x_hi;
    e["kind"] = shape_kind(s.spec.shape);
    std::visit(
        [&e](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, ConstantShape>) {
            e["rho"] = sh.value;
          } else if constexpr (std::is_same_v<T, RationalEx61Shape>) {
            e["eps"] = sh.eps;
            e["c"] = sh.c;
          } else if constexpr (std::is_same_v<T, PowerShape>) {
            e["scale"] = sh.scale;
            e["shift"] = sh.shift;
            e["exponent"] = sh.exponent;
          } else if constexpr (std::is_same_v<T, TableShape>) {
            e["x"] = sh.x;
            e["rho"] = sh.rho;
          } else {
            e["amplitude"] = sh.amplitude;
          }
        },
        s.spec.shape);
    segs.push_back(std::move(e));
  }
  j["segments"] = std::move(segs);
  return j;
}

/// Accepts the segment form or {"schema", "example": name, "params": {b, eps, c}}.
inline RadialProfile profile_from_json(const Json& j) {
  const std::string what = "profile";
  detail::check_schema(j, kProfileSchema, what);
  if (j.contains("example")) {
    const auto name = parse_example_name(j.at("example").get<std::string>());
    if (!name) fail(ErrorCode::ParseError, "io", "unknown example '" + j.at("example").get<std::string>() + "'");
    ExampleParams prm;
    if (j.contains("params")) {
      const auto& q = j.at("params");
      if (q.contains("b")) prm.b = detail::get_number(q, "b", what);
      if (q.contains("eps")) prm.eps = detail::get_number(q, "eps", what);
      if (q.contains("c")) prm.c = detail::get_number(q, "c", what);
    }
    return example_profile(*name, prm).profile;
  }
  const double b = detail::get_number(j, "b", what);
  if (!j.contains("segments") || !j.at("segments").is_array())
    fail(ErrorCode::ParseError, "io", "profile: missing 'segments' array");
  std::vector<SegmentSpec> specs;
  for (const auto& e : j.at("segments")) {
    SegmentSpec s;
    s.x_lo = detail::get_number(e, "x_lo", what);
    s.x_hi = detail::get_number(e, "x_hi", what);
    if (!e.contains("kind") || !e.at("kind").is_string()) fail(ErrorCode::ParseError, "io", "profile: segment without kind");
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "constant") {
      s.shape = ConstantShape{detail::get_number(e, "rho", what)};
    } else if (kind == "rational_ex61") {
      s.shape = RationalEx61Shape{detail::get_number(e, "eps", what), detail::get_number(e, "c", what)};
    } else if (kind == "power") {
      s.shape = PowerShape{detail::get_number(e, "scale", what), detail::get_number(e, "shift", what),
                           detail::get_number(e, "exponent", what)};
    } else if (kind == "table") {
      s.shape = TableShape{detail::get_array(e, "x", what), detail::get_array(e, "rho", what)};
    } else if (kind == "raised_cosine" || kind == "sqrt_raised_cosine") {
      s.shape = RaisedCosineShape{detail::get_number(e, "amplitude", what), kind == "sqrt_raised_cosine"};
    } else {
      fail(ErrorCode::ParseError, "io", "profile: unknown segment kind '" + kind + "'");
    }
    specs.push_back(std::move(s));
  }
  return make_piecewise_profile(b, std::move(specs));
}

inline RadialProfile read_profile(const std::string& path) {
  return profile_from_json(detail::parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Potentials

/// Potentials built from segments are written exactly; any other smooth part
/// is sampled on `samples` + 1 uniform points as a linear table.
inline Json potential_to_json(const Potential& V, std::size_t samples = 1024) {
  Json j;
  j["schema"] = kPotentialSchema;
  j["a"] = V.a();
  Json segs = Json::array();
  auto table = [](double lo, double hi, const std::vector<double>& y, const std::vector<double>& v) {
    Json e;
    e["y_lo"] = lo;
    e["y_hi"] = hi;
    e["kind"] = "table";
    e["y"] = y;
    e["v"] = v;
    return e;
  };
  if (V.segments()) {
    for (const auto& s : *V.segments()) {
      if (const double* c = std::get_if<double>(&s.shape)) {
        Json e;
        e["y_lo"] = s.y_lo;
        e["y_hi"] = s.y_hi;
        e["kind"] = "constant";
        e["v"] = *c;
        segs.push_back(std::move(e));
      } else {
        const auto& t = std::get<TableShape>(s.shape);
        segs.push_back(table(s.y_lo, s.y_hi, t.x, t.rho));
      }
    }
  } else {
    std::vector<double> y, v;
    for (std::size_t i = 0; i <= samples; ++i) {
      const double yi = V.a() * double(i) / double(samples);
      y.push_back(yi);
      // One-sided limits at the ends of the support.
      const double probe = i == 0 ? 1e-12 * V.a() : (i == samples ? V.a() * (1 - 1e-12) : yi);
      v.push_back(V.smooth(probe));
    }
    segs.push_back(table(0.0, V.a(), y, v));
  }
  j["segments"] = std::move(segs);
  Json pts = Json::array();
  for (const auto& p : V.point_parts()) pts.push_back({{"y", p.y}, {"weight", p.weight}});
  j["point_parts"] = std::move(pts);
  return j;
}

/// Accepts the segment form or {"schema", "example": "delta" | "square_well", ...}.
inline Potential potential_from_json(const Json& j) {
  const std::string what = "potential";
  detail::check_schema(j, kPotentialSchema, what);
  if (j.contains("example")) {
    const std::string name = j.at("example").get<std::string>();
    const double a = detail::get_number(j, "a", what);
    if (name == "delta") return delta_potential(detail::get_number(j, "c", what), a);
    if (name == "square_well") return square_well(detail::get_number(j, "depth", what), a);
    fail(ErrorCode::ParseError, "io", "unknown potential example '" + name + "'");
  }
  const double a = detail::get_number(j, "a", what);
  std::vector<PotentialSegment> segs;
  if (j.contains("segments")) {
    for (const auto& e : j.at("segments")) {
      PotentialSegment s;
      s.y_lo = detail::get_number(e, "y_lo", what);
      s.y_hi = detail::get_number(e, "y_hi", what);
      const std::string kind = e.value("kind", "");
      if (kind == "constant") {
        s.shape = detail::get_number(e, "v", what);
      } else if (kind == "table") {
        s.shape = TableShape{detail::get_array(e, "y", what), detail::get_array(e, "v", what)};
      } else {
        fail(ErrorCode::ParseError, "io", "potential: unknown segment kind '" + kind + "'");
      }
      segs.push_back(std::move(s));
    }
  }
  if (segs.empty()) segs.push_back({0.0, a, 0.0});
  std::vector<PointPart> pts;
  if (j.contains("point_parts"))
    for (const auto& e : j.at("point_parts"))
      pts.push_back({detail::get_number(e, "y", what), detail::get_number(e, "weight", what)});
  return make_potential(a, std::move(segs), std::move(pts));
}

inline Potential read_potential(const std::string& path) {
  return potential_from_json(detail::parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Text tables: "# key: value" header lines, then whitespace-separated rows.

struct TextTable {
  std::map<std::string, std::string> header;
  std::vector<std::vector<double>> rows;
};

inline TextTable parse_text_table(const std::string& text, const char* schema, const std::string& what) {
  TextTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      t.header[trim(line.substr(1, colon - 1))] = trim(line.substr(colon + 1));
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, "io", what + ": bad number '" + tok + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header["schema"] != schema)
    fail(ErrorCode::ParseError, "io", what + ": header must declare '# schema: " + std::string(schema) + "'");
  return t;
}

inline double header_number(const TextTable& t, const std::string& key, const std::string& what) {
  auto it = t.header.find(key);
  if (it == t.header.end()) fail(ErrorCode::ParseError, "io", what + ": missing header field '" + key + "'");
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "io", what + ": header field '" + key + "' is not a number");
  }
}

// ---------------------------------------------------------------------------
// Spectral samples

/// Quantity tags: D (wave dispersion function), E (normalized), Dtilde
/// (Schrodinger analog), f0 (Jost function at the origin).
struct SampleFile {
  std::string quantity = "D";
  SpectralSamples samples;
  std::map<std::string, double> meta;  // b, a, gamma ... when known
};

/// Even or conjugate-symmetric data are written on k >= 0 only.
inline std::string format_samples(const SampleFile& f) {
  const auto& s = f.samples;
  std::ostringstream o;
  o << "# schema: " << kSamplesSchema << "\n";
  o << "# quantity: " << f.quantity << "\n";
  const char* sym = s.symmetry == Symmetry::EvenInK ? "even"
                    : s.symmetry == Symmetry::ConjugateSymmetric ? "conjugate"
                                                                 : "none";
  o << "# symmetry: " << sym << "\n";
  for (const auto& [k, v] : f.meta) o << "# " << k << ": " << format_double(v) << "\n";
  const bool half = s.symmetry != Symmetry::None;
  std::size_t count = 0;
  for (double k : s.k)
    if (!half || k >= 0.0) ++count;
  o << "# points: " << count << "\n";
  o << "# columns: k re im\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (half && s.k[i] < 0.0) continue;
    o << format_double(s.k[i]) << ' ' << format_double(s.values[i].real()) << ' '
      << format_double(s.values[i].imag()) << '\n';
  }
  return o.str();
}

/// Half-grid data with symmetry even/conjugate are mirrored to k < 0.
inline SampleFile parse_samples(const std::string& text, const std::string& what = "samples") {
  const auto t = parse_text_table(text, kSamplesSchema, what);
  SampleFile f;
  f.quantity = t.header.count("quantity") ? t.header.at("quantity") : "D";
  const std::string sym = t.header.count("symmetry") ? t.header.at("symmetry") : "none";
  if (sym == "even") f.samples.symmetry = Symmetry::EvenInK;
  else if (sym == "conjugate") f.samples.symmetry = Symmetry::ConjugateSymmetric;
  else if (sym == "none") f.samples.symmetry = Symmetry::None;
  else fail(ErrorCode::ParseError, "io", what + ": unknown symmetry '" + sym + "'");
  for (const auto& [k, v] : t.header) {
    if (k == "schema" || k == "quantity" || k == "symmetry" || k == "columns" || k == "points") continue;
    try {
      f.meta[k] = std::stod(v);
    } catch (const std::exception&) {
    }
  }
  std::vector<double> ks;
  std::vector<Complex> vs;
  for (const auto& r : t.rows) {
    if (r.size() != 3) fail(ErrorCode::ParseError, "io", what + ": rows need 3 columns (k re im)");
    ks.push_back(r[0]);
    vs.push_back({r[1], r[2]});
  }
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (!(ks[i] > ks[i - 1])) fail(ErrorCode::ParseError, "io", what + ": k must be strictly increasing");
  if (f.samples.symmetry != Symmetry::None && !ks.empty() && ks.front() == 0.0) {
    const bool even = f.samples.symmetry == Symmetry::EvenInK;
    for (std::size_t i = ks.size(); i-- > 1;) {
      f.samples.k.push_back(-ks[i]);
      f.samples.values.push_back(even ? vs[i] : std::conj(vs[i]));
    }
  }
  f.samples.k.insert(f.samples.k.end(), ks.begin(), ks.end());
  f.samples.values.insert(f.samples.values.end(), vs.begin(), vs.end());
  return f;
}

inline SampleFile read_samples(const std::string& path) { return parse_samples(read_file(path), path); }

// ---------------------------------------------------------------------------
// Eigenvalue tables

inline std::string format_eigenvalues(const EigenvalueSet& es) {
  std::ostringstream o;
  o << "# schema: " << kEigsSchema << "\n";
  o << "# d: " << es.d << "\n";
  o << "# gamma: " << format_double(es.gamma) << "\n";
  o << "# k_max: " << format_double(es.window.k_max) << "\n";
  o << "# im_band: " << format_double(es.window.im_band) << "\n";
  o << "# zeros: " << es.zeros.size() << "\n";
  o << "# columns: re im multiplicity\n";
  for (const auto& z : es.zeros)
    o << format_double(z.k.real()) << ' ' << format_double(z.k.imag()) << ' ' << z.multiplicity << '\n';
  return o.str();
}

inline EigenvalueSet parse_eigenvalues(const std::string& text, const std::string& what = "eigenvalues") {
  const auto t = parse_text_table(text, kEigsSchema, what);
  EigenvalueSet es;
  es.d = int(header_number(t, "d", what));
  es.gamma = header_number(t, "gamma", what);
  if (t.header.count("k_max")) es.window.k_max = header_number(t, "k_max", what);
  if (t.header.count("im_band")) es.window.im_band = header_number(t, "im_band", what);
  for (const auto& r : t.rows) {
    if (r.size() != 3) fail(ErrorCode::ParseError, "io", what + ": rows need 3 columns (re im multiplicity)");
    if (r[2] < 1 || r[2] != std::floor(r[2])) fail(ErrorCode::ParseError, "io", what + ": bad multiplicity");
    es.zeros.push_back({Complex(r[0], r[1]), int(r[2])});
  }
  return es;
}

inline EigenvalueSet read_eigenvalues(const std::string& path) { return parse_eigenvalues(read_file(path), path); }

}  // namespace tev

#endif  // TEV_IO_HPP
