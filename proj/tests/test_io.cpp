#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "tev/io.hpp"

using namespace tev;

namespace {

std::string data_path(const std::string& name) {
  const char* dir = std::getenv("TEV_DATA_DIR");
  return std::string(dir ? dir : "data") + "/" + name;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Unsupported;
}

}  // namespace

TEST(ProfileJson, RoundTripAllShapeKinds) {
  const std::vector<double> xs{0.5, 0.6, 0.7, 0.8};
  const std::vector<double> rs{1.0, 2.5, 2.2, 1.0};
  auto p = make_piecewise_profile(
      0.8, {{0.0, 0.1, ConstantShape{1.0}},
            {0.1, 0.2, RaisedCosineShape{1.0, true}},
            {0.2, 0.3, RaisedCosineShape{0.5, false}},
            {0.3, 0.5, PowerShape{1.0, 0.0, 0.0}},
            {0.5, 0.8, TableShape{xs, rs}}});
  const std::string text = profile_to_json(p).dump(2);
  const auto q = profile_from_json(Json::parse(text));
  EXPECT_EQ(profile_to_json(q).dump(2), text);
  for (int i = 0; i <= 80; ++i) EXPECT_EQ(q.rho(0.01 * i), p.rho(0.01 * i));
}

TEST(ProfileJson, ExampleShorthandAndErrors) {
  const auto p = profile_from_json(
      Json::parse(R"({"schema":"tev-profile/1","example":"ex62_second","params":{"b":2}})"));
  EXPECT_DOUBLE_EQ(p.b(), 2.0);
  EXPECT_EQ(code_of([] { read_profile("/nonexistent/profile.json"); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([] { profile_from_json(Json::parse(R"({"schema":"tev-profile/9","b":1})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] {
              profile_from_json(Json::parse(
                  R"({"schema":"tev-profile/1","b":1,"segments":[{"x_lo":0,"x_hi":0.5,"kind":"constant","rho":1}]})"));
            }),
            ErrorCode::GapOrOverlap);
}

TEST(PotentialJson, RoundTripWithPointParts) {
  const auto V = delta_potential(2.0, 1.0);
  const auto W = potential_from_json(Json::parse(potential_to_json(V).dump()));
  ASSERT_EQ(W.point_parts().size(), 1u);
  EXPECT_DOUBLE_EQ(W.point_parts()[0].y, 1.0);
  EXPECT_DOUBLE_EQ(W.point_parts()[0].weight, 2.0);
  const auto S = potential_from_json(Json::parse(potential_to_json(square_well(9.0, 1.0)).dump()));
  EXPECT_DOUBLE_EQ(S.smooth(0.5), -9.0);
}

TEST(SamplesText, HalfGridIsMirrored) {
  SampleFile f;
  f.quantity = "E";
  f.meta["b"] = 1.0;
  f.samples = sample_function([](Complex k) { return std::cos(k) + Complex(0.0, 0.0); },
                              symmetric_grid(4.0, 9), Symmetry::EvenInK);
  const std::string text = format_samples(f);
  EXPECT_NE(text.find("# points: 5"), std::string::npos);
  const auto g = parse_samples(text);
  EXPECT_EQ(g.quantity, "E");
  EXPECT_DOUBLE_EQ(g.meta.at("b"), 1.0);
  ASSERT_EQ(g.samples.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(g.samples.k[i], f.samples.k[i]);
    EXPECT_EQ(g.samples.values[i], f.samples.values[i]);
  }
  EXPECT_EQ(format_samples(g), text);
  EXPECT_EQ(code_of([] { parse_samples("# schema: tev-samples/1\n0 1\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_samples("# schema: tev-samples/1\n0 1 0\n0 2 0\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_samples("0 1 0\n"); }), ErrorCode::ParseError);
}

TEST(FormatDouble, NegativeZeroAndRoundTrip) {
  EXPECT_EQ(format_double(-0.0), "0");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(CanonicalData, FilesParse) {
  const auto p = read_profile(data_path("ex62_second.profile.json"));
  EXPECT_DOUBLE_EQ(p.b(), 1.0);
  const auto V = read_potential(data_path("square_well.potential.json"));
  EXPECT_DOUBLE_EQ(V.a(), 1.0);
  const auto s = read_samples(data_path("ex62_second.D.txt"));
  EXPECT_EQ(s.quantity, "D");
  EXPECT_EQ(s.samples.size(), 401u);
  const auto es = read_eigenvalues(data_path("ex62_second.eigs.txt"));
  EXPECT_EQ(es.d, 1);
  EXPECT_NEAR(es.gamma, 1.0 / 6.0, 1e-6);
  EXPECT_EQ(es.zeros.size(), 14u);
  EXPECT_EQ(format_eigenvalues(es), read_file(data_path("ex62_second.eigs.txt")));
}
