#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "tev/io.hpp"

#ifndef TEV_CLI_PATH
#error "TEV_CLI_PATH must point at the tev executable"
#endif

using namespace tev;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("tev_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd =
      std::string(TEV_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(out.string());
  r.err = read_file(err.string());
  return r;
}

std::string data(const std::string& name) {
  const char* dir = std::getenv("TEV_DATA_DIR");
  return std::string(dir ? dir : "data") + "/" + name;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  const auto p = (scratch() / name).string();
  write_file(p, text);
  return p;
}

Json error_record(const Run& r) { return Json::parse(r.err).at("error"); }

struct ScratchCleanup : ::testing::Environment {
  void TearDown() override { fs::remove_all(scratch()); }
};
const auto* cleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

}  // namespace

TEST(CliForward, EigenvalueRowVanishes) {
  const auto r = run("forward --profile " + data("ex62_second.profile.json") + " --kmax 50 --k 6.283185307179586");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto f = parse_samples(r.out);
  EXPECT_DOUBLE_EQ(f.meta.at("b"), 1.0);
  bool found = false;
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    if (f.samples.k[i] == 2.0 * pi) {
      found = true;
      EXPECT_LE(std::abs(f.samples.values[i]), 1e-8);
    }
  EXPECT_TRUE(found);
}

TEST(CliForward, TrivialMediumGivesZeroColumn) {
  const auto prof = write_scratch(
      "one.json", R"({"schema":"tev-profile/1","b":1,"segments":[{"x_lo":0,"x_hi":1,"kind":"constant","rho":1}]})");
  const auto r = run("forward --profile " + prof + " --n 11");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto f = parse_samples(r.out);
  ASSERT_EQ(f.samples.size(), 21u);
  for (const auto& v : f.samples.values) EXPECT_EQ(v, Complex(0.0));
}

TEST(CliForward, MissingFileIsIoErrorWithoutOutput) {
  const auto out = scratch() / "never.txt";
  fs::remove(out);
  const auto r = run("forward --profile /nonexistent/ex.json -o " + out.string());
  EXPECT_EQ(r.status, 3);
  EXPECT_EQ(error_record(r).at("code"), "IoError");
  EXPECT_EQ(error_record(r).at("stage"), "io");
  EXPECT_FALSE(fs::exists(out));
}

TEST(CliForward, UsageErrorsAndDeterminism) {
  EXPECT_EQ(run("forward --no-such-flag").status, 2);
  EXPECT_EQ(run("").status, 2);
  const auto a = run("forward --example ex63 --n 41 --quantity E");
  const auto b = run("forward --example ex63 --n 41 --quantity E");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(CliEigs, Example62First) {
  const auto r = run("eigs --example ex62_first --kmax 20 --im-band 6");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto es = parse_eigenvalues(r.out);
  EXPECT_EQ(es.d, 1);
  EXPECT_NEAR(es.gamma, -1.0 / 24.0, 1e-6);
  for (int n = 1; n <= 3; ++n) {
    int hits = 0;
    for (const auto& z : es.zeros)
      if (std::abs(z.k - 2.0 * n * pi) < 1e-6) {
        ++hits;
        EXPECT_EQ(z.multiplicity, 1);
      }
    EXPECT_EQ(hits, 1) << "zero at " << 2 * n << " pi";
  }
}

TEST(CliEigs, DeltaPotentialDoubleZeros) {
  const auto pot = write_scratch("delta.json", R"({"schema":"tev-potential/1","example":"delta","a":1,"c":2})");
  const auto r = run("eigs --potential " + pot + " --kmax 10 --im-band 4");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto es = parse_eigenvalues(r.out);
  EXPECT_EQ(es.d, 0);
  EXPECT_NEAR(es.gamma, 2.0, 1e-8);
  ASSERT_EQ(es.zeros.size(), 6u);
  for (const auto& z : es.zeros) {
    EXPECT_NEAR(std::abs(z.k.real()) / pi, std::round(std::abs(z.k.real()) / pi), 1e-8);
    EXPECT_EQ(z.multiplicity, 2);
  }
}

TEST(CliEigs, TrivialMediumIsGammaZero) {
  const auto prof = write_scratch(
      "one.json", R"({"schema":"tev-profile/1","b":1,"segments":[{"x_lo":0,"x_hi":1,"kind":"constant","rho":1}]})");
  const auto r = run("eigs --profile " + prof);
  EXPECT_EQ(r.status, 4);
  EXPECT_EQ(error_record(r).at("code"), "GammaZero");
  EXPECT_NE(error_record(r).at("message").get<std::string>().find("trivial medium"), std::string::npos);
}

TEST(CliReconstruct, LargeTravelTimeIsUnsupported) {
  const auto d = (scratch() / "d61.txt").string();
  ASSERT_EQ(run("forward --example ex61 --kmax 500 --n 2049 -o " + d).status, 0);
  const auto r = run("reconstruct --samples " + d);
  EXPECT_EQ(r.status, 4);
  EXPECT_EQ(error_record(r).at("code"), "Unsupported");
  EXPECT_NE(error_record(r).at("message").get<std::string>().find("open problem"), std::string::npos);
}

TEST(CliReconstruct, DeltaPotentialPointPart) {
  const auto pot = write_scratch("delta.json", R"({"schema":"tev-potential/1","example":"delta","a":1,"c":2})");
  const auto d = (scratch() / "dt.txt").string();
  ASSERT_EQ(run("forward --potential " + pot + " --kmax 500 --n 8193 -o " + d).status, 0);
  const auto diag = (scratch() / "diag.json").string();
  const auto r = run("reconstruct --samples " + d + " --diagnostics " + diag);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto V = potential_from_json(Json::parse(r.out));
  ASSERT_EQ(V.point_parts().size(), 1u);
  EXPECT_NEAR(V.point_parts()[0].y, 1.0, 1e-3);
  EXPECT_NEAR(V.point_parts()[0].weight, 2.0, 1e-2);
  const auto dj = Json::parse(read_file(diag));
  EXPECT_EQ(dj.at("regime"), "schrodinger");
  EXPECT_TRUE(dj.at("diagnostics").contains("forward_roundtrip"));
}

TEST(CliReconstruct, Example62SecondFromE) {
  const auto e = (scratch() / "e.txt").string();
  ASSERT_EQ(run("forward --example ex62_second --kmax 500 --n 8193 --quantity E -o " + e).status, 0);
  const auto diag = (scratch() / "diag62.json").string();
  const auto r = run("reconstruct --samples " + e + " --b 1 --diagnostics " + diag);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto p = profile_from_json(Json::parse(r.out));
  const auto exact = profile_from_json(Json::parse(read_file(data("ex62_second.profile.json"))));
  double err = 0.0;
  for (int i = 0; i <= 950; ++i) err = std::max(err, std::abs(p.rho(i / 1000.0) - exact.rho(i / 1000.0)));
  EXPECT_LE(err, 1e-2);
  const auto dj = Json::parse(read_file(diag));
  EXPECT_NEAR(dj.at("a").get<double>(), 0.5, 1e-3);
  EXPECT_NEAR(dj.at("gamma").get<double>(), 1.0 / 6.0, 1e-3);
}

TEST(CliValidate, OnlyGroupAndUnknownGroup) {
  const auto r = run("validate --only ex63");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("PASS  ex63.gamma"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(run("validate --only no_such_group").status, 0);
}

TEST(CliNonuniqueness, Report) {
  const auto r = run("nonuniqueness");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_LE(j.at("max_relative_difference_E").get<double>(), 1e-9);
  EXPECT_NEAR(j.at("ex62_first").at("gamma").get<double>(), -1.0 / 24.0, 1e-6);
  EXPECT_NEAR(j.at("ex62_second").at("a").get<double>(), 0.5, 1e-6);
}
