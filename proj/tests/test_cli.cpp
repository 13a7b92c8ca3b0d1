#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stekiso_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(STEKISO_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

fs::path config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scene.cfg";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, GassmannCheck) {
  const auto d = scratch("gassmann");
  ASSERT_EQ(run("gassmann-check --out " + d.string()), 0);
  const auto j = load(d / "gassmann.json");
  EXPECT_EQ(j["order"], 168);
  EXPECT_EQ(j["index"], 7);
  EXPECT_TRUE(j["almost_conjugate"].get<bool>());
  EXPECT_FALSE(j["conjugate"].get<bool>());
  EXPECT_EQ(j["conjugators_tested"], 168);
}

TEST(Cli, DiskSpectrumStartsAtZero) {
  const auto d = scratch("disk");
  const auto cfg = config(d, "# polygonal disk\nscene = disk\nrefinement = 4\nk = 7\nalpha = 0\n");
  ASSERT_EQ(run("spectrum --config " + cfg.string() + " --out " + d.string()), 0);
  std::ifstream f(d / "spectrum_disk64.csv");
  std::string header, first;
  std::getline(f, header);
  std::getline(f, first);
  EXPECT_EQ(header, "index,eigenvalue,problem,alpha,sigma,refinement");
  std::stringstream row(first);
  std::string idx, value;
  std::getline(row, idx, ',');
  std::getline(row, value, ',');
  EXPECT_EQ(idx, "0");
  EXPECT_NEAR(std::stod(value), 0.0, 1e-10);
  EXPECT_TRUE(fs::exists(d / "ladder_disk64.svg"));
}

TEST(Cli, CompareBuserPairPasses) {
  const auto d = scratch("compare");
  ASSERT_EQ(run("compare --out " + d.string() + " --k 12 --alpha 0,1.5 --refine 2"), 0);
  const auto j = load(d / "compare.json");
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["points"].size(), 2u);
  EXPECT_LE(j["max_discrepancy"].get<double>(), 1e-8);
  EXPECT_TRUE(fs::exists(d / "overlay_0.svg"));
}

TEST(Cli, RobinAndTransplantOnMixedPair) {
  const auto d = scratch("mixed");
  const auto cfg = config(d, "scene = mixed-P\nrefinement = 3\nproblem = robin\nsigma = 0.5, 2\nk = 8\n");
  ASSERT_EQ(run("compare --config " + cfg.string() + " --out " + d.string()), 0);
  EXPECT_TRUE(load(d / "compare.json")["pass"].get<bool>());
  ASSERT_EQ(run("transplant-check --config " + cfg.string() + " --out " + d.string()), 0);
  EXPECT_LE(load(d / "transplant.json")["max_residual"].get<double>(), 1e-12);
}

TEST(Cli, ArtifactsAreByteIdentical) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& d : {a, b}) {
    const auto cfg = config(d, "scene = density\nalpha = 0, 1\nk = 10\nseed = 7\n");
    ASSERT_EQ(run("density-check --config " + cfg.string() + " --out " + d.string()), 0);
    ASSERT_EQ(run("spectrum --config " + cfg.string() + " --out " + d.string() + " --no-plots"), 0);
  }
  for (const char* f : {"density.json", "spectrum.json", "spectrum_M1_beta.csv", "spectrum_M2_beta.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  // 17 significant digits
  const auto j = slurp(a / "density.json");
  EXPECT_NE(j.find("\"density_difference\": 0.25"), std::string::npos);
  EXPECT_FALSE(load(a / "density.json")["negative_control"]["pass"].get<bool>());
}

TEST(Cli, ErrorsAreStructured) {
  const auto d = scratch("errors");
  const auto bad = config(d, "scene = buser\nbogus = 3\n");
  EXPECT_EQ(run("spectrum --config " + bad.string() + " --out " + d.string()), 2);
  EXPECT_EQ(load(d / "error.json")["error"]["kind"], "invalid_input");

  fs::remove(d / "error.json");
  const auto margin = config(d, "scene = disk\nrefinement = 3\npivot_margin = 1e300\n");
  EXPECT_EQ(run("spectrum --config " + margin.string() + " --out " + d.string()), 2);
  const auto e = load(d / "error.json");
  EXPECT_EQ(e["error"]["kind"], "alpha_precondition");
  EXPECT_TRUE(e["error"].contains("pivot_margin"));

  EXPECT_EQ(run("spectrum --k 0 --out " + d.string()), 2);
  EXPECT_NE(run("no-such-command"), 0);
  EXPECT_EQ(run("spectrum --config /nonexistent.cfg --out " + d.string()), 2);
}
