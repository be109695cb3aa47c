#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("pdmlab_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(PDMLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_config(const std::string& sub, const std::string& config, const fs::path& out) {
  return run(sub + " --config " + std::string(PDMLAB_CONFIGS) + "/" + config + " --out " + out.string());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST(Cli, LandauLevelSpectrum) {
  const fs::path out = scratch("landau");
  ASSERT_EQ(run_config("spectrum", "landau.json", out), 0);
  const Json j = read_json(out / "spectrum.json");
  const auto e = j["spectrum"]["eigenvalues"].get<std::vector<double>>();
  ASSERT_EQ(e.size(), 5u);
  EXPECT_NEAR(e[0], 0.5, 0.01);
  EXPECT_LE(j["hermiticity_defect"].get<double>(), 1e-12);
  EXPECT_TRUE(fs::exists(out / "timing.json"));
  EXPECT_EQ(slurp(out / "spectrum.csv").rfind("index,energy,residual\n", 0), 0u);
}

TEST(Cli, BoxSpectrumWithCompactBuilder) {
  const fs::path out = scratch("box");
  ASSERT_EQ(run_config("spectrum", "box.json", out), 0);
  const auto e = read_json(out / "spectrum.json")["spectrum"]["eigenvalues"].get<std::vector<double>>();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double exact = 0.5 * pi2 * (1.0 / 9.0 + 1.0 / 4.0);
  EXPECT_NEAR(e[0], exact, 0.01 * exact);
  // first excited state is (2, 1): the long side is 3
  const double second = 0.5 * pi2 * (4.0 / 9.0 + 1.0 / 4.0);
  EXPECT_NEAR(e[1], second, 0.01 * second);
}

TEST(Cli, OscillatorSpectrum) {
  const fs::path out = scratch("oscillator");
  ASSERT_EQ(run_config("spectrum", "oscillator.json", out), 0);
  const auto e = read_json(out / "spectrum.json")["spectrum"]["eigenvalues"].get<std::vector<double>>();
  const std::vector<double> exact{1, 2, 2, 3, 3, 3};
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(e[i], exact[i], 0.02 * exact[i]);
}

TEST(Cli, SpectrumOutputsAreByteIdentical) {
  const fs::path a = scratch("repeat_a"), b = scratch("repeat_b");
  ASSERT_EQ(run_config("spectrum", "bump_landau.json", a), 0);
  ASSERT_EQ(run_config("spectrum", "bump_landau.json", b), 0);
  EXPECT_EQ(slurp(a / "spectrum.json"), slurp(b / "spectrum.json"));
  EXPECT_EQ(slurp(a / "spectrum.csv"), slurp(b / "spectrum.csv"));
}

TEST(Cli, CompareVerdicts) {
  const fs::path same = scratch("cmp_same");
  ASSERT_EQ(run_config("compare", "compare_constant_mass.json", same), 0);
  const Json s = read_json(same / "compare.json");
  EXPECT_EQ(s["verdict"], "indistinguishable at this resolution");
  EXPECT_LE(s["summary"]["max_abs_diff"].get<double>(), 1e-8);

  const fs::path diff = scratch("cmp_orderings");
  ASSERT_EQ(run_config("compare", "compare_orderings.json", diff), 0);
  const Json d = read_json(diff / "compare.json");
  EXPECT_EQ(d["verdict"], "distinct");
  EXPECT_EQ(d["levels"].size(), 5u);
  EXPECT_EQ(d["refinement"]["coarse_grid"]["nx"], 32);
}

TEST(Cli, ClassicalRuns) {
  const fs::path q = scratch("quasi_free");
  ASSERT_EQ(run_config("classical", "quasi_free.json", q), 0);
  const Json jq = read_json(q / "classical.json");
  EXPECT_LE(jq["energy_drift"].get<double>(), 1e-8);
  EXPECT_LE(jq["pi_squared_drift"].get<double>(), 1e-8);
  EXPECT_EQ(slurp(q / "trajectory.csv").rfind("t,x,y,px,py,pix,piy,energy\n", 0), 0u);

  const fs::path o = scratch("orbit");
  ASSERT_EQ(run_config("classical", "oscillator_orbit.json", o), 0);
  EXPECT_LE(read_json(o / "classical.json")["closure_error"].get<double>(), 1e-8);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_config("spectrum", "bad_ordering.json", scratch("bad_ordering")), 2);
  EXPECT_EQ(run_config("classical", "bad_dt.json", scratch("bad_dt")), 2);
  const fs::path abort = scratch("abort");
  EXPECT_EQ(run_config("classical", "mass_abort.json", abort), 4);
  EXPECT_TRUE(fs::exists(abort / "trajectory.csv"));
  EXPECT_TRUE(read_json(abort / "classical.json").contains("aborted"));
  EXPECT_EQ(run("spectrum --config /nonexistent.json"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
  // evolve is 1D and field free
  EXPECT_EQ(run_config("evolve", "landau.json", scratch("evolve_landau")), 2);
}

TEST(Cli, EvolveReportsEhrenfestResidual) {
  const fs::path c = scratch("ehr_const"), p = scratch("ehr_pdm");
  ASSERT_EQ(run_config("evolve", "ehrenfest_const.json", c), 0);
  ASSERT_EQ(run_config("evolve", "ehrenfest_pdm.json", p), 0);
  const Json jc = read_json(c / "evolve.json"), jp = read_json(p / "evolve.json");
  EXPECT_LE(jc["ehrenfest_residual"].get<double>(), 1e-3);
  EXPECT_GT(jp["ehrenfest_residual"].get<double>(), 1e-2);
  EXPECT_LE(jc["norm_drift"].get<double>(), 1e-10);
  EXPECT_EQ(slurp(c / "evolution.csv").rfind("t,mean_x,mean_p,mean_pi,norm,energy\n", 0), 0u);
}

TEST(Cli, Validate) {
  EXPECT_EQ(run("validate --list"), 0);
  EXPECT_EQ(run("validate --only AC99"), 2);
  const fs::path out = scratch("validate");
  EXPECT_EQ(run("validate --only AC01,AC09 --out " + out.string()), 0);
  EXPECT_EQ(read_json(out / "validate.json")["criteria"].size(), 2u);
  EXPECT_EQ(run("validate --only AC02 --tolerance-scale 0"), 1);
}
