#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "robincone/config.hpp"
#include "robincone/error.hpp"
#include "robincone/pipeline.hpp"
#include "robincone/report_io.hpp"

using namespace robincone;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("robincone_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string without_runtime(const std::string& json) {
  return std::regex_replace(json, std::regex("\"runtime_ms\": [-0-9.e+]+"), "\"runtime_ms\": 0");
}

RunConfig quadrant_config() {
  RunConfig c;
  c.nu = 2;
  c.cross_section.kind = "quadrant";
  c.solve = true;
  c.h = 0.5;
  c.h_layer = 0.1;
  c.R_T = {6.0};
  c.k_max = 3;
  return c;
}

#ifdef ROBINCONE_CLI
int run_cli(const std::string& args) {
  const std::string cmd = std::string(ROBINCONE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(Fit, ExactPowerLaw) {
  std::vector<SweepPoint> pts;
  for (double a : {1.0, 2.0, 4.0, 8.0, 16.0}) pts.push_back({a, -3.0 * a * a, 0.0, 1, true});
  const SweepFit f = fit_power_law(pts);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.C, 3.0, 1e-12);
  EXPECT_EQ(f.points_used, 3);
}

TEST(Fit, DegenerateInputs) {
  std::vector<SweepPoint> pts = {{1.0, -1.0, 0, 0, true}, {2.0, -4.0, 0, 0, true}, {4.0, -16.0, 0, 0, false}};
  try {
    fit_power_law(pts);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FitDegenerate);
  }
  pts = {{2.0, -4.0, 0, 0, true}, {2.0, -4.0, 0, 0, true}, {2.0, -4.0, 0, 0, true}};
  EXPECT_THROW(fit_power_law(pts), Error);
}

TEST(Pipeline, SolvePointInvariants) {
  const RunConfig c = quadrant_config();
  Mesh mesh;
  const SpectralReport r = solve_point(c, 1.0, 6.0, 0, &mesh);
  EXPECT_GT(mesh.num_nodes(), 0);
  EXPECT_EQ(r.mode, -1);
  ASSERT_EQ(r.counts.size(), 2u);
  for (const auto& s : r.counts) EXPECT_LE(s.dirichlet, s.neumann);
  EXPECT_EQ(r.count(), 1);
  ASSERT_EQ(r.eigenvalues.size(), 1u);
  EXPECT_NEAR(r.eigenvalues[0], -2.0, 0.05);
  EXPECT_LT(r.residuals[0], 1e-8 * std::abs(r.eigenvalues[0]));
  EXPECT_TRUE(r.converged);
}

TEST(Pipeline, ScaledResolution) {
  RunConfig c = quadrant_config();
  c.scale_with_alpha = true;
  const Resolution r = resolution(c, 4.0, 12.0);
  EXPECT_DOUBLE_EQ(r.h, 0.125);
  EXPECT_DOUBLE_EQ(r.truncation_radius, 3.0);
  EXPECT_DOUBLE_EQ(r.mesh.layer_h, 0.025);
}

TEST(Pipeline, EmptyVerdictMeansNoCounts) {
  RunConfig c;
  c.cross_section.theta0 = 2.0 * M_PI / 3;
  c.classify = c.solve = true;
  c.R_T = {10.0, 20.0};
  c.modes = {0, 1};
  const ClassifyOutcome v = run_classify(c);
  EXPECT_EQ(v.verdict.verdict, Verdict::Empty);
  for (const auto& r : run_solve(c)) EXPECT_EQ(r.count(), 0) << r.truncation_radius << " " << r.mode;
}

TEST(Pipeline, InfiniteVerdictMeansGrowingCounts) {
  RunConfig c;
  c.cross_section.theta0 = M_PI / 4;
  c.classify = c.solve = true;
  c.R_T = {10.0, 20.0, 40.0};
  c.h_layer = 0.1;
  const ClassifyOutcome v = run_classify(c);
  EXPECT_EQ(v.verdict.verdict, Verdict::Infinite);
  const auto reports = run_solve(c);
  ASSERT_EQ(reports.size(), 3u);
  for (std::size_t i = 1; i < reports.size(); ++i) EXPECT_GE(reports[i].count(), reports[i - 1].count());
  EXPECT_GE(reports.back().count(), 2);
}

TEST(Pipeline, ReportsAreDeterministic) {
  RunConfig c = quadrant_config();
  c.formats = {"json", "csv", "vtk"};
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  c.output_dir = a.string();
  ASSERT_EQ(cmd_solve(c), 0);
  c.output_dir = b.string();
  ASSERT_EQ(cmd_solve(c), 0);
  for (const char* name : {"report.json", "sweep.csv", "mesh.vtk"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(without_runtime(slurp(a / name)), without_runtime(slurp(b / name))) << name;
  }
  const auto j = nlohmann::json::parse(slurp(a / "report.json"));
  EXPECT_EQ(j["command"], "solve");
  const auto& rep = j["reports"][0];
  for (const char* key : {"alpha", "threshold", "margin", "eigenvalues", "counts", "residuals", "mesh", "runtime_ms"})
    EXPECT_TRUE(rep.contains(key)) << key;
  EXPECT_TRUE(rep["mesh"].contains("bc"));
  const std::string csv = slurp(a / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,R_T,h,m,margin,count,lambda_1,lambda_2,lambda_3");
}

TEST(Pipeline, SweepOnScaledQuadrant) {
  RunConfig c = quadrant_config();
  c.alpha_sweep = AlphaSweep{1.0, 4.0, 3, "log"};
  c.scale_with_alpha = true;
  c.R_T = {8.0};
  const SweepResult s = run_sweep(c);
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_NEAR(s.fit.slope, 2.0, 0.01);
  EXPECT_NEAR(s.fit.C, 2.0, 0.05);
  const auto j = nlohmann::json::parse(sweep_json(s, c));
  EXPECT_EQ(j["points"].size(), 3u);
}

TEST(Pipeline, CertifyFailureWritesCertificate) {
  RunConfig c;
  c.cross_section.theta0 = M_PI / 2;
  c.certify = true;
  const fs::path out = scratch("cert_fail");
  c.output_dir = out.string();
  try {
    cmd_certify(c);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code(e.code()), 3);
  }
  const auto j = nlohmann::json::parse(slurp(out / "certificate.json"));
  EXPECT_FALSE(j["certified"].get<bool>());
}

#ifdef ROBINCONE_CLI
TEST(Cli, ExitCodesAndReports) {
  const fs::path out = scratch("cli");
  const std::string o = " --out " + (out / "x").string();
  EXPECT_EQ(run_cli("classify --theta0 0.78539816339744831" + o), 0);
  auto j = nlohmann::json::parse(slurp(out / "x" / "report.json"));
  EXPECT_EQ(j["verdict"], "Infinite");
  EXPECT_NEAR(j["kappa"].get<double>(), 1.0, 1e-6);
  EXPECT_TRUE(fs::exists(out / "x" / "config.toml"));

  EXPECT_EQ(run_cli("classify --theta0 2.0943951023931957" + o), 0);
  j = nlohmann::json::parse(slurp(out / "x" / "report.json"));
  EXPECT_EQ(j["verdict"], "Empty");

  EXPECT_EQ(run_cli("classify --nu 2 --theta 1.0" + o), 0);
  j = nlohmann::json::parse(slurp(out / "x" / "report.json"));
  EXPECT_EQ(j["verdict"], "IndeterminateByPaper");

  EXPECT_EQ(run_cli("certify --theta0 1.5707963267948966" + o), 3);
  EXPECT_EQ(run_cli("classify --kind graph --rho '0.5 +* phi'" + o), 3);
  EXPECT_EQ(run_cli("classify --theta0 4.0" + o), 2);
  EXPECT_EQ(run_cli("solve --bc robin" + o), 3);
  EXPECT_NE(run_cli("frobnicate"), 0);

  // A config file and --print-config round trip.
  const fs::path cfg = out / "run.toml";
  std::ofstream(cfg) << "[domain]\nnu = 2\ncross_section = { kind = \"quadrant\" }\n"
                        "[pipeline]\nsolve = true\n[numerics]\nh = 0.5\nh_layer = 0.1\nR_T = 6.0\n";
  EXPECT_EQ(run_cli("solve --config " + cfg.string() + o), 0);
  j = nlohmann::json::parse(slurp(out / "x" / "report.json"));
  EXPECT_EQ(j["reports"][0]["counts"][0]["dirichlet"], 1);
  std::ofstream(out / "bad.toml") << "[numerics]\nhh = 1\n";
  EXPECT_EQ(run_cli("solve --config " + (out / "bad.toml").string() + o), 3);
}
#endif
