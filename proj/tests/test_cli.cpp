// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "cli_process.hpp"
#include "spinframe/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using spinframe::testing::CliResult;
using spinframe::testing::slurp;
using spinframe::testing::spit;

namespace {

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spinframe_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

/// Writes `config` to <dir>/job.json and runs `command` with output in <dir>/out.
CliResult run(const fs::path& dir, const std::string& command, const std::string& config, const std::string& extra = "") {
  spit(dir / "job.json", config);
  return spinframe::testing::run_cli_process(SPINFRAME_CLI_PATH,
                                             command + " --config '" + (dir / "job.json").string() + "' --out '" + (dir / "out").string() + "' " + extra, dir);
}

json error_object(const CliResult& r) { return json::parse(r.err.substr(0, r.err.find('\n')))["error"]; }

}  // namespace

TEST(Cli, OddGridExitsTwoWithErrorObject) {
  const auto dir = work_dir("odd");
  const auto r = run(dir, "spectrum", "{\n  \"grid\": [8, 7, 8]\n}");
  EXPECT_EQ(r.exit_code, 2);
  const auto e = error_object(r);
  EXPECT_EQ(e["code"], 2);
  EXPECT_EQ(e["kind"], "config");
  EXPECT_EQ(e["line"], 2);
  EXPECT_NE(e["message"].get<std::string>().find("grid dimensions must be even"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto dir = work_dir("usage");
  EXPECT_EQ(spinframe::testing::run_cli_process(SPINFRAME_CLI_PATH, "spectrum", dir).exit_code, 2);
  EXPECT_EQ(spinframe::testing::run_cli_process(SPINFRAME_CLI_PATH, "bogus --config x.json", dir).exit_code, 2);
  EXPECT_EQ(spinframe::testing::run_cli_process(SPINFRAME_CLI_PATH, "spectrum --config /nonexistent.json", dir).exit_code, 2);
}

TEST(Cli, NonConvergenceExitsThree) {
  const auto dir = work_dir("noconv");
  const auto r = run(dir, "spectrum", R"({"grid": [8, 8, 8], "solver": {"count": 8, "max_iter": 1}})");
  EXPECT_EQ(r.exit_code, 3);
  const auto e = error_object(r);
  EXPECT_EQ(e["kind"], "convergence");
  EXPECT_NE(e["message"].get<std::string>().find("achieved"), std::string::npos);
}

TEST(Cli, UnmetThresholdsExitOne) {
  const auto dir = work_dir("thresholds");
  const auto r = run(dir, "framing",
                     R"({"grid": [8, 8, 8], "spin_structure": [0, 0, 1],
                         "conformal": {"offset": 1.5, "terms": [{"m": [1, 0, 0], "amplitude": 0.4}]},
                         "solver": {"count": 4},
                         "thresholds": {"max_divergence": 1e-300, "orthogonality": 1e-300, "length_spread": 1e-300}})");
  EXPECT_EQ(r.exit_code, 1);
  const auto rep = json::parse(slurp(dir / "out" / "framing.json"));
  EXPECT_EQ(rep["status"], "fail");
  EXPECT_GT(rep["report"]["max_divergence"].get<double>(), 1e-300);
}

TEST(Cli, ExportWithoutFieldsExitsTwo) {
  const auto dir = work_dir("export_missing");
  const auto r = run(dir, "export", R"({"grid": [4, 4, 4]})");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(error_object(r)["kind"], "io");
}

TEST(Cli, DenseOracleRejectsLargeGrid) {
  const auto dir = work_dir("dense_large");
  const auto r = run(dir, "spectrum", R"({"grid": [16, 16, 16]})", "--dense-oracle");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(error_object(r)["kind"], "validation");
}

TEST(Cli, SpectrumFullyAntiperiodic) {
  const auto dir = work_dir("eps111");
  const auto r = run(dir, "spectrum", R"({"grid": [6, 6, 6], "spin_structure": [1, 1, 1], "solver": {"count": 8}})", "--dense-oracle");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rep = json::parse(slurp(dir / "out" / "spectrum.json"));
  ASSERT_EQ(rep["eigenpairs"].size(), 8u);
  for (const auto& p : rep["eigenpairs"]) EXPECT_NEAR(std::abs(p["lambda"].get<double>()), std::numbers::pi * std::sqrt(3.0), 1e-8);
  EXPECT_LE(rep["oracle"]["max_deviation"].get<double>(), 1e-8);
  EXPECT_LE(rep["dense"]["max_deviation"].get<double>(), 1e-8);
  EXPECT_TRUE(rep["even_multiplicities"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "out" / "metadata.json"));
}

TEST(Cli, ReportsAreByteIdenticalForFixedSeed) {
  const auto a = work_dir("det_a"), b = work_dir("det_b");
  const std::string cfg = R"({"grid": [8, 8, 8], "spin_structure": [0, 1, 0], "solver": {"count": 6, "seed": 3}})";
  ASSERT_EQ(run(a, "framing", cfg).exit_code, 0);
  ASSERT_EQ(run(b, "framing", cfg).exit_code, 0);
  for (const char* f : {"framing.json", "framing_fields.csv", "eigenspinor.csv"})
    EXPECT_EQ(slurp(a / "out" / f), slurp(b / "out" / f)) << f;
  // Timestamps live only in the metadata block.
  EXPECT_EQ(slurp(a / "out" / "framing.json").find("timestamp"), std::string::npos);
  EXPECT_NE(slurp(a / "out" / "metadata.json").find("timestamp"), std::string::npos);
}

TEST(Cli, SeedFlagOverridesConfig) {
  const auto dir = work_dir("seed");
  ASSERT_EQ(run(dir, "spectrum", R"({"grid": [4, 4, 4], "solver": {"count": 4, "seed": 1}})", "--seed 9").exit_code, 0);
  const auto rep = json::parse(slurp(dir / "out" / "spectrum.json"));
  EXPECT_EQ(rep["solver"]["seed"], 9);
}

TEST(Cli, HarmonicSourceWarns) {
  const auto dir = work_dir("harmonic");
  const auto r = run(dir, "framing", R"({"grid": [8, 8, 8], "solver": {"count": 2}, "framing": {"eigenpair": 0}})");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("harmonic source"), std::string::npos);
  const auto rep = json::parse(slurp(dir / "out" / "framing.json"));
  ASSERT_EQ(rep["warnings"].size(), 1u);
  EXPECT_NE(rep["warnings"][0].get<std::string>().find("lambda = 0"), std::string::npos);
}

TEST(Cli, FramingThenExportRoundTrip) {
  const auto dir = work_dir("export");
  const std::string cfg = slurp(fs::path(SPINFRAME_SAMPLES_DIR) / "plane_wave.json");
  ASSERT_EQ(run(dir, "framing", cfg).exit_code, 0);
  const std::string csv = slurp(dir / "out" / "framing_fields.csv");
  ASSERT_EQ(run(dir, "export", cfg).exit_code, 0);
  EXPECT_EQ(slurp(dir / "out" / "framing_fields.csv"), csv);
  const std::string vtk = slurp(dir / "out" / "framing_fields.vtk");
  EXPECT_NE(vtk.find("DIMENSIONS 8 8 8"), std::string::npos);
  ASSERT_EQ(run(dir, "export", cfg).exit_code, 0);
  EXPECT_EQ(slurp(dir / "out" / "framing_fields.vtk"), vtk);
  EXPECT_TRUE(fs::exists(dir / "out" / "eigenspinor.vtk"));
}

TEST(Cli, VerifyPassesOnSmallConformalJob) {
  const auto dir = work_dir("verify");
  const auto r = run(dir, "verify",
                     R"({"grid": [6, 6, 4], "conformal": {"offset": 1.5, "terms": [{"m": [1, 0, 0], "amplitude": 0.4}]},
                         "solver": {"count": 6}, "verify": {"trials": 3}})");
  EXPECT_EQ(r.exit_code, 0) << r.out << r.err;
  const auto rep = json::parse(slurp(dir / "out" / "verify.json"));
  EXPECT_EQ(rep["status"], "pass");
}

TEST(Cli, SampleConfigsAreValid) {
  for (const auto& entry : fs::directory_iterator(SPINFRAME_SAMPLES_DIR)) {
    const auto dir = work_dir("sample_" + entry.path().stem().string());
    // export validates the config before it looks for field dumps.
    const auto r = run(dir, "export", slurp(entry.path()));
    EXPECT_EQ(error_object(r)["kind"], "io") << entry.path() << ": " << r.err;
  }
}
