#include <gtest/gtest.h>

#include <sstream>

#include "rankcorr/cli.hpp"
#include "rankcorr/infeasibility.hpp"
#include "rankcorr/io.hpp"
#include "support/cli_runner.hpp"
#include "support/oracles.hpp"

namespace rankcorr {
namespace {

using io::json;
using testing::run_cli;
using testing::TempDir;

std::string planted_target_csv(std::uint64_t seed, Eigen::Index d) {
  std::mt19937_64 gen(seed);
  const Matrix a1 = testing::random_unit_rows(d, 3, gen);
  const Matrix a2 = testing::random_unit_rows(d, 3, gen);
  return io::to_csv(0.3 * (a1 * a1.transpose()) + 0.7 * (a2 * a2.transpose()));
}

TEST(CliValidate, M12MatrixIdentityAndNonPsd) {
  TempDir dir;
  ASSERT_EQ(run_cli("m12 --format csv -o " + dir.file("M.csv")).exit_code, 0);
  const auto m = run_cli("validate " + dir.file("M.csv"));
  EXPECT_EQ(m.exit_code, 0);
  const json report = json::parse(m.out);
  EXPECT_EQ(report["valid"], true);
  EXPECT_EQ(report["rank"], 4);
  EXPECT_EQ(report["dimension"], 12);

  const auto id = run_cli("validate " + dir.write("identity.csv", io::to_csv(Matrix::Identity(5, 5))));
  EXPECT_EQ(id.exit_code, 0);
  EXPECT_EQ(json::parse(id.out)["rank"], 5);

  const auto bad = run_cli("validate " + dir.write("nonpsd.csv", "1,2\n2,1\n"));
  EXPECT_EQ(bad.exit_code, 2);
  const json bad_report = json::parse(bad.out);
  EXPECT_EQ(bad_report["valid"], false);
  EXPECT_EQ(bad_report["errors"][0]["code"], "NotPSD");
}

TEST(CliValidate, IoAndUsageErrors) {
  EXPECT_EQ(run_cli("validate /nonexistent.csv").exit_code, 1);
  EXPECT_EQ(run_cli("frobnicate").exit_code, 1);
  EXPECT_EQ(run_cli("").exit_code, 1);
  TempDir dir;
  EXPECT_EQ(run_cli("validate " + dir.write("garbage.csv", "1,a\n")).exit_code, 1);
  EXPECT_EQ(run_cli("validate " + dir.write("rect.csv", "1,0,0\n0,1,0\n")).exit_code, 2);
}

TEST(CliCertify, BuiltinFamily) {
  const auto r = run_cli("certify --m12");
  EXPECT_EQ(r.exit_code, 0);
  const json cert = json::parse(r.out);
  EXPECT_NEAR(cert["c2"].get<double>(), 3.0, 1e-9);
  EXPECT_NEAR(cert["c4"].get<double>(), 1.5, 1e-9);
  EXPECT_NEAR(cert["implied_m2"].get<double>(), 4.0, 1e-9);
  EXPECT_NEAR(cert["implied_m4"].get<double>(), 14.4, 1e-9);
  EXPECT_NEAR(cert["margin"].get<double>(), 16.0 - 72.0 / 5.0, 1e-8);
  EXPECT_EQ(cert["violated"], true);
  EXPECT_EQ(cert["seed"], 0);
}

TEST(CliCertify, InconclusiveFamilies) {
  TempDir dir;
  const auto ico = run_cli("certify " + dir.write("icosahedron.csv", io::to_csv(testing::icosahedron_axes())));
  EXPECT_EQ(ico.exit_code, 3);
  EXPECT_EQ(json::parse(ico.out)["violated"], false);
  EXPECT_EQ(json::parse(ico.out)["verdict"], "inconclusive");

  const auto e123 = run_cli("certify " + dir.write("e123.csv", "1,0,0\n0,1,0\n0,0,1\n"));
  EXPECT_EQ(e123.exit_code, 3);
  EXPECT_EQ(json::parse(e123.out)["error"], "NotAFrame");

  // Rows need --normalize unless they are already unit vectors.
  const std::string scaled = dir.write("scaled.csv", "2,0,0\n0,3,0\n");
  EXPECT_EQ(run_cli("certify " + scaled).exit_code, 1);
  EXPECT_EQ(run_cli("certify --normalize " + scaled).exit_code, 3);
}

TEST(CliM12, EmbeddingDimensions) {
  const auto r = run_cli("m12 --dim 15 --format csv");
  ASSERT_EQ(r.exit_code, 0);
  const Matrix m = io::parse_matrix_csv(r.out);
  EXPECT_EQ(m, embed_high_dim(15).entries());
  EXPECT_EQ(run_cli("m12 --dim 11").exit_code, 1);
}

TEST(CliRoundtrip, PlantedIdentityAndM12Matrix) {
  TempDir dir;
  const auto planted = run_cli("roundtrip --samples 100000 " + dir.write("planted.csv", planted_target_csv(5, 6)));
  EXPECT_EQ(planted.exit_code, 0);
  const json p = json::parse(planted.out);
  EXPECT_EQ(p["converged"], true);
  EXPECT_LE(p["max_deviation"].get<double>(), 0.02);

  const auto id = run_cli("roundtrip --samples 100000 " + dir.write("identity.csv", io::to_csv(Matrix::Identity(4, 4))));
  EXPECT_EQ(id.exit_code, 0);
  EXPECT_LE(json::parse(id.out)["max_deviation"].get<double>(), 0.02);

  ASSERT_EQ(run_cli("m12 --format csv -o " + dir.file("M.csv")).exit_code, 0);
  const auto m = run_cli("roundtrip --tol 1e-3 " + dir.file("M.csv"));
  EXPECT_EQ(m.exit_code, 3);
  EXPECT_EQ(json::parse(m.out)["converged"], false);
}

TEST(CliPipeline, DecomposeSampleEstimate) {
  TempDir dir;
  const std::string target = dir.write("target.csv", planted_target_csv(9, 5));
  const auto dec = run_cli("decompose " + target + " --model-output " + dir.file("model.json"));
  ASSERT_EQ(dec.exit_code, 0);
  const json result = json::parse(dec.out);
  for (const char* key : {"weights", "atoms", "residual", "iterations", "converged", "residual_trace"}) {
    EXPECT_TRUE(result.contains(key)) << key;
  }

  ASSERT_EQ(run_cli("sample " + dir.file("model.json") + " -n 50000 --workers 2 -o " + dir.file("s.csv")).exit_code, 0);
  const auto est = run_cli("estimate --format csv " + dir.file("s.csv"));
  ASSERT_EQ(est.exit_code, 0);
  const Matrix estimate = io::parse_matrix_csv(est.out);
  const Matrix expected = io::parse_matrix_csv(dir.read("target.csv"));
  EXPECT_LE((estimate - expected).cwiseAbs().maxCoeff(), 0.03);

  // Same seed and workers: identical bytes; different seed: different bytes.
  ASSERT_EQ(run_cli("sample " + dir.file("model.json") + " -n 50000 --workers 2 -o " + dir.file("s2.csv")).exit_code, 0);
  EXPECT_EQ(dir.read("s.csv"), dir.read("s2.csv"));
  ASSERT_EQ(run_cli("sample " + dir.file("model.json") + " -n 50000 --workers 2 --seed 1 -o " + dir.file("s3.csv")).exit_code, 0);
  EXPECT_NE(dir.read("s.csv"), dir.read("s3.csv"));
}

TEST(CliGaussian, ModelThenSample) {
  TempDir dir;
  const std::string target = dir.write("t.csv", "1,0.5\n0.5,1\n");
  ASSERT_EQ(run_cli("gaussian " + target + " -o " + dir.file("g.json")).exit_code, 0);
  const json g = json::parse(dir.read("g.json"));
  EXPECT_EQ(g["type"], "gaussian");
  EXPECT_EQ(g["repaired"], false);
  EXPECT_NEAR(g["max_relative_error"].get<double>(), 0.0, 1e-12);

  const auto naive = run_cli("gaussian --naive " + target);
  const double err = json::parse(naive.out)["max_relative_error"].get<double>();
  EXPECT_GT(err, 0.0);
  EXPECT_LE(err, json::parse(naive.out)["worst_case_error"].get<double>());

  ASSERT_EQ(run_cli("sample --rescale -n 20000 " + dir.file("g.json") + " -o " + dir.file("gs.csv")).exit_code, 0);
  const io::Table t = io::parse_csv(dir.read("gs.csv"), true);
  EXPECT_EQ(t.header, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_LE(t.values.cwiseAbs().maxCoeff(), std::sqrt(3.0) + 1e-12);
}

TEST(CliInProcess, HelpAndReportToStream) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run({"rankcorr", "--help"}, out, err), 0);
  EXPECT_NE(out.str().find("certify"), std::string::npos);

  std::ostringstream cert_out;
  EXPECT_EQ(cli::run({"rankcorr", "certify", "--m12", "--seed", "7"}, cert_out, err), 0);
  EXPECT_EQ(json::parse(cert_out.str())["seed"], 7);
}

}  // namespace
}  // namespace rankcorr
