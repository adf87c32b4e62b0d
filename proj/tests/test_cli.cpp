#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "hutchfrac/hutchfrac.hpp"

using namespace hutchfrac;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("hutchfrac_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string exported(const std::string& entry) {
    std::ostringstream out, err;
    const std::string p = path(entry + ".json");
    EXPECT_EQ(cmd_export(entry, p, {out, err}), kExitOk) << err.str();
    return p;
  }

  fs::path dir_;
};

Json last_json_line(const std::string& text) {
  const auto end = text.find_last_not_of('\n');
  const auto start = text.rfind('\n', end);
  return Json::parse(text.substr(start == std::string::npos ? 0 : start + 1, end + 1 - (start == std::string::npos ? 0 : start + 1)));
}

}  // namespace

TEST_F(Cli, AttractorSierpinskiConvergesAndWritesCsv) {
  AttractorArgs a;
  a.config = exported("sierpinski");
  a.tol = 1e-5;
  a.out_csv = path("s.csv");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_attractor(a, {out, err}), kExitOk) << err.str();
  const Json line = last_json_line(out.str());
  EXPECT_TRUE(line["converged"].get<bool>());
  EXPECT_EQ(line["tol"].get<double>(), 1e-5);
  const std::string csv = read_file(a.out_csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x0,x1");
  const Cloud c = parse_cloud_csv(csv);
  EXPECT_GE(c.size(), 2187u);
  EXPECT_EQ(c.size(), line["points"].get<std::size_t>());
}

TEST_F(Cli, AttractorFgLandsOnTheGrid) {
  AttractorArgs a;
  a.config = exported("fg_interval");
  a.out_csv = path("fg.csv");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_attractor(a, {out, err}), kExitOk) << err.str();
  const Cloud c = parse_cloud_csv(read_file(a.out_csv));
  // The seed is the 0.01 grid of [0, 2], which both maps send into itself.
  EXPECT_EQ(c.size(), 201u);
  for (double v : c.data()) EXPECT_NEAR(v * 100.0, std::round(v * 100.0), 1e-6);
}

TEST_F(Cli, AttractorExitCodes) {
  std::ostringstream out, err;
  write_file(path("broken.json"), "{ not json");
  AttractorArgs bad;
  bad.config = path("broken.json");
  EXPECT_EQ(cmd_attractor(bad, {out, err}), kExitConfigError);
  EXPECT_NE(err.str().find("config error"), std::string::npos);

  AttractorArgs missing;
  missing.config = path("missing.json");
  EXPECT_EQ(cmd_attractor(missing, {out, err}), kExitConfigError);

  AttractorArgs ed;
  ed.config = exported("edelstein_exp");
  EXPECT_NE(cmd_attractor(ed, {out, err}), kExitOk);

  AttractorArgs slow;
  slow.config = exported("cantor");
  slow.max_iter = 3;
  EXPECT_EQ(cmd_attractor(slow, {out, err}), kExitNoConvergence);
  EXPECT_FALSE(last_json_line(out.str())["converged"].get<bool>());
}

TEST_F(Cli, ClassifyPrintsVerdictsAndWritesReport) {
  ClassifyArgs a;
  a.config = exported("fg_interval");
  a.report_json = path("report.json");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_classify(a, {out, err}), kExitOk) << err.str();
  EXPECT_NE(out.str().find("euclidean: banach=refuted"), std::string::npos);
  EXPECT_NE(out.str().find("eventual=refuted"), std::string::npos);
  const Json rep = Json::parse(read_file(a.report_json));
  EXPECT_EQ(rep["domain"]["lo"][0].get<double>(), 0.0);
  EXPECT_EQ(rep["domain"]["hi"][0].get<double>(), 2.0);
  const auto& m = rep["metrics"][0];
  EXPECT_EQ(m["metric"], "euclidean");
  EXPECT_EQ(m["eventual"], "refuted");
  const auto& w = m["details"]["eventual"]["witness"];
  ASSERT_FALSE(w.is_null());
  EXPECT_EQ(w["x"][0].get<double>(), 0.0);
  EXPECT_EQ(w["y"][0].get<double>(), 2.0);
  EXPECT_EQ(w["word"][0], "f");
  EXPECT_EQ(w["word"][1], "g");
}

TEST_F(Cli, RemetrizeExitCodes) {
  std::ostringstream out, err;
  RemetrizeArgs ok;
  ok.config = exported("sierpinski");
  ok.pairs = 100;
  EXPECT_EQ(cmd_remetrize(ok, {out, err}), kExitOk) << err.str();
  Json line = last_json_line(out.str());
  EXPECT_EQ(line["depth"], 12);
  EXPECT_EQ(line["violations"], 0);

  RemetrizeArgs bp;
  bp.config = exported("swap_halve");
  bp.verify = "banach-power";
  bp.pairs = 100;
  EXPECT_EQ(cmd_remetrize(bp, {out, err}), kExitOk) << err.str();
  line = last_json_line(out.str());
  EXPECT_EQ(line["lambda"].get<double>(), 0.5);
  EXPECT_TRUE(line["passed"].get<bool>());

  RemetrizeArgs fail;
  fail.config = exported("fg_interval");
  fail.eps = 0.1;
  fail.depth_cap = 10;
  fail.report_json = path("fail.json");
  EXPECT_EQ(cmd_remetrize(fail, {out, err}), kExitRemetrizeFailed);
  const Json rep = Json::parse(read_file(fail.report_json));
  EXPECT_EQ(rep["offending_word"].size(), 10u);

  RemetrizeArgs unknown = ok;
  unknown.verify = "matkowski";
  EXPECT_EQ(cmd_remetrize(unknown, {out, err}), kExitConfigError);
}

TEST_F(Cli, VerifyChainSuitePasses) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_verify("chain", {out, err}), kExitOk) << out.str() << err.str();
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
  EXPECT_EQ(cmd_verify("everything", {out, err}), kExitConfigError);
}

TEST_F(Cli, ChaosRendersAPpm) {
  ChaosArgs a;
  a.config = exported("sierpinski");
  a.iterations = 5000;
  a.render_ppm = path("s.ppm");
  a.width = 64;
  a.height = 32;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_chaos(a, {out, err}), kExitOk) << err.str();
  const std::string ppm = read_file(a.render_ppm);
  const std::string header = "P6\n64 32\n255\n";
  ASSERT_EQ(ppm.substr(0, header.size()), header);
  EXPECT_EQ(ppm.size(), header.size() + 64u * 32u * 3u);
  // The bottom-left corner (0, 0) is on the attractor; the top-right one is not.
  const std::size_t bl = header.size() + (31u * 64u) * 3u, tr = header.size() + 63u * 3u;
  EXPECT_EQ(static_cast<unsigned char>(ppm[bl]), 0);
  EXPECT_EQ(static_cast<unsigned char>(ppm[tr]), 255);
}

TEST_F(Cli, OutputsAreDeterministic) {
  const std::string cfg = exported("sierpinski");
  std::string first_csv, first_chaos;
  for (int run = 0; run < 2; ++run) {
    std::ostringstream out, err;
    AttractorArgs a;
    a.config = cfg;
    a.tol = 1e-3;
    a.out_csv = path("a" + std::to_string(run) + ".csv");
    ASSERT_EQ(cmd_attractor(a, {out, err}), kExitOk);
    ChaosArgs c;
    c.config = cfg;
    c.seed = 7;
    c.iterations = 10000;
    c.out_csv = path("c" + std::to_string(run) + ".csv");
    ASSERT_EQ(cmd_chaos(c, {out, err}), kExitOk);
    if (run == 0) {
      first_csv = read_file(a.out_csv);
      first_chaos = read_file(c.out_csv);
    } else {
      EXPECT_EQ(read_file(a.out_csv), first_csv);
      EXPECT_EQ(read_file(c.out_csv), first_chaos);
    }
  }
}

TEST(Output, CsvRoundTripsExactly) {
  Rng rng(12);
  std::vector<double> flat;
  for (int i = 0; i < 300; ++i) flat.push_back(rng.uniform(-1e3, 1e3));
  const Cloud c(3, flat);
  EXPECT_EQ(parse_cloud_csv(cloud_csv(c)).data(), c.data());
  EXPECT_THROW(parse_cloud_csv("x0,x1\n1,2,3\n"), Error);
}

TEST(Output, OneDimensionalCloudsUseTheMiddleRow) {
  const std::string ppm = render_ppm(Cloud(1, {0.0, 1.0}), DomainBox::cube(1, 0.0, 1.0), 4, 5);
  const std::string header = "P6\n4 5\n255\n";
  const auto px = [&](std::size_t row, std::size_t col) {
    return static_cast<unsigned char>(ppm[header.size() + (row * 4 + col) * 3]);
  };
  EXPECT_EQ(px(2, 0), 0);
  EXPECT_EQ(px(2, 3), 0);
  EXPECT_EQ(px(2, 1), 255);
  EXPECT_EQ(px(0, 0), 255);
}
