#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "commonlines/io.hpp"
#include "support.hpp"

using namespace commonlines;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome clines(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("clines_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(cli::kConfigEnv);
  }
  void TearDown() override {
    unsetenv(cli::kConfigEnv);
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateIsSeededAndOrthonormal) {
  ASSERT_EQ(clines({"--seed", "7", "generate", "--n", "5", "--out", path("a.json")}).code, 0);
  ASSERT_EQ(clines({"--seed", "7", "generate", "--n", "5", "--out", path("b.json")}).code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  const auto ds = std::get<FramesDataset>(dataset_from_json(read_json_file(path("a.json"))));
  EXPECT_EQ(ds.frames.size(), 5u);
  for (const auto& f : ds.frames) {
    EXPECT_LT(std::abs(f.a().dot(f.b())), 1e-12);
    EXPECT_NEAR(f.a().norm(), 1.0, 1e-12);
  }
  EXPECT_EQ(ds.metadata["seed"], 7);
  ASSERT_EQ(clines({"--seed", "8", "generate", "--n", "5", "--out", path("c.json")}).code, 0);
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(Cli, GenerateErrors) {
  EXPECT_EQ(clines({"generate", "--n", "2", "--out", path("a.json")}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"generate", "--out", path("a.json")}).code, cli::kExitUsage);
  const Outcome r = clines({"generate", "--n", "5", "--min-sine", "1.5", "--out", path("a.json")});
  EXPECT_EQ(r.code, cli::kExitRetries);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(fs::exists(path("a.json")));
}

TEST_F(Cli, ValidateFixtureNamesTheFailingCertificate) {
  const Outcome r = clines({"validate", "--in", COMMONLINES_FIXTURE});
  EXPECT_EQ(r.code, cli::kExitFailed);
  const Json j = parse_json_text(r.out);
  EXPECT_EQ(j["verdict"], "Invalid");
  bool named = false;
  for (const auto& o : j["worst_offenders"]) {
    if (o["certificate"] == "loc ((1,2,3),(1,2,4))") {
      named = true;
      EXPECT_NEAR(o["value"].get<double>(), -0.1464466094, 1e-9);
    }
  }
  EXPECT_TRUE(named);
}

TEST_F(Cli, Pipeline) {
  ASSERT_EQ(clines({"--seed", "11", "generate", "--n", "7", "--out", path("frames.json")}).code, 0);
  ASSERT_EQ(clines({"realize", "--in", path("frames.json"), "--out", path("lines.json")}).code, 0);
  EXPECT_EQ(clines({"validate", "--in", path("lines.json")}).code, 0);

  const Outcome rec = clines({"reconstruct", "--in", path("lines.json"), "--out", path("rec.json")});
  ASSERT_EQ(rec.code, 0) << rec.err;
  EXPECT_LT(parse_json_text(rec.out)["max_residual"].get<double>(), 1e-9);
  const auto truth = std::get<FramesDataset>(dataset_from_json(read_json_file(path("frames.json"))));
  const auto got = std::get<FramesDataset>(dataset_from_json(read_json_file(path("rec.json"))));
  EXPECT_LT(frameset_distance_mod_o3(truth.frames, got.frames), 1e-8);
  EXPECT_EQ(got.metadata["step"], "reconstruct");

  ASSERT_EQ(clines({"--seed", "5", "perturb", "--in", path("lines.json"), "--sigma", "1e-3", "--out",
                    path("noisy.json")})
                .code,
            0);
  EXPECT_EQ(clines({"validate", "--in", path("noisy.json")}).code, cli::kExitFailed);
  EXPECT_EQ(clines({"reconstruct", "--in", path("noisy.json"), "--out", path("x.json")}).code, cli::kExitFailed);

  const Outcome den = clines({"denoise", "--in", path("noisy.json"), "--out", path("clean.json"), "--frames-out",
                          path("fit.json")});
  ASSERT_EQ(den.code, 0) << den.err;
  const Json summary = parse_json_text(den.out);
  EXPECT_LE(summary["objective"].get<double>(), summary["initial_objective"].get<double>());
  EXPECT_TRUE(summary["converged"].get<bool>());
  EXPECT_EQ(clines({"validate", "--in", path("clean.json")}).code, 0);
  EXPECT_TRUE(fs::exists(path("fit.json")));
}

TEST_F(Cli, AnglesOfTheFixture) {
  const Outcome r = clines({"angles", "--in", COMMONLINES_FIXTURE, "1", "2", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = parse_json_text(r.out);
  EXPECT_NEAR(j["alpha"].get<double>(), kPi / 2, 1e-12);
  EXPECT_NEAR(j["beta"].get<double>(), kPi / 2, 1e-12);
  EXPECT_NEAR(j["gamma"].get<double>(), kPi / 4, 1e-12);
  EXPECT_EQ(clines({"angles", "--in", COMMONLINES_FIXTURE, "1", "2", "9"}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"angles", "--in", COMMONLINES_FIXTURE, "1", "2"}).code, cli::kExitUsage);
}

TEST_F(Cli, PlotdataTable) {
  const Outcome r = clines({"plotdata", "--in", COMMONLINES_FIXTURE});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "family\tindices\tvalue\tthreshold\tpasses");
  int norm = 0, triangle = 0, loc = 0;
  bool saw_failing_loc = false;
  while (std::getline(lines, line)) {
    const std::string family = line.substr(0, line.find('\t'));
    norm += family == "norm";
    triangle += family == "triangle";
    loc += family == "loc";
    if (line.rfind("loc\t1,2,3/1,2,4\t", 0) == 0) saw_failing_loc = line.ends_with("\t0");
  }
  EXPECT_EQ(norm, 6);
  EXPECT_EQ(triangle, 4);
  EXPECT_EQ(loc, 6);
  EXPECT_TRUE(saw_failing_loc);

  // a saved report gives the same table
  const std::string report = write("report.json", clines({"validate", "--in", COMMONLINES_FIXTURE}).out);
  EXPECT_EQ(clines({"plotdata", "--in", report}).out, r.out);

  const Outcome empty = clines({"plotdata", "--in", write("empty.json", "")});
  EXPECT_EQ(empty.code, cli::kExitUsage) << empty.err;
  EXPECT_EQ(clines({"plotdata", "--in", write("bad.json", "{\"kind\": 3}")}).code, cli::kExitUsage);
}

TEST_F(Cli, ConfigPrecedence) {
  // a huge margin makes every triangle fail, so the verdict shows which value won
  const std::string strict = write("strict.json", R"({"ineq_margin": 10})");
  const std::string loose = write("loose.json", R"({"ineq_margin": 1e-10})");
  ASSERT_EQ(clines({"--seed", "3", "generate", "--n", "4", "--out", path("f.json")}).code, 0);
  ASSERT_EQ(clines({"realize", "--in", path("f.json"), "--out", path("l.json")}).code, 0);

  EXPECT_EQ(clines({"--config", strict, "validate", "--in", path("l.json")}).code, cli::kExitFailed);
  EXPECT_EQ(clines({"--config", strict, "--tol-ineq", "1e-10", "validate", "--in", path("l.json")}).code, 0);

  setenv(cli::kConfigEnv, strict.c_str(), 1);
  EXPECT_EQ(clines({"validate", "--in", path("l.json")}).code, cli::kExitFailed);
  EXPECT_EQ(clines({"--config", loose, "validate", "--in", path("l.json")}).code, 0);
  const Json j = parse_json_text(clines({"validate", "--in", path("l.json")}).out);
  EXPECT_EQ(j["tolerances"]["ineq_margin"], 10.0);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(clines({}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"validate"}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"--tol-eq", "abc", "validate", "--in", COMMONLINES_FIXTURE}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"--tol-eq", "-1", "validate", "--in", COMMONLINES_FIXTURE}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"--base-triple", "worst", "validate", "--in", COMMONLINES_FIXTURE}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"validate", "--in", path("missing.json")}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"validate", "--in", write("bad.json", "{not json")}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"--config", write("cfg.json", R"({"seed": "x"})"), "validate", "--in", COMMONLINES_FIXTURE}).code,
            cli::kExitUsage);
  EXPECT_EQ(clines({"realize", "--in", COMMONLINES_FIXTURE, "--out", path("o.json")}).code, cli::kExitUsage);
  EXPECT_EQ(clines({"perturb", "--in", COMMONLINES_FIXTURE, "--sigma", "-1", "--out", path("o.json")}).code,
            cli::kExitUsage);
  EXPECT_EQ(clines({"--help"}).code, cli::kExitOk);
}
