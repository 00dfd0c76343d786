#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using eqlearn::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = eqlearn::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("eqlearn_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DictReportsTermCount) {
  auto r = run({"dict", "--features", "3", "--m1", "4", "--m2", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["p"], 72);
  r = run({"dict", "--features", "1", "--m1", "3", "--m2", "3"});
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["p"], 4);
  EXPECT_EQ(j["terms"][3]["term"], "x1^3");
  r = run({"--format", "csv", "dict", "--features", "2", "--m1", "1", "--m2", "2"});
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "index,term,e_x1,e_x2");
}

TEST_F(CliTest, InvalidArgumentsExitTwo) {
  EXPECT_EQ(run({"dict", "--features", "0", "--m1", "4", "--m2", "6"}).code, 2);
  EXPECT_EQ(run({"dict", "--features", "3", "--m1", "4", "--m2", "6", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"gen", "lorenz", "--n", "10", "--dt", "0.01", "--seed", "1"}).code, 2);
  EXPECT_EQ(run({"gen", "lorenz", "--n", "5000", "--dt", "0.002"}).code, 2);  // seed missing
  EXPECT_EQ(run({"gen", "duffing", "--seed", "1"}).code, 2);
}

TEST_F(CliTest, GenIsDeterministicAndEchoesConfig) {
  const std::vector<std::string> args{"--seed", "7", "gen", "lorenz", "--n", "5000", "--dt", "0.002", "--sigma", "0"};
  auto a = run(args);
  auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "t,x1,x2,x3");
  const Json cfg = Json::parse(a.err);
  EXPECT_EQ(cfg["system"], "lorenz");
  EXPECT_EQ(cfg["n"], 5000);

  auto rf = run({"--seed", "1", "gen", "rf", "--n", "100", "--dt", "0.1"});
  EXPECT_EQ(rf.code, 0) << rf.err;

  ASSERT_EQ(run({"--seed", "7", "--out", path("a.csv"), "gen", "lorenz", "--n", "3000", "--dt", "0.002", "--sigma", "0.01"}).code, 0);
  ASSERT_EQ(run({"--seed", "7", "--out", path("b.csv"), "gen", "lorenz", "--n", "3000", "--dt", "0.002", "--sigma", "0.01"}).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, FitBadInputExitsThree) {
  EXPECT_EQ(run({"fit", "--data", path("missing.csv")}).code, 3);
  std::ofstream(path("bad.csv")) << "x1,y\n1,2\n3\n";
  EXPECT_EQ(run({"fit", "--data", path("bad.csv")}).code, 3);
  std::ofstream(path("noy.csv")) << "x1,x2\n1,2\n3,4\n";
  EXPECT_EQ(run({"fit", "--data", path("noy.csv")}).code, 3);
  std::ofstream(path("uneven.csv")) << "t,x1\n0,1\n0.1,2\n0.3,3\n0.4,4\n";
  EXPECT_EQ(run({"fit", "--mode", "dynsys", "--data", path("uneven.csv")}).code, 3);
}

TEST_F(CliTest, FitMethodFailureExitsFour) {
  std::ofstream(path("const.csv")) << "x1,y\n1,2\n2,2\n3,2\n4,2\n";
  const auto r = run({"fit", "--data", path("const.csv"), "--m1", "2", "--m2", "2"});
  EXPECT_EQ(r.code, 4);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(j["error"]["code"], "ConstantResponse");
}

TEST_F(CliTest, FitRecoversGeneratedPolynomial) {
  ASSERT_EQ(run({"--seed", "3", "--out", path("poly.csv"), "gen", "poly", "--size", "2"}).code, 0);
  const auto r = run({"fit", "--data", path("poly.csv"), "--method", "cs-r2", "--m1", "2", "--m2", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["targets"][0]["fit"]["model_size"], 2);
}

TEST_F(CliTest, FitCleanLorenzRecoversAllEquations) {
  ASSERT_EQ(run({"--seed", "1", "--out", path("lorenz.csv"), "gen", "lorenz", "--n", "2000", "--dt", "0.002"}).code, 0);
  const auto r = run({"fit", "--data", path("lorenz.csv"), "--mode", "dynsys", "--pairing", "midpoint", "--method",
                      "cs-r2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  const std::vector<std::vector<std::string>> want{{"x1", "x2"}, {"x1", "x2", "x1·x3"}, {"x3", "x1·x2"}};
  ASSERT_EQ(j["targets"].size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<std::string> got;
    for (const auto& t : j["targets"][k]["fit"]["terms"]) got.push_back(t["term"]);
    std::sort(got.begin(), got.end());
    auto w = want[k];
    std::sort(w.begin(), w.end());
    EXPECT_EQ(got, w) << "equation " << k;
  }
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(j["targets"][k]["diagnostics"]["stop_reason"], "converged");
}

TEST_F(CliTest, FitBsrReportsMonotoneTrace) {
  ASSERT_EQ(run({"--seed", "2", "--out", path("lorenz.csv"), "gen", "lorenz", "--n", "2000", "--dt", "0.002", "--sigma", "0.001"}).code, 0);
  const auto r = run({"fit", "--data", path("lorenz.csv"), "--mode", "dynsys", "--method", "bsr", "--m1", "2", "--m2", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  for (const auto& target : j["targets"]) {
    double prev = target["diagnostics"]["initial_log_evidence"];
    ASSERT_FALSE(target["diagnostics"]["trace"].empty());
    for (const auto& step : target["diagnostics"]["trace"]) {
      EXPECT_GT(step["log_evidence"].get<double>(), prev);
      prev = step["log_evidence"];
    }
  }
  const auto csv = run({"--format", "csv", "fit", "--data", path("lorenz.csv"), "--mode", "dynsys", "--method", "frols",
                        "--m1", "2", "--m2", "2"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "target,term,weight");
}

TEST_F(CliTest, BenchWritesGroupsAndIsDeterministic) {
  Json cfg = {{"scenarios", Json::array({{{"system", "lorenz"}, {"n", 600}, {"dt", 0.005}, {"sigma", 0.001}},
                                         {{"system", "lorenz"}, {"n", 700}, {"dt", 0.005}, {"sigma", 0.01}},
                                         {{"system", "lorenz"}, {"n", 800}, {"dt", 0.005}, {"sigma", 0.001}},
                                         {{"system", "rf"}, {"n", 500}, {"dt", 0.02}, {"sigma", 0.0001}}})},
              {"methods", {"cs-r2", "stlsq"}},
              {"cs", {{"m_max", 3}}},
              {"n_initial", 2}};
  std::ofstream(path("cfg.json")) << cfg.dump();
  const auto a = run({"--seed", "11", "--out", path("a"), "bench", "--config", path("cfg.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  const std::string csv = slurp(path("a/results.csv"));
  std::set<std::pair<std::string, std::string>> groups;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "scenario_id,method,metric,value");
  while (std::getline(lines, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    groups.insert({line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1)});
  }
  EXPECT_EQ(groups.size(), 8u);
  const Json summary = Json::parse(slurp(path("a/summary.json")));
  EXPECT_EQ(summary["scenarios"], 4);
  EXPECT_TRUE(summary["methods"].contains("cs-r2"));
  EXPECT_NE(a.out.find("stlsq"), std::string::npos);

  ASSERT_EQ(run({"--seed", "11", "--workers", "4", "--out", path("b"), "bench", "--config", path("cfg.json")}).code, 0);
  EXPECT_EQ(slurp(path("b/results.csv")), csv);
}

TEST_F(CliTest, BenchExitCodes) {
  std::ofstream(path("empty.json")) << R"({"scenarios": [], "methods": ["bsr"]})";
  EXPECT_EQ(run({"--seed", "1", "--out", path("o"), "bench", "--config", path("empty.json")}).code, 5);
  std::ofstream(path("short.json")) << R"({"scenarios": [{"system": "lorenz", "n": 10, "dt": 0.01}], "methods": ["bsr"]})";
  EXPECT_EQ(run({"--seed", "1", "--out", path("o"), "bench", "--config", path("short.json")}).code, 5);
  std::ofstream(path("broken.json")) << "{not json";
  EXPECT_EQ(run({"--seed", "1", "--out", path("o"), "bench", "--config", path("broken.json")}).code, 3);
  std::ofstream(path("nometh.json")) << R"({"grid": "lorenz-default"})";
  EXPECT_EQ(run({"--seed", "1", "--out", path("o"), "bench", "--config", path("nometh.json")}).code, 2);
}
