#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "domcert/cli.hpp"
#include "support.hpp"

using namespace domcert;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("domcert_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string graph(const Graph& g, const std::string& name) const {
    write_json_file(path(name), graph_to_json(g));
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ConstructCertifyVerify) {
  EXPECT_EQ(run({"construct", "c6_plus", "-o", path("g.json")}).code, cli::kOk);
  EXPECT_EQ(read_graph_file(path("g.json")), c6_plus());
  EXPECT_EQ(run({"certify", path("g.json"), "-o", path("c.json")}).code, cli::kOk);
  const auto v = run({"--json", "verify", path("g.json"), path("c.json")});
  EXPECT_EQ(v.code, cli::kOk);
  EXPECT_EQ(Json::parse(v.out)["verdict"], "PASS");
  EXPECT_TRUE(v.err.empty());
}

TEST_F(Cli, VerifyAgainstTheWrongGraphFails) {
  run({"construct", "c6_plus", "-o", path("g.json")});
  run({"certify", path("g.json"), "-o", path("c.json")});
  const std::string other = graph(even_cycle(6), "c6.json");
  EXPECT_EQ(run({"verify", other, path("c.json")}).code, cli::kFail);
}

TEST_F(Cli, ScreenReportsTheFailingCondition) {
  const auto r = run({"screen", graph(domcert::path(4), "p4.json")});
  EXPECT_EQ(r.code, cli::kFail);
  EXPECT_EQ(Json::parse(r.out)["failures"][0]["reason"], "SIDE_IRREGULAR");
  EXPECT_EQ(run({"screen", graph(c6_plus(), "c.json")}).code, cli::kOk);
}

TEST_F(Cli, DensityIsExactForRationalGraphons) {
  const auto w = StepGraphon::exact({{make_rational(1, 2)}}, {Rational(1)});
  write_json_file(path("w.json"), graphon_to_json(w));
  const auto r = run({"density", "--pattern", graph(domcert::path(2), "k2.json"), "--graphon", path("w.json")});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(Json::parse(r.out)["exact"], "1/2");
  const auto h = run({"hom", "--pattern", path("k2.json"), "--target", graph(even_cycle(6), "c6.json")});
  EXPECT_EQ(Json::parse(h.out)["hom"], "12");
}

TEST_F(Cli, FalsifyExitsWithTheViolationCode) {
  const auto r = run({"falsify", "--h", graph(domcert::path(4), "p4.json"), "--sub", graph(domcert::path(3), "p3.json")});
  EXPECT_EQ(r.code, cli::kViolation);
  EXPECT_EQ(Json::parse(r.out)["verdict"], "VIOLATION");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"nonsense"}).code, cli::kUsage);
  EXPECT_EQ(run({"construct", "no_such_family"}).code, cli::kUsage);
  EXPECT_EQ(run({"construct", "path"}).code, cli::kUsage);
  EXPECT_EQ(run({"screen", path("missing.json")}).code, cli::kUsage);
  std::ofstream(path("bad.json")) << "{\"n\": 2, \"edges\": [[0, 0]]}";
  EXPECT_EQ(run({"screen", path("bad.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  const std::string g = graph(perfect_tree(3, 2), "t.json");
  const auto a = run({"--json", "certify", g});
  const auto b = run({"--json", "certify", g});
  EXPECT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
  const std::string h = graph(c6_plus(), "h.json"), s = graph(even_cycle(6), "s.json");
  EXPECT_EQ(run({"--json", "falsify", "--h", h, "--sub", s, "--restarts", "2", "--iters", "20"}).out,
            run({"--json", "falsify", "--h", h, "--sub", s, "--restarts", "2", "--iters", "20"}).out);
}

TEST_F(Cli, LibraryGraphsRoundTripThroughTheTools) {
  const std::vector<std::vector<std::string>> families{
      {"c6_plus"}, {"even_cycle", "6"}, {"complete_bipartite", "3", "3"}, {"hypercube", "3"},
      {"perfect_tree", "3", "2"}, {"path", "5"}, {"hypercube_ball", "3", "2"}};
  for (auto f : families) {
    f.insert(f.begin(), "construct");
    f.push_back("-o");
    f.push_back(path("g.json"));
    ASSERT_EQ(run(f).code, cli::kOk) << f[1];
    ASSERT_EQ(run({"certify", path("g.json"), "-o", path("c.json")}).code, cli::kOk) << f[1];
    EXPECT_EQ(run({"verify", path("g.json"), path("c.json")}).code, cli::kOk) << f[1];
  }
}

TEST_F(Cli, StarReplacementHintsDrivePercolate) {
  ASSERT_EQ(run({"construct", "star_replacement", "3", "--subsets", "1;2;1,2", "--center", "1", "-o", path("s.json"),
                 "--with-hints"})
                .code,
            cli::kOk);
  const auto r = run({"percolate", path("s.json"), "--layers", path("s.json.hints.json")});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(run({"involutions", path("s.json")}).code, cli::kOk);
}

TEST_F(Cli, ExploreTrivialCase) {
  const auto r = run({"--json", "explore", "3", "2", "2"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(Json::parse(r.out)["verdict"], "NO_VIOLATION_FOUND");
}
