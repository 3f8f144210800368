#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "kne/cli.hpp"
#include "kne/io.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kKarate = std::string(KNE_TEST_DATA_DIR) + "/karate.edgelist";
const std::string kKarateLabels = std::string(KNE_TEST_DATA_DIR) + "/karate.labels";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"kernelne"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = kne::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kne_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, kne::cli::kExitOk);
  EXPECT_EQ(run({}).code, kne::cli::kExitUsage);
  EXPECT_EQ(run({"train", "--input", kKarate, "--output", path("m"), "--bogus"}).code, kne::cli::kExitUsage);
  EXPECT_EQ(run({"train", "--input", path("missing.txt"), "--output", path("m")}).code, kne::cli::kExitUsage);
  EXPECT_EQ(run({"train", "--input", kKarate, "--output", path("m"), "--dim", "0"}).code, kne::cli::kExitUsage);
  EXPECT_EQ(run({"train", "--input", kKarate, "--output", path("m"), "--kernel", "rbf"}).code,
            kne::cli::kExitUsage);
  EXPECT_EQ(run({"train", "--input", kKarate, "--output", path("m"), "--multi"}).code, kne::cli::kExitUsage);
  EXPECT_EQ(run({"eval-lp", "--input", kKarate, "--ratio", "1.5"}).code, kne::cli::kExitUsage);
  EXPECT_FALSE(fs::exists(path("m")));
}

TEST_F(CliTest, MalformedEdgeListIsRuntimeFailure) {
  std::ofstream(path("bad.txt")) << "0 1\n2\n";
  const auto r = run({"train", "--input", path("bad.txt"), "--output", path("m")});
  EXPECT_EQ(r.code, kne::cli::kExitRuntime);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, TrainWithDefaultsWritesEmbeddings) {
  const auto r = run({"train", "--input", kKarate, "--output", path("m.txt"), "--kernel", "sch", "--sigma", "2.0",
                      "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("seed=42"), std::string::npos);
  EXPECT_NE(r.err.find("dim=128 window=10 walks=80 length=10 negatives=5"), std::string::npos);
  const auto loaded = kne::read_embeddings(path("m.txt"));
  EXPECT_EQ(loaded.model.node_count(), 34u);
  EXPECT_EQ(loaded.model.dim(), 128u);
  EXPECT_EQ(loaded.labels[0], "0");
}

TEST_F(CliTest, MultiKernelRunAndCenterTable) {
  const auto r = run({"train", "--input", kKarate, "--output", path("a.txt"), "--output-b", path("b.txt"), "--multi",
                      "--kernel", "gauss", "--sigmas", "1.0,2.0,3.0", "--dim", "8", "--walks", "5", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("sigmas=1,2,3"), std::string::npos);
  EXPECT_NE(r.err.find("kernel coefficients:"), std::string::npos);
  EXPECT_NE(slurp(path("a.txt")), slurp(path("b.txt")));
}

TEST_F(CliTest, SameSeedGivesIdenticalFiles) {
  for (const char* name : {"x.txt", "y.txt"}) {
    ASSERT_EQ(run({"train", "--input", kKarate, "--output", path(name), "--dim", "8", "--walks", "5", "--quiet"}).code,
              0);
  }
  EXPECT_EQ(slurp(path("x.txt")), slurp(path("y.txt")));
  ASSERT_EQ(run({"train", "--input", kKarate, "--output", path("z.txt"), "--dim", "8", "--walks", "5", "--seed", "7",
                 "--quiet"})
                .code,
            0);
  EXPECT_NE(slurp(path("x.txt")), slurp(path("z.txt")));
}

TEST_F(CliTest, WalkDump) {
  const auto r = run({"walks", "--input", kKarate, "--output", path("w.txt"), "--walks", "2", "--length", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(path("w.txt")));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    std::istringstream tokens(line);
    std::size_t count = 0;
    for (std::string t; tokens >> t;) ++count;
    EXPECT_EQ(count, 5u);
  }
  EXPECT_EQ(lines, 68u);
}

TEST_F(CliTest, LinkPredictionIsReproducible) {
  auto once = [&](const std::string& csv) {
    return run({"eval-lp", "--input", kKarate, "--dim", "8", "--walks", "10", "--quiet", "--csv", csv});
  };
  const auto a = once(path("a.csv"));
  const auto b = once(path("b.csv"));
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv")).rfind("metric,value,run-count,std\nauc,", 0), 0u);
  EXPECT_NE(a.out.find("auc"), std::string::npos);
}

TEST_F(CliTest, NodeClassificationFromEmbeddingsAndFromGraph) {
  ASSERT_EQ(run({"train", "--input", kKarate, "--output", path("m.txt"), "--dim", "8", "--walks", "10", "--quiet"}).code,
            0);
  const auto r = run({"eval-nc", "--embeddings", path("m.txt"), "--labels", kKarateLabels, "--runs", "5",
                      "--train-ratios", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("metric,value,run-count,std"), std::string::npos);
  EXPECT_NE(r.out.find("micro_f1@0.50,"), std::string::npos);
  EXPECT_NE(r.out.find("macro_f1@0.50,"), std::string::npos);

  const auto g = run({"eval-nc", "--input", kKarate, "--labels", kKarateLabels, "--runs", "3", "--dim", "8", "--walks",
                      "5", "--quiet", "--csv", path("nc.csv")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_NE(slurp(path("nc.csv")).find("micro_f1@0.10,"), std::string::npos);
  EXPECT_EQ(run({"eval-nc", "--labels", kKarateLabels}).code, kne::cli::kExitUsage);
}

}  // namespace
