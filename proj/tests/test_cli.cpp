#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
  int status = -1;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("aef_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(AEF_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = slurp(err);
    return r;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }

  // K4 with unit routes: every airport has the same AEF.
  void k4_openflights() {
    std::string airports;
    const char* codes[] = {"AAA", "BBB", "CCC", "DDD"};
    for (int i = 0; i < 4; ++i)
      airports += std::to_string(i + 1) + ",\"A" + codes[i] + "\",\"City\",\"Testland\",\"" + codes[i] + "\",\"K" + codes[i] +
                  "\",1.0,2.0,10,0,\"U\",\"UTC\",\"airport\",\"Test\"\n";
    std::string routes;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j)
          routes += std::string("XX,1,") + codes[i] + "," + std::to_string(i + 1) + "," + codes[j] + "," +
                    std::to_string(j + 1) + ",,0,738\n";
    write("airports.dat", airports);
    write("routes.dat", routes);
  }

  fs::path dir_;
};

TEST_F(Cli, BuildGraphAndScoresOnK4) {
  k4_openflights();
  auto r = run("build-graph --airports " + path("airports.dat") + " --routes " + path("routes.dat") + " --out " + path("g"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(path("g/edges.csv")).substr(0, 25), "src_iata,dst_iata,weight\n");
  r = run("scores --graph " + path("g/graph.json") + " --out " + path("s"));
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream csv(slurp(path("s/scores.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "iata,raw_aef,aef,degree,w_degree,eigen,w_eigen,betweenness,w_betweenness,clustering,w_clustering,t_core");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_NE(line.find(",2.48490665,0,3,"), std::string::npos) << line;  // ln 12, flat range maps to 0
  }
  EXPECT_EQ(rows, 4);
  auto scores = nlohmann::json::parse(slurp(path("s/scores.json")));
  EXPECT_FALSE(scores[0]["degenerate"].get<bool>());
}

TEST_F(Cli, ScoresAreByteIdenticalAcrossRunsAndWorkerCounts) {
  ASSERT_EQ(run("build-graph --synthetic 80 --rng-seed 4 --out " + path("g")).status, 0);
  ASSERT_EQ(run("scores --graph " + path("g/graph.json") + " --workers 1 --out " + path("a")).status, 0);
  ASSERT_EQ(run("scores --graph " + path("g/graph.json") + " --workers 3 --out " + path("b")).status, 0);
  EXPECT_EQ(slurp(path("a/scores.csv")), slurp(path("b/scores.csv")));
  ASSERT_EQ(run("scores --graph " + path("g/graph.json") + " --iata AAB,AAA --out " + path("c")).status, 0);
  const auto filtered = slurp(path("c/scores.csv"));
  EXPECT_EQ(std::count(filtered.begin(), filtered.end(), '\n'), 3);
  EXPECT_EQ(filtered.find("\nAAB,"), filtered.find('\n'));
}

TEST_F(Cli, ProvenanceRecordsConfigSeedAndDigests) {
  ASSERT_EQ(run("build-graph --synthetic 40 --out " + path("g")).status, 0);
  write("cfg.json", R"({"runs": 3, "max_days": 40, "beta": 0.7, "rng_seed": 9})");
  auto r = run("simulate --graph " + path("g/graph.json") + " --config " + path("cfg.json") +
               " --seed-airport AAA --beta 0.9 --out " + path("sim"));
  ASSERT_EQ(r.status, 0) << r.err;
  auto prov = nlohmann::json::parse(slurp(path("sim/provenance.json")));
  EXPECT_EQ(prov["config"]["runs"], 3);
  EXPECT_DOUBLE_EQ(prov["config"]["beta"].get<double>(), 0.9);  // flag wins over config
  EXPECT_EQ(prov["rng_seed"], 9);
  EXPECT_FALSE(prov["version"].get<std::string>().empty());
  ASSERT_EQ(prov["inputs"].size(), 2u);
  EXPECT_EQ(prov["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(slurp(path("sim/runs.csv")).substr(0, 26), "run,pandemic_day,peak_day\n");
  EXPECT_EQ(slurp(path("sim/series/run_000.csv")).substr(0, 30), "day,region,prevalence_per_100k");
  EXPECT_TRUE(fs::exists(path("sim/series/run_002.csv")));
}

TEST_F(Cli, ExperimentsWriteTheirTables) {
  ASSERT_EQ(run("build-graph --synthetic 40 --out " + path("g")).status, 0);
  const std::string g = " --graph " + path("g/graph.json");
  EXPECT_EQ(run("sweep-beta" + g + " --seeds AAA --runs 2 --max-days 40 --beta-step 0.05 --out " + path("sw")).status, 0);
  EXPECT_EQ(slurp(path("sw/thresholds.csv")).substr(0, 22), "iata,aef,minimal_beta\n");
  EXPECT_EQ(run("time-to-pandemic" + g + " --seed-count 5 --runs 2 --max-days 40 --out " + path("tt")).status, 0);
  EXPECT_TRUE(fs::exists(path("tt/correlations.csv")));
  EXPECT_EQ(run("robustness" + g + " --country \"Synthetic Region 01\" --fractions 0.5 --repeats 1 --out " + path("rb")).status, 0);
  EXPECT_TRUE(fs::exists(path("rb/robustness.csv")));
  EXPECT_EQ(run("branching --dots 2 --trials 5 --r0-step 1 --out " + path("br")).status, 0);
  const auto br = slurp(path("br/branching.csv"));
  EXPECT_EQ(std::count(br.begin(), br.end(), '\n'), 1 + 3 * 2);
}

TEST_F(Cli, FailuresExitNonzeroWithDiagnostics) {
  auto r = run("build-graph --airports " + path("missing.dat") + " --routes " + path("missing.dat") + " --out " + path("x"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("missing.dat"), std::string::npos);
  EXPECT_NE(run("no-such-experiment --out " + path("x")).status, 0);
  EXPECT_NE(run("").status, 0);
  write("cfg.json", R"({"betta": 0.5})");
  ASSERT_EQ(run("build-graph --synthetic 20 --out " + path("g")).status, 0);
  r = run("scores --graph " + path("g/graph.json") + " --config " + path("cfg.json") + " --out " + path("y"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("betta"), std::string::npos);
  r = run("simulate --graph " + path("g/graph.json") + " --seed-airport ZZZ --out " + path("z"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("ZZZ"), std::string::npos);
}

}  // namespace
