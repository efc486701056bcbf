#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "testing.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(AB3_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("ab3_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  fs::path dir_;

  // Three party configs on fresh loopback ports; party `odd` gets session 99.
  std::array<fs::path, 3> write_configs(int odd = -1) {
    std::array<std::string, 3> peers;
    for (auto& p : peers) p = "127.0.0.1:" + std::to_string(ab3::testing::free_port());
    std::array<fs::path, 3> paths;
    for (int i = 0; i < 3; ++i) {
      json c{{"party_id", i},
             {"peers", peers},
             {"session_id", i == odd ? 99 : 1},
             {"seed", 1000 + i},
             {"connect_timeout_ms", 3000}};
      paths[i] = dir_ / ("party" + std::to_string(i) + ".json");
      std::ofstream(paths[i]) << c.dump();
    }
    return paths;
  }

  std::array<Result, 3> run_parties(const std::array<fs::path, 3>& cfgs, const std::string& extra) {
    std::array<Result, 3> res;
    std::vector<std::thread> ts;
    for (int i = 0; i < 3; ++i)
      ts.emplace_back([&, i] {
        const std::string id = std::to_string(i);
        res[i] = run("run-party --config " + cfgs[i].string() + " " + extra + " --model-out " +
                     (dir_ / ("model" + id + ".json")).string() + " --stats-out " +
                     (dir_ / ("stats" + id + ".json")).string() + " --shares-out " +
                     (dir_ / ("shares" + id + ".json")).string());
      });
    for (auto& t : ts) t.join();
    return res;
  }
};

TEST_F(CliTest, RequiresASubcommand) { EXPECT_NE(run("").status, 0); }

TEST_F(CliTest, SigmoidTableColumns) {
  const auto r = run("sigmoid-table --kind 3 --from -8 --to 8 --step 0.5 --out " +
                     (dir_ / "t.csv").string());
  ASSERT_EQ(r.status, 0) << r.out;
  const std::string text = slurp(dir_ / "t.csv");
  EXPECT_EQ(text.rfind("x,approx,true,error\n", 0), 0u);
  EXPECT_EQ(count_lines(text), 34u);
  EXPECT_NE(r.out.find("max |error|"), std::string::npos);
}

TEST_F(CliTest, BenchCsv) {
  const auto r = run("bench --features 4,8 --batch 8 --iters 2");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("features,batch,iterations,seconds,iterations_per_second,"
                        "rounds_per_iteration,bytes_per_iteration\n",
                        0),
            0u);
  EXPECT_EQ(count_lines(r.out), 3u);
  EXPECT_NE(r.out.find("4,8,2,"), std::string::npos);
  EXPECT_NE(r.out.find(",18.00,"), std::string::npos);
}

TEST_F(CliTest, SimulateJsonAndEqualRounds) {
  const auto three = run("simulate --synthetic gaussian --rows 64 --features 4 --iterations 7 --sigmoid 3 --json");
  const auto five = run("simulate --synthetic gaussian --rows 64 --features 4 --iterations 7 --sigmoid 5 --json");
  ASSERT_EQ(three.status, 0) << three.out;
  ASSERT_EQ(five.status, 0) << five.out;
  const json a = json::parse(three.out), b = json::parse(five.out);
  EXPECT_EQ(a["iterations"], 7);
  EXPECT_EQ(a["training_rounds"], b["training_rounds"]);
  EXPECT_NE(a["training_bytes"], b["training_bytes"]);
  EXPECT_EQ(a["weights"].size(), 4u);
  // Deterministic under a fixed seed.
  EXPECT_EQ(json::parse(run("simulate --synthetic gaussian --rows 64 --features 4 --iterations 7 "
                            "--sigmoid 5 --json")
                            .out)["weights"],
            b["weights"]);
}

TEST_F(CliTest, EvalPlaintext) {
  const auto r = run("eval --synthetic separable --rows 40 --features 3 --folds 4 --plaintext "
                     "--iterations 20 --json " + (dir_ / "cv.json").string());
  ASSERT_EQ(r.status, 0) << r.out;
  const json rep = json::parse(slurp(dir_ / "cv.json"));
  EXPECT_EQ(rep["folds"].size(), 4u);
}

TEST_F(CliTest, BadInputsExitNonzero) {
  std::ofstream(dir_ / "bad.csv") << "a,y\n1,2\n";
  const auto r = run("simulate --data " + (dir_ / "bad.csv").string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("parse"), std::string::npos);
  EXPECT_NE(run("simulate --synthetic nope").status, 0);
  EXPECT_EQ(run("simulate --synthetic separable --batch-size 0").status, 2);
}

TEST_F(CliTest, ColumnsFileWarnsForMissingNames) {
  std::ofstream(dir_ / "d.csv") << "a,b,c,y\n1,2,3,0\n2,1,0,1\n3,3,1,0\n0,1,2,1\n";
  std::ofstream(dir_ / "cols.txt") << "a\nzz\nc\n";
  const auto r = run("simulate --data " + (dir_ / "d.csv").string() + " --columns " +
                     (dir_ / "cols.txt").string() + " --batch-size 2 --iterations 2 --json");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("warning: column 'zz' not found"), std::string::npos);
}

TEST_F(CliTest, ThreePartiesAgree) {
  const auto cfgs = write_configs();
  const auto res = run_parties(cfgs, "--synthetic gaussian --rows 48 --features 3 --iterations 4 "
                                     "--batch-size 16 --partition dealer");
  for (const auto& r : res) ASSERT_EQ(r.status, 0) << r.out;
  const json m0 = json::parse(slurp(dir_ / "model0.json"));
  const json s0 = json::parse(slurp(dir_ / "stats0.json"));
  for (int i = 1; i < 3; ++i) {
    const std::string id = std::to_string(i);
    EXPECT_EQ(json::parse(slurp(dir_ / ("model" + id + ".json")))["weights"], m0["weights"]);
    EXPECT_EQ(json::parse(slurp(dir_ / ("stats" + id + ".json")))["total"]["rounds"],
              s0["total"]["rounds"]);
  }
  // Same seeds and session as the simulator's defaults.
  const json sim = json::parse(run("simulate --synthetic gaussian --rows 48 --features 3 "
                                   "--iterations 4 --batch-size 16 --partition dealer --json")
                                   .out);
  EXPECT_EQ(sim["weights"], m0["weights"]);
}

TEST_F(CliTest, WrongSessionIsHandshakeError) {
  const auto cfgs = write_configs(1);
  const auto res = run_parties(cfgs, "--synthetic gaussian --rows 48 --features 3 --iterations 2 "
                                     "--batch-size 16 --partition dealer");
  EXPECT_NE(res[1].status, 0);
  EXPECT_NE(res[1].out.find("handshake"), std::string::npos) << res[1].out;
}

TEST_F(CliTest, RevealToNoneWritesShares) {
  const auto cfgs = write_configs();
  const auto res = run_parties(cfgs, "--synthetic gaussian --rows 48 --features 3 --iterations 2 "
                                     "--batch-size 16 --partition dealer --reveal-to none");
  for (const auto& r : res) ASSERT_EQ(r.status, 0) << r.out;
  std::array<json, 3> shares;
  for (int i = 0; i < 3; ++i) {
    const std::string id = std::to_string(i);
    EXPECT_FALSE(fs::exists(dir_ / ("model" + id + ".json")));
    shares[i] = json::parse(slurp(dir_ / ("shares" + id + ".json")));
  }
  // Replicated: party i's second component is party i+1's first.
  for (int i = 0; i < 3; ++i) EXPECT_EQ(shares[i]["second"], shares[(i + 1) % 3]["first"]);
}

}  // namespace
