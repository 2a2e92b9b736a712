#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "acu/anatomy.hpp"
#include "acu/rng.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("acu_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args, const std::string& env = "") const {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = env + " " + ACU_CLI + " " + args + " 2>" + err.string();
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthPipesIntoScore) {
  const auto r = run("synth --technique lift_thrust --label reinforce | " + std::string(ACU_CLI) + " score -");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = json::parse(r.out);
  EXPECT_EQ(report.at("total"), 100.0);
  EXPECT_EQ(report.at("session_id"), "lift_thrust-reinforce");
  EXPECT_NE(r.err.find("lift_thrust-reinforce"), std::string::npos);
}

TEST_F(Cli, ScoreIsDeterministic) {
  ASSERT_EQ(run("synth --technique twist --label reduce --seed 3 --noise-sigma 0.05 --out " + path("t.jsonl")).status, 0);
  const auto a = run("score " + path("t.jsonl"));
  const auto b = run("score " + path("t.jsonl"));
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, BatchKeepsInputOrder) {
  const char* grid[][2] = {{"lift_thrust", "reinforce"}, {"lift_thrust", "reduce"}, {"twist", "reinforce"},
                           {"twist", "reduce"},          {"moxibustion", "mild"},   {"moxibustion", "sparrow"},
                           {"moxibustion", "whirling"}};
  fs::create_directories(dir_ / "traces");
  std::vector<std::string> names;
  for (const auto& g : grid) {
    const std::string name = std::string(g[0]) + "-" + g[1];
    names.push_back(name);
    ASSERT_EQ(run(std::string("synth --technique ") + g[0] + " --label " + g[1] + " --out " +
                  path("traces/" + name + ".jsonl"))
                  .status,
              0);
  }
  std::sort(names.begin(), names.end());
  const auto r = run("score --batch " + path("traces") + " --jobs 3 --out " + path("reports"));
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t i = 0;
  for (; std::getline(lines, line); ++i) {
    ASSERT_LT(i, names.size());
    EXPECT_EQ(line.rfind(names[i] + " ", 0), 0u) << line;
  }
  EXPECT_EQ(i, names.size());
  for (const auto& n : names) EXPECT_TRUE(fs::exists(dir_ / "reports" / (n + ".report.json"))) << n;

  const auto single = run("score --batch " + path("traces") + " --jobs 1 --out " + path("reports1"));
  EXPECT_EQ(single.out, r.out);
  for (const auto& n : names)
    EXPECT_EQ(slurp(dir_ / "reports" / (n + ".report.json")), slurp(dir_ / "reports1" / (n + ".report.json")));
}

TEST_F(Cli, CsvWritesOneFilePerSeries) {
  ASSERT_EQ(run("synth --technique moxibustion --label whirling --out " + path("m.jsonl")).status, 0);
  const auto r = run("score " + path("m.jsonl") + " --format csv --out " + path("csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "csv" / "m.scores.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "csv" / "m.trajectory.csv"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("score " + path("missing.jsonl")).status, 2);
  std::ofstream(path("bad.json")) << "{\"thresholds\": {\"whirl_frame_count\": -3}}";
  ASSERT_EQ(run("synth --technique twist --out " + path("t.jsonl")).status, 0);
  EXPECT_EQ(run("--config " + path("bad.json") + " score " + path("t.jsonl")).status, 3);
  EXPECT_EQ(run("score " + path("t.jsonl"), "ACU_CONFIG=" + path("bad.json")).status, 3);
  EXPECT_EQ(run("score " + path("t.jsonl") + " --format xml").status, 2);
  EXPECT_EQ(run("score " + path("t.jsonl") + " --target-method sideways").status, 2);
  EXPECT_EQ(run("synth --technique twist --label mild").status, 2);

  const auto r = run("--json-errors score " + path("missing.jsonl"));
  EXPECT_EQ(r.status, 2);
  const auto err = json::parse(r.err);
  EXPECT_EQ(err.at("exit_code"), 2);
  EXPECT_EQ(err.at("error").at("code"), "InvalidInput");
  EXPECT_TRUE(err.at("error").at("message").is_string());
}

TEST_F(Cli, LocateAllAcupoints) {
  acu::Xoshiro256 rng(5);
  const auto frame = acu::test::random_skeleton(rng);
  json joints = json::object();
  for (const auto& [name, p] : frame.joints) joints[name] = {p.x(), p.y(), p.z()};
  std::ofstream(path("skel.json")) << json{{"timestamp", 1.5}, {"joints", joints}}.dump();

  const auto r = run("locate " + path("skel.json"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto out = json::parse(r.out);
  EXPECT_EQ(out.at("acupoints").size(), acu::AcupointTable::builtin().size());
  EXPECT_TRUE(out.at("failures").empty());

  const auto csv = run("locate " + path("skel.json") + " --format csv");
  ASSERT_EQ(csv.status, 0);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.out.begin(), csv.out.end(), '\n')),
            1 + acu::AcupointTable::builtin().size());

  joints.erase("right_hand_index_finger_mcp");
  std::ofstream(path("partial.json")) << json{{"joints", joints}}.dump();
  const auto partial = run("locate " + path("partial.json"));
  EXPECT_EQ(partial.status, 2);
  EXPECT_FALSE(json::parse(partial.out).at("failures").empty());

  std::ofstream(path("image.json")) << R"({"joints": {"right_elbow": {"uv": [10, 20], "z": 50}}})";
  EXPECT_EQ(run("locate " + path("image.json")).status, 3);
}
