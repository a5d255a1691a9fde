#include "dockrl/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dockrl {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path config_path(const std::string& name) {
  return fs::path(DOCKRL_SOURCE_DIR) / "configs" / name;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dockrl_cli_" + name);
  fs::remove_all(p);
  return p;
}

fs::path write_json(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "dockrl_cli_configs";
  fs::create_directories(dir);
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::vector<std::string> tiny_overrides() {
  return {"--set", "agent.hidden_sizes=[16,16]", "--set", "agent.batch_size=32",
          "--set", "agent.warmup_steps=50",      "--set", "harness.total_timesteps=300",
          "--set", "harness.checkpoint_interval=300"};
}

TEST(CliCheck, ReferenceConfigsResolve) {
  for (const char* name :
       {"paper_td3.json", "paper_sac.json", "paper_ppo.json", "desk_td3.json"}) {
    const CliResult r = run({"check", "--config", config_path(name).string()});
    ASSERT_EQ(r.code, 0) << name << ": " << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j.contains("dynamics"));
    EXPECT_EQ(j["reward"]["w_d_inside"], 30.0);
  }
  const auto paper = nlohmann::json::parse(
      run({"check", "--config", config_path("paper_sac.json").string()}).out);
  EXPECT_EQ(paper["agent"]["algo"], "sac");
  EXPECT_EQ(paper["agent"]["hidden_sizes"], nlohmann::json({400, 300, 200, 100}));
  EXPECT_EQ(paper["harness"]["total_timesteps"], 100000);
  EXPECT_EQ(paper["reward"]["r_goal"], 15000.0);
}

TEST(CliCheck, ConstraintViolationNamesKey) {
  const CliResult r = run({"check", "--config", config_path("paper_td3.json").string(),
                           "--set", "agent.gamma=1.5"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("agent.gamma"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.rfind("error kind=config key=agent.gamma", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(CliCheck, UnknownKeysRejected) {
  const CliResult a = run({"check", "--config", config_path("paper_td3.json").string(),
                           "--set", "agent.learning_rate=0.1"});
  EXPECT_EQ(a.code, 3);
  EXPECT_NE(a.err.find("agent.learning_rate"), std::string::npos) << a.err;
  const fs::path bad = write_json("unknown.json", R"({"env": {"max_step": 10}})");
  const CliResult b = run({"check", "--config", bad.string()});
  EXPECT_EQ(b.code, 3);
  EXPECT_NE(b.err.find("env.max_step"), std::string::npos) << b.err;
}

TEST(CliCheck, TypeMismatchNamesKey) {
  const fs::path bad = write_json("type.json", R"({"harness": {"seed": "zero"}})");
  const CliResult r = run({"check", "--config", bad.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("harness.seed"), std::string::npos) << r.err;
}

TEST(CliCheck, OverridesComposeLeftToRight) {
  const CliResult r = run({"check", "--config", config_path("desk_td3.json").string(),
                           "--set", "agent.gamma=0.9", "--set", "agent.gamma=0.95",
                           "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["agent"]["gamma"], 0.95);
  EXPECT_EQ(j["harness"]["seed"], 7);
}

TEST(CliCheck, MissingConfigFileNamesTheFlag) {
  const CliResult r = run({"check", "--config", "/nonexistent/dockrl.json"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.err.rfind("error kind=config key=--config", 0), 0u) << r.err;
}

TEST(CliCheck, MissingConfigFlagIsUsageError) {
  EXPECT_EQ(run({"check"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(CliTrainEval, EndToEnd) {
  const fs::path dir = temp_dir("e2e");
  std::vector<std::string> train = {"train", "--config",
                                    config_path("desk_td3.json").string(), "--out",
                                    (dir / "run").string()};
  for (const auto& s : tiny_overrides()) train.push_back(s);
  const CliResult t = run(train);
  ASSERT_EQ(t.code, 0) << t.err;
  const auto resolved = nlohmann::json::parse(std::ifstream(dir / "run" / "resolved_config.json"));
  EXPECT_EQ(resolved["harness"]["total_timesteps"], 300);

  const CliResult e =
      run({"eval", "--config", config_path("desk_td3.json").string(), "--checkpoint",
           (dir / "run" / "checkpoints" / "final").string(), "--out", (dir / "eval").string(),
           "--set", "agent.hidden_sizes=[16,16]"});
  ASSERT_EQ(e.code, 0) << e.err;
  int csvs = 0, svgs = 0;
  for (const auto& entry : fs::directory_iterator(dir / "eval")) {
    const auto ext = entry.path().extension();
    if (ext == ".csv") ++csvs;
    if (ext == ".svg") ++svgs;
  }
  EXPECT_EQ(csvs, 10);
  EXPECT_EQ(svgs, 1);
  const auto summary = nlohmann::json::parse(std::ifstream(dir / "eval" / "summary.json"));
  EXPECT_EQ(summary["episode_count"], 10);
  for (const char* k : {"mean_return", "std_return", "mean_steps_to_goal", "success_count"}) {
    EXPECT_TRUE(summary.contains(k)) << k;
  }

  const CliResult p = run({"plot", (dir / "eval" / "trajectory_run0_ep0.csv").string(),
                           (dir / "eval" / "trajectory_run1_ep4.csv").string(), "--curve",
                           (dir / "run" / "learning_curve.csv").string(), "--out",
                           (dir / "plot.svg").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_TRUE(fs::exists(dir / "plot.svg"));
  EXPECT_TRUE(fs::exists(dir / "plot.curve.svg"));
}

TEST(CliEval, CorruptCheckpointIsFormatError) {
  const fs::path dir = temp_dir("corrupt");
  fs::create_directories(dir);
  std::ofstream(dir / "actor.bin") << "DOCKRL01\xff\xff\xff\xff";
  const CliResult r = run({"eval", "--config", config_path("desk_td3.json").string(),
                           "--checkpoint", (dir / "actor.bin").string(), "--out",
                           (dir / "eval").string()});
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("layer_count"), std::string::npos) << r.err;
}

TEST(CliTrain, DefaultOutputRootFromEnvironment) {
  const fs::path root = temp_dir("envroot");
  ::setenv("DOCKRL_OUT", root.c_str(), 1);
  std::vector<std::string> args = {"train", "--config", config_path("desk_td3.json").string(),
                                   "--seed", "3"};
  for (const auto& s : tiny_overrides()) args.push_back(s);
  const CliResult r = run(args);
  ::unsetenv("DOCKRL_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(root / "td3_seed3" / "learning_curve.csv"));
}

}  // namespace
}  // namespace dockrl
