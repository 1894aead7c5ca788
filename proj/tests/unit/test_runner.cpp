#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fujita/errors.hpp"
#include "fujita/runner.hpp"

using namespace fujita;
using namespace fujita::runner;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fujita_runner_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode parse_code(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "config accepted: " << doc.dump();
  return ErrorCode::InvalidArgument;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fujita");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config({{"pipeline", "blowup"}, {"alpha", 1.5}, {"half_width", 30}});
  EXPECT_EQ(c.pipeline, "blowup");
  EXPECT_EQ(c.alpha, 1.5);
  EXPECT_EQ(c.half_width, 30);
  EXPECT_EQ(c.measure, "degree");
  EXPECT_EQ(c.raw["alpha"], 1.5);
}

TEST(Config, RejectsBadDocuments) {
  EXPECT_EQ(parse_code(json::array()), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"alpha", 1.0}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "bogus"}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "blowup"}, {"alhpa", 1.0}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "blowup"}, {"alpha", "two"}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "blowup"}, {"alpha", -1.0}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "blowup"}, {"tol", 0.0}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "blowup"}, {"measure", "weird"}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "fujita-dichotomy"}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "squeeze-report"}, {"regime", "c3"}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_code({{"pipeline", "blowup"}, {"seed", -3}}), ErrorCode::ConfigParse);
  EXPECT_EQ(parse_config({{"pipeline", "blowup"}, {"seed", 3}}).seed, 3u);
}

TEST(Config, LoadFromFile) {
  const auto dir = scratch("load");
  std::ofstream(dir / "ok.json") << R"({"pipeline": "kernel-validate", "half_width": 20})";
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_EQ(load_config(dir / "ok.json").half_width, 20);
  try {
    (void)load_config(dir / "broken.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParse);
  }
  EXPECT_THROW((void)load_config(dir / "missing.json"), Error);
}

TEST(Run, KernelValidatePasses) {
  const auto dir = scratch("kv");
  const auto m = run_experiment(parse_config({{"pipeline", "kernel-validate"}, {"half_width", 60}}), dir);
  const auto doc = json::parse(slurp(dir / "kernel_validate.json"));
  EXPECT_TRUE(doc["all_pass"].get<bool>());
  EXPECT_FALSE(m.stages.empty());
}

TEST(Run, ManifestListsEveryFileWithItsHash) {
  const auto dir = scratch("manifest");
  const auto m = run_experiment(parse_config({{"pipeline", "blowup"}, {"half_width", 30}, {"alpha", 1.0}}), dir);
  const auto doc = json::parse(slurp(dir / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& f : doc["files"]) {
    const std::string name = f["path"];
    listed.insert(name);
    EXPECT_EQ(f["sha256"], sha256_hex(dir / name));
    EXPECT_EQ(f["bytes"].get<std::uintmax_t>(), fs::file_size(dir / name));
  }
  std::set<std::string> on_disk;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "manifest.json") on_disk.insert(e.path().filename().string());
  EXPECT_EQ(listed, on_disk);
  EXPECT_EQ(doc["pipeline"], "blowup");
  EXPECT_EQ(doc["version"], kToolVersion);
  EXPECT_EQ(doc["config"]["alpha"], 1.0);
  EXPECT_FALSE(doc["caveats"].empty());
  EXPECT_EQ(m.files.size(), listed.size());
}

TEST(Run, DeterministicOutputs) {
  const json cfg = {{"pipeline", "curvature-search"}, {"half_width", 8}, {"n", 3.0}, {"trials", 8}, {"seed", 7}};
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  const auto m1 = run_experiment(parse_config(cfg), d1);
  const auto m2 = run_experiment(parse_config(cfg), d2);
  ASSERT_EQ(m1.files.size(), m2.files.size());
  for (std::size_t i = 0; i < m1.files.size(); ++i) {
    EXPECT_EQ(m1.files[i].path, m2.files[i].path);
    EXPECT_EQ(m1.files[i].sha256, m2.files[i].sha256);
  }
}

TEST(Run, DichotomyStatuses) {
  const auto dir = scratch("dich");
  const json cfg = {{"pipeline", "fujita-dichotomy"}, {"half_width", 101}, {"alphas", {1.0, 4.0}}, {"data", "kernel"},
                    {"delta", 3.0},                     {"gamma", 4.0},      {"radius", 100},         {"horizon", 200.0},
                    {"data_radius", 50}};
  (void)run_experiment(parse_config(cfg), dir);
  const auto doc = json::parse(slurp(dir / "dichotomy.json"));
  ASSERT_EQ(doc["runs"].size(), 2u);
  EXPECT_EQ(doc["runs"][0]["status"], "blow_up");
  EXPECT_EQ(doc["runs"][1]["status"], "horizon_reached");
}

TEST(Run, StageFailureNamesTheStage) {
  const auto dir = scratch("fail");
  try {
    (void)run_experiment(parse_config({{"pipeline", "blowup"}, {"half_width", 10}, {"radius", 50}}), dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StageFailure);
    EXPECT_NE(std::string(e.what()).find("stage"), std::string::npos);
  }
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  std::ofstream(dir / "ok.json") << R"({"pipeline": "volume-fit", "half_width": 70})";
  std::ofstream(dir / "bad.json") << R"({"pipeline": "nope"})";
  std::ofstream(dir / "fails.json") << R"({"pipeline": "volume-fit", "half_width": 20})";
  EXPECT_EQ(run_cli({"validate", "--config", (dir / "ok.json").string()}), 0);
  EXPECT_EQ(run_cli({"validate", "--config", (dir / "bad.json").string()}), 1);
  EXPECT_EQ(run_cli({"run", "--config", (dir / "ok.json").string(), "--out", (dir / "out").string()}), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
  EXPECT_EQ(run_cli({"run", "--config", (dir / "fails.json").string(), "--out", (dir / "out2").string()}), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 1);
  EXPECT_EQ(run_cli({"run"}), 1);
}
