#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "toruslab/cli.hpp"

using namespace toruslab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "toruslab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("toruslab-cli-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("config parsing") {
  const auto d = parse_config_text("{}");
  CHECK(d.n == ExperimentConfig{}.n);
  CHECK(d.trials == ExperimentConfig{}.trials);
  const auto c = parse_config_text(R"({"n": 8, "seed": 42})");
  CHECK(c.n == 8);
  CHECK(c.seed == 42);
  try {
    parse_config_text(R"({"trialz": 10})");
    FAIL("unknown key accepted");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("trialz") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("{"), UsageError);
  CHECK_THROWS_AS(parse_config_text(R"({"n": "eight"})"), UsageError);
  CHECK_THROWS_AS(parse_config_text("[1, 2]"), UsageError);
  CHECK_THROWS_AS(load_config("/nonexistent/toruslab.json"), UsageError);
}

TEST_CASE("exact subcommands") {
  const auto dir = scratch("equiv");
  const auto r = run({"equiv-check", "--n", "3", "--out-dir", dir.string()});
  CHECK(r.code == kExitOk);
  const auto s = read_json(dir / "summary.json");
  CHECK(s["assertion_ok"] == true);
  CHECK(s["result"]["discrepancy"] == "0");
  CHECK(s["schema_version"] == kSchemaVersion);

  const auto g = run({"gamma-check", "--n", "5", "--out-dir", dir.string()});
  CHECK(g.code == kExitOk);
  const auto gs = read_json(dir / "summary.json");
  CHECK(gs["result"]["cases"] == 100);
  CHECK(gs["result"]["verified"] == 100);
}

TEST_CASE("usage errors exit with 2") {
  const auto dir = scratch("usage");
  CHECK(run({"simulate", "--n", "3", "--steps", "-1", "--out-dir", dir.string()}).code == kExitUsage);
  CHECK(run({"simulate", "--bogus", "--out-dir", dir.string()}).code == kExitUsage);
  CHECK(run({"--out-dir", dir.string()}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"simulate", "--format", "xml", "--out-dir", dir.string()}).code == kExitUsage);
  CHECK(run({"simulate", "--n", "4", "--l", "5", "--out-dir", dir.string()}).code == kExitUsage);
  CHECK(run({"exact", "--n", "4", "--out-dir", dir.string()}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);

  const auto cfg = dir / "bad.json";
  fs::create_directories(dir);
  std::ofstream(cfg) << R"({"trialz": 10})";
  const auto r = run({"simulate", "--config", cfg.string(), "--out-dir", dir.string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("trialz") != std::string::npos);
}

TEST_CASE("manifest is written before the run") {
  const auto dir = scratch("manifest");
  const auto r = run({"match-stats", "--n", "6", "--x", "4", "--z", "99", "--trials", "5", "--out-dir", dir.string()});
  CHECK(r.code == kExitUsage);
  REQUIRE(fs::exists(dir / "manifest.json"));
  const auto m = read_json(dir / "manifest.json");
  CHECK(m["subcommand"] == "match-stats");
  CHECK(m["config"]["n"] == 6);
  CHECK_FALSE(fs::exists(dir / "summary.json"));
}

TEST_CASE("empty config echoes defaults; precedence of seeds") {
  const auto dir = scratch("seed");
  fs::create_directories(dir);
  const auto empty = dir / "empty.json";
  std::ofstream(empty) << "{}";
  REQUIRE(run({"simulate", "--n", "3", "--trials", "4", "--steps", "5", "--config", empty.string(), "--out-dir",
               dir.string()})
              .code == kExitOk);
  auto m = read_json(dir / "manifest.json");
  CHECK(m["config"]["seed"] == 1);
  CHECK(m["config"]["l"] == ExperimentConfig{}.l);

  ::setenv("TORUSLAB_SEED", "77", 1);
  REQUIRE(run({"simulate", "--n", "3", "--trials", "4", "--steps", "5", "--out-dir", dir.string()}).code == kExitOk);
  CHECK(read_json(dir / "manifest.json")["config"]["seed"] == 77);
  const auto seeded = dir / "seeded.json";
  std::ofstream(seeded) << R"({"seed": 5})";
  REQUIRE(run({"simulate", "--n", "3", "--trials", "4", "--steps", "5", "--config", seeded.string(), "--out-dir",
               dir.string()})
              .code == kExitOk);
  CHECK(read_json(dir / "manifest.json")["config"]["seed"] == 5);
  REQUIRE(run({"simulate", "--n", "3", "--trials", "4", "--steps", "5", "--config", seeded.string(), "--seed", "9",
               "--out-dir", dir.string()})
              .code == kExitOk);
  CHECK(read_json(dir / "manifest.json")["config"]["seed"] == 9);
  ::unsetenv("TORUSLAB_SEED");
}

TEST_CASE("csv layout and json format") {
  const auto dir = scratch("format");
  REQUIRE(run({"triple-prob", "--n", "6", "--l", "2", "--trials", "2500", "--batch", "1000", "--out-dir",
               dir.string()})
              .code == kExitOk);
  const std::string csv = slurp(dir / "results.csv");
  CHECK(csv.rfind("batch,first_trial,trials,successes\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  REQUIRE(run({"triple-prob", "--n", "6", "--l", "2", "--trials", "2500", "--batch", "1000", "--format", "json",
               "--out-dir", dir.string()})
              .code == kExitOk);
  const auto rows = read_json(dir / "results.json");
  REQUIRE(rows.is_array());
  CHECK(rows.size() == 3);
  CHECK(rows[2]["trials"] == 500);
}

TEST_CASE("results do not depend on the worker count") {
  const std::vector<std::vector<std::string>> jobs = {
      {"simulate", "--n", "4", "--trials", "300", "--steps", "100"},
      {"triple-prob", "--n", "6", "--l", "2", "--trials", "3000", "--batch", "250"},
      {"match-stats", "--n", "6", "--x", "4", "--trials", "2000", "--batch", "100"},
      {"couple", "--n", "8", "--l", "2", "--trials", "300"},
  };
  for (const auto& job : jobs) {
    std::string reference;
    for (const char* threads : {"1", "2", "8"}) {
      const auto dir = scratch(std::string("det-") + threads);
      auto args = job;
      args.insert(args.end(), {"--seed", "123", "--threads", threads, "--out-dir", dir.string()});
      REQUIRE(run(args).code == kExitOk);
      const std::string csv = slurp(dir / "results.csv");
      CHECK(!csv.empty());
      if (reference.empty()) reference = csv;
      else CHECK(csv == reference);
    }
  }
}
