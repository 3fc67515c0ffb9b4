#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "builders.hpp"
#include "cvlab/error.hpp"
#include "cvlab/report.hpp"
#include "cvlab/scenario_io.hpp"
#include "cvlab/scene_trace.hpp"
#include "cvlab/simulate.hpp"
#include "cvlab_cli/cli.hpp"
#include "generators.hpp"

using namespace cvlab;
namespace fs = std::filesystem;

namespace {

fs::path source_dir() {
  const char* dir = std::getenv("CVLAB_SOURCE_DIR");
  return dir != nullptr ? dir : CVLAB_SOURCE_DIR;
}

fs::path data(const std::string& rel) { return source_dir() / "tests" / "data" / rel; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cvlab_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

/// Error class encoded in a corpus file name: NN_<class>_<what>.yaml
std::string expected_class(const fs::path& p) {
  const std::string stem = p.stem().string();
  const auto a = stem.find('_');
  const auto b = stem.find('_', a + 1);
  return stem.substr(a + 1, b - a - 1);
}

}  // namespace

TEST(ParseScenario, Minimal) {
  const Scenario s = load_scenario(data("valid/minimal.yaml"));
  EXPECT_EQ(s.name, "minimal");
  EXPECT_EQ(s.horizon, 0u);
  EXPECT_EQ(s.tick_ms, 100u);
  ASSERT_EQ(s.components.size(), 1u);
  EXPECT_EQ(s.behaviors[0].modes, std::set<std::string>{"run"});
  EXPECT_EQ(occupancy_at(s.behaviors[0], 0), Region{Box({0, 0, 0}, {1, 1, 1})});
}

TEST(ParseScenario, MissingReplicationSource) {
  const std::string text = slurp(data("valid/base.yaml"));
  std::string broken = text;
  broken.replace(broken.find("source: B"), 9, "source: X");
  try {
    parse_scenario(broken);
    FAIL() << "expected UnresolvedReference";
  } catch (const UnresolvedReference& e) {
    EXPECT_STREQ(e.kind(), "unresolved-reference");
    EXPECT_NE(e.location().find("replications[0].source"), std::string::npos);
    EXPECT_NE(e.location().find("line 18"), std::string::npos);
  }
}

TEST(ParseScenario, ErrorClassesAreDistinct) {
  const SyntaxError s("x");
  const UnresolvedReference u("x");
  const InvariantViolation i("x");
  EXPECT_NE(std::string(s.kind()), u.kind());
  EXPECT_NE(std::string(u.kind()), i.kind());
  EXPECT_NE(std::string(s.kind()), i.kind());
}

TEST(ParseScenario, MalformedCorpus) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(data("malformed"))) {
    ++count;
    const fs::path p = entry.path();
    SCOPED_TRACE(p.filename().string());
    try {
      load_scenario(p);
      ADD_FAILURE() << "parsed without error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), expected_class(p));
      EXPECT_NE(std::string(e.what()).find("line "), std::string::npos) << e.what();
    }
    const CliRun r = invoke({"validate", p.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(expected_class(p)), std::string::npos) << r.err;
  }
  EXPECT_EQ(count, 20u);
}

TEST(ParseScenario, ShippedScenarioRoundTrips) {
  const Scenario s = load_scenario(source_dir() / "scenarios" / "cyber_virtual.yaml");
  const std::string once = serialize_scenario(s);
  const Scenario again = parse_scenario(once);
  EXPECT_EQ(again, s);
  EXPECT_EQ(serialize_scenario(again), once);
}

TEST(ParseScenario, DropKeepsFullPrecision) {
  build::ScenarioBuilder sb(1);
  sb.link("L_A", "L_B", 0, 0, 0.1 + 0.2);
  const Scenario s = sb.done();
  EXPECT_EQ(parse_scenario(serialize_scenario(s)).links[0].drop, s.links[0].drop);
}

class RoundTrip : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RoundTrip, ParseSerializeIsIdentity) {
  gen::Rng rng(GetParam());
  for (int i = 0; i < 25; ++i) {
    const Scenario s = gen::scenario(rng, {});
    ASSERT_NO_THROW(s.validate());
    const std::string text = serialize_scenario(s);
    const Scenario back = parse_scenario(text);
    ASSERT_EQ(back, s) << text;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RoundTrip, ::testing::Values(51u, 52u));

TEST(SceneTrace, CountsAndOrder) {
  build::ScenarioBuilder sb(0);
  sb.virtual_component("B", build::occupying(0, {0, 0}, Region{build::cube(0, 1)}));
  sb.virtual_component("A", build::occupying(0, {0, 0}, Region{build::cube(3, 4)}));
  std::ostringstream out;
  EXPECT_EQ(export_scene_trace(run(sb.done(), 0, 1), out), 2u);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<std::string> ids;
  while (std::getline(lines, line)) ids.push_back(nlohmann::json::parse(line).at("component"));
  EXPECT_EQ(ids, (std::vector<std::string>{"A", "B"}));

  std::ostringstream empty;
  EXPECT_EQ(export_scene_trace(run(build::ScenarioBuilder(4).done(), 4, 1), empty), 0u);
  EXPECT_TRUE(empty.str().empty());
}

TEST(SceneTrace, WriteFailureThrows) {
  build::ScenarioBuilder sb(2);
  sb.virtual_component("A", build::occupying(2, {0, 2}, Region{build::cube(0, 1)}));
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  EXPECT_THROW(export_scene_trace(run(sb.done(), 2, 1), out), Error);
}

TEST(SceneTrace, SortedForRandomResults) {
  gen::Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    const Scenario s = gen::scenario(rng, {});
    const SimulationResult r = run(s, s.horizon, s.seed);
    std::ostringstream out;
    const std::size_t n = export_scene_trace(r, out);
    EXPECT_EQ(n, r.components.size() * (static_cast<std::size_t>(s.horizon) + 1));
    std::istringstream lines(out.str());
    std::string line;
    std::pair<Tick, std::string> prev{0, ""};
    std::size_t seen = 0;
    while (std::getline(lines, line)) {
      const auto j = nlohmann::json::parse(line);
      const std::pair<Tick, std::string> key{j.at("tick").get<Tick>(), j.at("component").get<std::string>()};
      if (seen++ > 0) {
        ASSERT_LT(prev, key);
      }
      prev = key;
    }
    EXPECT_EQ(seen, n);
  }
}

TEST(Report, RenderingsAgreeOnStatus) {
  const Scenario s = load_scenario(data("valid/colliding.yaml"));
  CheckOptions options;
  options.cross_check = true;
  const Report report = make_report(s, run_checks(s, options));
  const auto j = nlohmann::json::parse(to_json(report));
  EXPECT_FALSE(j.at("passed").get<bool>());
  EXPECT_EQ(j.at("checks").size(), 1u);
  EXPECT_EQ(j.at("checks")[0].at("status"), "fail");
  EXPECT_EQ(j.at("checks")[0].at("engine"), "both");
  EXPECT_EQ(j.at("checks")[0].at("witness").at("tick"), 7);
  EXPECT_EQ(j.at("tool_version"), kToolVersion);
  EXPECT_NE(to_text(report).find("FAIL collision"), std::string::npos);
}

TEST(Cli, ValidateGoodScenario) {
  const CliRun r = invoke({"validate", data("valid/minimal.yaml").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ok"), std::string::npos);
}

TEST(Cli, CheckCollidingScenario) {
  const CliRun r = invoke({"check", "--cross-check", data("valid/colliding.yaml").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("collide at tick 7"), std::string::npos) << r.out;
}

TEST(Cli, RunTwiceGivesIdenticalBytes) {
  const std::string scenario = (source_dir() / "scenarios" / "cyber_virtual.yaml").string();
  std::vector<std::string> blobs;
  for (int i = 0; i < 2; ++i) {
    const fs::path report = scratch("report" + std::to_string(i) + ".json");
    const fs::path scene = scratch("scene" + std::to_string(i) + ".jsonl");
    const CliRun r = invoke({"run", "--seed", "7", "--report-out", report.string(), "--scene-out", scene.string(),
                          scenario});
    ASSERT_EQ(r.code, 0) << r.err << r.out;
    blobs.push_back(slurp(report) + "\n--\n" + slurp(scene));
  }
  EXPECT_EQ(blobs[0], blobs[1]);
  EXPECT_FALSE(blobs[0].empty());
}

TEST(Cli, OverridesApply) {
  const CliRun r = invoke({"check", "--json", "--horizon", "3", "--seed", "9", "--tick-ms", "50",
                        data("valid/colliding.yaml").string()});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("horizon"), 3);
  EXPECT_EQ(j.at("seed"), 9);
  EXPECT_EQ(j.at("tick_ms"), 50);
}

TEST(Cli, UsageErrors) {
  const CliRun unknown = invoke({"check", "--frobnicate", data("valid/minimal.yaml").string()});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"launch", "x"}).code, 2);
  EXPECT_EQ(invoke({"validate", "/nonexistent/file.yaml"}).code, 2);
}

TEST(Cli, ReplicateListsDerivedComponents) {
  const CliRun r = invoke({"replicate", (source_dir() / "scenarios" / "cyber_virtual.yaml").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"id\":\"B#3\""), std::string::npos);
  EXPECT_NE(r.out.find("\"replica_of\":\"B\""), std::string::npos);
}

TEST(Cli, ExportWritesSceneTrace) {
  const CliRun r = invoke({"export", data("valid/minimal.yaml").string()});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("component"), "A");
  EXPECT_EQ(j.at("occupied")[0], (nlohmann::json{0, 0, 0, 1, 1, 1}));
}
