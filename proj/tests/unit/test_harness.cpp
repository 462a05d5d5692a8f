#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "effective_trade/harness/commands.hpp"

using namespace effective_trade;
using namespace effective_trade::harness;

namespace {

std::string scenario(const std::string& name) {
  return std::string(ET_SCENARIO_DIR) + "/" + name;
}

const char* kMinimal = R"({
  "agents": [
    {"name": "a", "endowment": [1, 0], "utility": {"weights": [0.5, 0.5], "exponent": 0.5}},
    {"name": "b", "endowment": [0, 1], "utility": {"weights": [0.5, 0.5], "exponent": 0.5}}
  ]
})";

int run_capture(RunRequest r, std::string& out, std::string& err) {
  std::ostringstream o, e;
  int code = run(r, o, e);
  out = o.str();
  err = e.str();
  return code;
}

}  // namespace

TEST(Scenario, BundledExampleLoads) {
  auto cfg = load_scenario(scenario("paper_s7.json"));
  ASSERT_EQ(cfg.economy.size(), 3u);
  EXPECT_EQ(cfg.economy.agents[0].endowment, (std::vector<double>{3, 1}));
  EXPECT_EQ(cfg.economy.agents[2].endowment, (std::vector<double>{1, 3}));
  auto& u = std::get<CesUtility>(cfg.economy.agents[1].utility);
  EXPECT_DOUBLE_EQ(u.weights[0], 0.4);
  EXPECT_DOUBLE_EQ(u.exponent, 0.3);
}

TEST(Scenario, CapacitiesDefaultToUnbounded) {
  auto cfg = load_scenario_text(kMinimal);
  EXPECT_FALSE(cfg.economy.capacities);
  EXPECT_TRUE(std::isinf(cfg.economy.capacity(0, 1, 0)));
}

TEST(Scenario, WeightsMustSumToOne) {
  std::string bad = kMinimal;
  bad.replace(bad.find("[0.5, 0.5]"), 10, "[0.5, 0.6]");
  try {
    load_scenario_text(bad);
    FAIL() << "accepted weights summing to 1.1";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("sum to 1"), std::string::npos);
  }
}

TEST(Scenario, ParseErrorCarriesLineAndColumn) {
  try {
    load_scenario_text("{\n  \"agents\": [\n    {,}\n  ]\n}");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 0);
  }
}

TEST(Scenario, OtherInvariantsNamed) {
  auto expect_error = [](const std::string& text, const std::string& fragment) {
    try {
      load_scenario_text(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  std::string t = kMinimal;
  expect_error(std::string(t).replace(t.find("0.5}"), 3, "0.0"), "exponent");
  expect_error(std::string(t).replace(t.find("[1, 0]"), 6, "[1.5, 0]"), "integers");
  expect_error(R"({"agents": []})", "agent");
  std::string caps = t;
  caps.insert(caps.rfind('}'), R"(, "capacities": [{"from": "a", "to": "z"}])");
  expect_error(caps, "unknown agent");
}

TEST(RecordIo, CsvRoundTripIsExact) {
  auto cfg = load_scenario(scenario("paper_s7.json"));
  auto records = enumerate_feasible(cfg.economy);
  mark_pareto(records);
  auto nash = nash_set(cfg.economy, records);
  mark_nash_pareto(nash);
  for (auto* set : {&records, &nash}) {
    std::stringstream ss;
    write_records_csv(ss, cfg.economy, *set);
    auto back = parse_records_csv(ss, cfg.economy);
    ASSERT_EQ(back.size(), set->size());
    for (std::size_t r = 0; r < back.size(); ++r) {
      ASSERT_EQ(back[r].flows, (*set)[r].flows);
      ASSERT_EQ(back[r].witness, (*set)[r].witness);
      ASSERT_EQ(back[r].utilities, (*set)[r].utilities);
      ASSERT_EQ(back[r].flags, (*set)[r].flags);
      ASSERT_EQ(back[r].polytope_dimension, (*set)[r].polytope_dimension);
    }
  }
}

TEST(Commands, OneAgentEnumerationIsAutarky) {
  auto dir = std::filesystem::temp_directory_path() / "et_one_agent";
  std::filesystem::create_directories(dir);
  auto path = dir / "one.json";
  std::ofstream(path) << R"({"agents": [{"name": "solo", "endowment": [2, 1],
      "utility": {"weights": [0.5, 0.5], "exponent": 0.3}}]})";
  RunRequest r;
  r.command = "enumerate";
  r.config_path = path.string();
  r.format = Format::csv;
  std::string out, err;
  ASSERT_EQ(run_capture(r, out, err), kSuccess) << err;
  EXPECT_NE(out.find("feasible: 1\n"), std::string::npos);
}

TEST(Commands, HeaderCarriesVersionAndHash) {
  RunRequest r;
  r.command = "pareto";
  r.config_path = scenario("paper_s7_topology.json");
  std::string out, err;
  ASSERT_EQ(run_capture(r, out, err), kSuccess);
  auto cfg = load_scenario(r.config_path);
  EXPECT_EQ(out.rfind("# effective-trade " + std::string(kToolVersion), 0), 0u);
  EXPECT_NE(out.find(config_hash(cfg)), std::string::npos);
}

TEST(Commands, ExitCodes) {
  std::string out, err;
  RunRequest r;
  r.command = "nash";
  r.config_path = "/nonexistent/scenario.json";
  EXPECT_EQ(run_capture(r, out, err), kValidation);
  r.command = "frobnicate";
  EXPECT_EQ(run_capture(r, out, err), kUsage);
  r.command = "nash";
  r.config_path = scenario("paper_s7_continuous.json");
  EXPECT_EQ(run_capture(r, out, err), kValidation);
}

TEST(Commands, FailedRunLeavesNoFiles) {
  auto dir = std::filesystem::temp_directory_path() / "et_failed_run";
  std::filesystem::remove_all(dir);
  RunRequest r;
  r.command = "enumerate";
  r.config_path = scenario("paper_s7_continuous.json");
  r.out_dir = dir.string();
  std::string out, err;
  EXPECT_EQ(run_capture(r, out, err), kValidation);
  EXPECT_FALSE(std::filesystem::exists(dir) && !std::filesystem::is_empty(dir));
}

TEST(Commands, OutDirectoryHoldsCsvAndTable) {
  auto dir = std::filesystem::temp_directory_path() / "et_out_dir";
  std::filesystem::remove_all(dir);
  RunRequest r;
  r.command = "nash";
  r.config_path = scenario("paper_s7_topology.json");
  r.out_dir = dir.string();
  std::string out, err;
  ASSERT_EQ(run_capture(r, out, err), kSuccess) << err;
  EXPECT_TRUE(std::filesystem::exists(dir / "nash.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "nash.txt"));
  for (const auto& f : std::filesystem::directory_iterator(dir))
    EXPECT_NE(f.path().extension(), ".partial");
}

TEST(Commands, SeededRunsAreByteIdentical) {
  for (const char* cmd : {"nontatonnement", "converge"}) {
    RunRequest r;
    r.command = cmd;
    r.config_path = scenario("paper_s7.json");
    r.seed = 5;
    r.format = Format::csv;
    std::string a, b, err;
    ASSERT_EQ(run_capture(r, a, err), kSuccess) << err;
    ASSERT_EQ(run_capture(r, b, err), kSuccess) << err;
    EXPECT_EQ(a, b) << cmd;
  }
}

TEST(Commands, ModeReadsBeliefFile) {
  RunRequest r;
  r.command = "mode";
  r.config_path = scenario("belief_weather.json");
  std::string out, err;
  ASSERT_EQ(run_capture(r, out, err), kSuccess) << err;
  EXPECT_NE(out.find("modal set: \"wet\""), std::string::npos);
}
