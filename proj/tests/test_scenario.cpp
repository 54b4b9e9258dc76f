#include <gtest/gtest.h>

#include "objnav/report.hpp"
#include "objnav/scenario.hpp"

using namespace objnav;

namespace {

const std::string kSrc = OBJNAV_SOURCE_DIR;

nlohmann::json small_json() {
  std::ifstream in(kSrc + "/tests/data/small.json");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Scenario, ReferenceScenariosLoad) {
  for (const char* name : {"kitchen1.json", "kitchen1_peaky.json"}) {
    const auto sc = load_scenario(kSrc + "/scenarios/" + name);
    EXPECT_EQ(sc.spawn.objects.size(), 5u);
    EXPECT_EQ(sc.features.n_objects, 5);
    EXPECT_EQ(sc.bandit.k, static_cast<int>(sc.vantage_k));
    const Scene scene = build_scene(sc);
    EXPECT_EQ(scene.map().height(), 89);
    EXPECT_EQ(scene.map().width(), 89);
  }
  EXPECT_TRUE(load_scenario(kSrc + "/scenarios/kitchen1_peaky.json").spawn.peaky);
}

TEST(Scenario, RoundTrip) {
  const auto a = load_scenario(kSrc + "/scenarios/kitchen1.json");
  const auto b = scenario_from_json(nlohmann::json::parse(to_json(a).dump()));
  EXPECT_TRUE(a == b);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  auto j = small_json();
  const auto c = scenario_from_json(j);
  EXPECT_TRUE(scenario_from_json(to_json(c)) == c);
}

TEST(Scenario, RangeChecksAndOverrides) {
  auto j = small_json();
  j["overrides"] = nlohmann::json::array();
  EXPECT_THROW(scenario_from_json(j), Error);  // vantage_k = 6 is outside {25, 50}
  j["overrides"] = {"vantage_k"};
  EXPECT_NO_THROW(scenario_from_json(j));
  for (auto [field, value] : std::vector<std::pair<std::string, double>>{{"eta", 500.0}, {"alpha", 0.01}}) {
    auto bad = j;
    bad["bandit"][field] = value;
    EXPECT_THROW(scenario_from_json(bad), Error) << field;
    bad["overrides"].push_back(field);
    EXPECT_NO_THROW(scenario_from_json(bad)) << field;
  }
  auto pe = j;
  pe["features"]["pe_dim"] = 15;
  pe["overrides"].push_back("pe_dim");
  EXPECT_THROW(scenario_from_json(pe), Error);  // odd dimension is never valid
  auto slope = j;
  slope["features"]["sigmoid_scale"] = 1.0;
  EXPECT_THROW(scenario_from_json(slope), Error);
  slope["overrides"].push_back("sigmoid_scale");
  EXPECT_NO_THROW(scenario_from_json(slope));
  auto ap = j;
  ap["planner"]["alpha_p"] = 0.95;
  EXPECT_THROW(scenario_from_json(ap), Error);
}

TEST(Scenario, MalformedInputs) {
  auto j = small_json();
  j["planner"]["kind"] = "cpsat";
  EXPECT_THROW(scenario_from_json(j), Error);
  j = small_json();
  j.erase("map");
  EXPECT_THROW(scenario_from_json(j), Error);
  j = small_json();
  j["bandit"]["eta"] = "fast";
  EXPECT_THROW(scenario_from_json(j), Error);
  j = small_json();
  j["features"]["normalization"] = "zscore";
  EXPECT_THROW(scenario_from_json(j), Error);
  EXPECT_THROW(load_scenario(kSrc + "/tests/data/does_not_exist.json"), Error);
  const auto missing = load_scenario(kSrc + "/tests/data/missing_map.json");
  try {
    build_scene(missing);
    FAIL() << "expected a missing-map error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no_such.map"), std::string::npos);
  }
}

TEST(Scenario, RandomSearchStaysInRanges) {
  const auto base = scenario_from_json(small_json());
  Rng rng = stream_rng(1, 2);
  for (int i = 0; i < 200; ++i) {
    const auto s = sample_hyperparameters(base, rng);
    EXPECT_GE(s.bandit.eta, 0.01);
    EXPECT_LE(s.bandit.eta, 100.0);
    EXPECT_GE(s.bandit.alpha, 0.1);
    EXPECT_LE(s.bandit.alpha, 10.0);
    EXPECT_GE(s.planner.alpha_p, 0.1);
    EXPECT_LE(s.planner.alpha_p, 0.9);
    EXPECT_EQ(s.features.pe_dim % 2, 0);
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.vantage_k, base.vantage_k);
  }
}

TEST(Report, CsvShapes) {
  std::ostringstream os;
  write_summary_csv(os, "x", MetricSummary{0.5, 0.25, 3.0, 4});
  EXPECT_EQ(os.str(), "run,episodes,success_rate,spl,mean_loss\nx,4,0.5,0.25,3\n");
  RegretLedger led;
  led.add(2, 1);
  led.add(1, 1);
  std::ostringstream rs;
  write_regret_csv(rs, led);
  EXPECT_EQ(rs.str(),
            "t,learner_expected,benchmark_expected,cumulative_regret,average_regret\n1,2,1,1,1\n2,1,1,1,0.5\n");
  EXPECT_EQ(fmt(kInf), "inf");
  EXPECT_EQ(heat_color(0.0).size(), 7u);
}
