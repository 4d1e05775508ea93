#include <doctest.h>

#include <string>

#include <json.hpp>

#include "falsify/errors.hpp"
#include "falsify/experiment.hpp"

using namespace falsify;
using nlohmann::json;

namespace {

std::string error_text(const json& j) {
  try {
    ExperimentConfig::from_json(j).validate();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing names the offending field") {
  CHECK(error_text({{"scenario", "sweep"}, {"bogus", 1}}).find("bogus") != std::string::npos);
  CHECK(error_text({{"scenario", "sweep"}, {"n", -1}}).find("'n'") != std::string::npos);
  CHECK(error_text({{"scenario", "nonsense"}}).find("scenario") != std::string::npos);
  CHECK(error_text({{"scenario", "slt"}, {"theory", "full"}, {"delta", 1.5}}).find("delta") != std::string::npos);
  CHECK(error_text({{"scenario", "slt"}, {"theory", "full"}, {"trials", 10}}).find("trials") != std::string::npos);
  CHECK(error_text({{"scenario", "sweep"}, {"budget", {{"max_cpu", 1}}}}).find("budget.max_cpu") != std::string::npos);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"scenario", "uni"}, {"max_length", 13}}).validate(), capacity_error);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"scenario", "sweep"}, {"domain_size", 5}}).validate(), capacity_error);

  const auto c = ExperimentConfig::from_json({{"scenario", "slt"}, {"theory", "singleton"}, {"delta", "0.05"}});
  CHECK(c.delta == Rational(1, 20));
  const auto again = ExperimentConfig::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());
}

TEST_CASE("sweep over every theory on two inputs") {
  const auto c = ExperimentConfig::from_json({{"scenario", "sweep"}, {"domain_size", 2}, {"n", 2}});
  const Report r = run(c);
  CHECK(r.rows.size() == 15);
  CHECK(r.passed());
  CHECK(r.body()["summary"]["instances"] == 15);
  CHECK(r.to_json().contains("timing"));
  CHECK_FALSE(r.body().contains("timing"));
}

TEST_CASE("uni corpus") {
  const auto c = ExperimentConfig::from_json({{"scenario", "uni"}, {"max_length", 4}});
  const Report r = run(c);
  CHECK(r.rows.size() == 31);
  CHECK(r.passed());
  CHECK(r.body()["machine_id"] == "toy-v1");

  const auto d = describe(ExperimentConfig::from_json({{"scenario", "uni"}, {"max_length", 8}}));
  CHECK(d.find("strings: 511 planned") != std::string::npos);
}

TEST_CASE("slt statistical check on a singleton theory") {
  const auto c = ExperimentConfig::from_json(
      {{"scenario", "slt"}, {"theory", "singleton"}, {"domain_size", 3}, {"n", 20}, {"trials", 200}, {"seed", 7}});
  const Report r = run(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.passed());
  for (const auto& m : r.rows[0].measures) {
    if (m.name == "soft_violation_rate" || m.name == "hard_violation_rate") CHECK(*m.exact == Rational(0));
  }
}

TEST_CASE("csv keeps exact fractions") {
  const auto c = ExperimentConfig::from_json({{"scenario", "uni"}, {"max_length", 2}});
  const Report r = run(c);
  const auto table = parse_csv(r.csv());
  REQUIRE(table.size() == r.rows.size() + 1);
  const auto& header = table[0];
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(table[i + 1].size() == header.size());
    for (const auto& m : r.rows[i].measures) {
      if (!m.exact) continue;
      const auto col = std::find(header.begin(), header.end(), m.name) - header.begin();
      CHECK(Rational::parse(table[i + 1][static_cast<std::size_t>(col)]) == *m.exact);
    }
  }
}

TEST_CASE("same seed gives an identical body, independent of thread count") {
  json j = {{"scenario", "slt"}, {"theory", "full"}, {"domain_size", 3}, {"n", 10}, {"trials", 100}, {"seed", 11}};
  const auto a = run(ExperimentConfig::from_json(j)).body().dump();
  j["threads"] = 1;
  const auto b = run(ExperimentConfig::from_json(j)).body().dump();
  CHECK(a == b);
  j["seed"] = 12;
  CHECK(run(ExperimentConfig::from_json(j)).body()["rows"][0]["measures"] !=
        json::parse(a)["rows"][0]["measures"]);

  const json s = {{"scenario", "sweep"}, {"domain_size", 3}, {"n", 2}, {"max_theory_size", 2}};
  CHECK(run(ExperimentConfig::from_json(s)).body().dump() == run(ExperimentConfig::from_json(s)).body().dump());
}

TEST_CASE("budgets") {
  CHECK_THROWS_AS(run(ExperimentConfig::from_json(
                      {{"scenario", "sweep"}, {"domain_size", 3}, {"n", 1}, {"budget", {{"max_instances", 10}}}})),
                  capacity_error);
  CHECK_THROWS_AS(run(ExperimentConfig::from_json({{"scenario", "slt"},
                                                   {"theory", "full"},
                                                   {"n", 20},
                                                   {"trials", 200},
                                                   {"budget", {{"max_trials", 100}}}})),
                  capacity_error);
}

TEST_CASE("seq scenario and game") {
  const auto c = ExperimentConfig::from_json({{"scenario", "seq"}, {"domain_size", 2}, {"n", 2}, {"theory", "constants"}});
  const Report r = run(c);
  REQUIRE(r.rows.size() == 1);
  for (const auto& a : r.rows[0].assertions) {
    if (a.tag == "D-SEQ" || a.tag == "lemma zero-cover") CHECK(a.holds);
  }
  const Report g = run_game(c);
  REQUIRE(g.rows.size() == 1);
  CHECK(g.rows[0].measures[0].name == "V");
}
