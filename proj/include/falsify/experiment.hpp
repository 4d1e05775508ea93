#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "falsify/rational.hpp"
#include "falsify/slt.hpp"

namespace falsify {

inline constexpr std::string_view kArtifactVersion = "falsify 1.0.0";

/// Run-level budgets. They sit on top of the per-module hard ceilings and may only be
/// raised through an explicit unsafe override.
struct RunBudget {
  std::size_t max_instances = 100000;
  std::size_t max_trials = 100000;
  std::size_t max_sample = 1000;
};

/// Parsed and validated experiment description.
struct ExperimentConfig {
  std::string scenario;                  // slt | seq | uni | sweep
  std::size_t domain_size = 2;
  std::string theory_name;               // full | constants | singleton | indicators | all
  std::vector<std::string> theory;       // explicit predictors as label strings
  std::size_t max_theory_size = 0;       // sweep: 0 means every size
  std::size_t n = 2;                     // sample size, sequence length or tree depth
  nlohmann::json distribution = "uniform_events";
  std::size_t trials = 1000;
  Rational delta = Rational(1, 10);
  std::uint64_t seed = 1;
  std::size_t max_length = 4;            // uni corpus: all strings up to this length
  std::vector<std::string> corpus;       // uni corpus given explicitly
  std::size_t threads = 0;               // 0: hardware concurrency
  RunBudget budget;

  /// Throws input_error naming the offending field, capacity_error naming the limit.
  static ExperimentConfig from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;
  void validate() const;
};

/// Value with its exact fraction when one exists.
struct Measure {
  std::string name;
  std::optional<Rational> exact;
  double decimal = 0.0;

  static Measure of(std::string name, const Rational& value);
  static Measure of(std::string name, double value);
};

struct Assertion {
  std::string tag;     // claim tag, e.g. "D", "D''-s", "D-SEQ", "E"
  std::string name;
  bool holds = false;
  Measure lhs;
  Measure rhs;
  Measure margin;      // rhs - lhs, exact when both sides are
};

Assertion assert_le(std::string tag, std::string name, const Measure& lhs, const Measure& rhs,
                    double slack = 0.0);
Assertion assert_eq(std::string tag, std::string name, const Measure& lhs, const Measure& rhs,
                    double tolerance = 0.0);

struct ReportRow {
  std::string instance;
  std::vector<Measure> measures;
  std::vector<Assertion> assertions;
  nlohmann::json detail;  // scenario-specific extras

  [[nodiscard]] bool passed() const;
};

struct Report {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  double runtime_seconds = 0.0;

  [[nodiscard]] std::size_t assertion_count() const;
  [[nodiscard]] std::size_t failure_count() const;
  [[nodiscard]] bool passed() const { return failure_count() == 0; }

  /// Deterministic part of the report: identical for identical config and seed.
  [[nodiscard]] nlohmann::json body() const;
  /// Body plus a separate timing section.
  [[nodiscard]] nlohmann::json to_json() const;
  /// One row per instance; exact columns hold "p/q" text.
  [[nodiscard]] std::string csv() const;
};

/// Splits CSV text written by Report::csv into header and cells.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

Theory build_theory(const ExperimentConfig& config);
EventDistribution build_distribution(const ExperimentConfig& config);

Report run(const ExperimentConfig& config);
/// Dry-run plan: instance counts, enumeration sizes and the tags that will be asserted.
std::string describe(const ExperimentConfig& config);
/// Exact minimax game for a single theory, as a one-row report.
Report run_game(const ExperimentConfig& config);

}  // namespace falsify
