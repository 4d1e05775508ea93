#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/rational.hpp"

namespace falsify {

/// Version tag of the toy machine below; embedded in every report.
inline constexpr std::string_view kMachineId = "toy-v1";
inline constexpr std::size_t kMaxProgramLength = 24;
inline constexpr std::size_t kMaxComplexityLength = 12;

/// A valid program: (00|01)* followed by one terminator, 10 (repeat) or 11 (halt).
class ToyProgram {
 public:
  [[nodiscard]] const std::string& bits() const { return bits_; }
  [[nodiscard]] std::size_t size() const { return bits_.size(); }
  friend bool operator==(const ToyProgram&, const ToyProgram&) = default;

 private:
  explicit ToyProgram(std::string bits) : bits_(std::move(bits)) {}
  friend std::optional<ToyProgram> parse_program(std::string_view bits);

  std::string bits_;
};

struct MachineOutput {
  enum class Kind { finite, periodic };
  Kind kind = Kind::finite;
  std::string content;  // periodic: repeated forever

  /// True when the output has y as a prefix.
  [[nodiscard]] bool extends(std::string_view y) const;
  /// Output bit at position t, or nullopt past the end of a finite output.
  [[nodiscard]] std::optional<char> at(std::size_t t) const;

  friend bool operator==(const MachineOutput&, const MachineOutput&) = default;
};

/// Throws input_error unless every character is '0' or '1'.
void check_bits(std::string_view bits);

std::optional<ToyProgram> parse_program(std::string_view bits);
MachineOutput run_machine(const ToyProgram& program);
/// The unique valid-program prefix of a padded string, if any.
std::optional<ToyProgram> strip_padding(std::string_view padded);
/// Valid programs of length <= max_len, shortest first, then lexicographic.
std::vector<ToyProgram> enumerate_programs(std::size_t max_len);

/// Mass of length-n padded strings whose stripped program's output extends y.
Rational solomonoff_prior_finite(std::string_view y, std::size_t n);
/// Number of length-n padded strings whose stripped program's output extends y.
std::uint64_t explaining_count(std::string_view y, std::size_t n);
/// Exact prior in closed form (geometric series over emit counts and periods).
Rational solomonoff_prior_exact(std::string_view y);
/// Mass of programs longer than n whose output extends y; finite + tail = exact.
Rational solomonoff_prior_tail(std::string_view y, std::size_t n);

struct Prediction {
  Rational q0;
  Rational q1;
};

/// Q(h b) / Q(h); with normalize the pair is rescaled to sum to one.
Prediction solomonoff_predict(std::string_view history, bool normalize = false);

/// Mismatches against y; positions past the end of a finite output each cost 1.
std::size_t risk_uni(std::string_view y, const ToyProgram& program);
/// Minimum risk over all programs of length <= max_len (|y| when there are none).
std::size_t theory_risk_uni(std::string_view y, std::size_t max_len);

/// -log2 of the exact prior.
double hard_falsifiability_uni(std::string_view y);
/// n - log2 |explaining length-n strings| = -log2 Q_n(y).
double finite_gain_uni(std::string_view y, std::size_t n);

/// Length of the shortest program whose output extends y.
std::size_t kolmogorov_complexity(std::string_view y);

struct FalsificationLedger {
  std::size_t n = 0;
  std::vector<std::uint64_t> counts;  // counts[t]: strings explaining y_{1:t}, t = 0..|y|
  double base = 0.0;                  // n - log2 counts[0]
  std::vector<double> entries;        // log2 counts[t-1] - log2 counts[t]
  double gain = 0.0;                  // n - log2 counts[|y|]
};

FalsificationLedger falsification_ledger(std::string_view y, std::size_t n);

struct SolomonoffStep {
  Rational q;       // conditional probability of the observed bit
  Rational loss;    // 1 - q
  double surprise;  // -log2 q
  bool holds;       // 1 - q <= -log2 q
};

struct UniversalChainReport {
  std::string y;
  Rational prior;
  std::vector<SolomonoffStep> steps;
  Rational loss;
  double gain = 0.0;
  std::size_t complexity = 0;
  bool loss_holds = false;        // loss <= G
  bool complexity_holds = false;  // G <= K
};

UniversalChainReport verify_theorem_E(std::string_view y);

}  // namespace falsify
