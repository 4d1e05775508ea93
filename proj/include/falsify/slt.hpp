#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "falsify/rational.hpp"

namespace falsify {

/// A labeling of up to 64 positions; bit i holds the label at position i.
using Labels = std::uint64_t;

/// Largest supported input domain (predictors are stored as bit masks).
inline constexpr std::size_t kMaxDomain = 20;
/// Largest sample length for which the 2^n label vectors are enumerated exactly.
inline constexpr std::size_t kMaxExactLength = 20;

/// sqrt(8): constant of the falsifiability chain 1 - F <= sqrt(8) sqrt(1 - G).
inline constexpr double kChainConstant = 2.8284271247461900976;

/// The finite input set X = {0, ..., size-1}; labels are always {0, 1}.
class Domain {
 public:
  explicit Domain(std::size_t size);
  [[nodiscard]] std::size_t size() const { return size_; }
  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  std::size_t size_;
};

/// A finite, duplicate-free, ordered set of binary predictors over a Domain.
class Theory {
 public:
  Theory(Domain domain, std::vector<Labels> predictors);

  /// Predictors written as '0'/'1' strings; character x is the label of input x.
  static Theory from_strings(const std::vector<std::string>& predictors);
  /// All 2^m predictors over an m-point domain.
  static Theory full(std::size_t domain_size);
  static Theory constants(std::size_t domain_size);

  [[nodiscard]] const Domain& domain() const { return domain_; }
  [[nodiscard]] std::size_t size() const { return predictors_.size(); }
  [[nodiscard]] Labels predictor(std::size_t i) const { return predictors_[i]; }
  [[nodiscard]] const std::vector<Labels>& predictors() const { return predictors_; }
  [[nodiscard]] int label(std::size_t predictor, std::size_t input) const {
    return static_cast<int>((predictors_[predictor] >> input) & 1U);
  }
  [[nodiscard]] std::vector<std::string> to_strings() const;

  /// Theory with one more predictor appended (must be new).
  [[nodiscard]] Theory with(Labels predictor) const;

  friend bool operator==(const Theory&, const Theory&) = default;

 private:
  Domain domain_;
  std::vector<Labels> predictors_;
};

/// Sequence of distinct inputs x_1..x_n.
class InputSequence {
 public:
  InputSequence(Domain domain, std::vector<std::size_t> points);

  [[nodiscard]] const Domain& domain() const { return domain_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] std::size_t operator[](std::size_t t) const { return points_[t]; }
  [[nodiscard]] const std::vector<std::size_t>& points() const { return points_; }

  friend bool operator==(const InputSequence&, const InputSequence&) = default;

 private:
  Domain domain_;
  std::vector<std::size_t> points_;
};

struct LabeledSample {
  LabeledSample(InputSequence inputs, std::vector<int> labels);

  InputSequence inputs;
  std::vector<int> labels;
};

/// Probability mass over events z = (x, y); index 2x + y.
class EventDistribution {
 public:
  EventDistribution(Domain domain, std::vector<Rational> mass);

  /// Uniform over inputs with a deterministic label function.
  static EventDistribution uniform_inputs(std::size_t domain_size, Labels labels);
  /// Uniform over all 2m events.
  static EventDistribution uniform_events(std::size_t domain_size);

  [[nodiscard]] const Domain& domain() const { return domain_; }
  [[nodiscard]] const Rational& mass(std::size_t x, int y) const { return mass_[2 * x + y]; }
  [[nodiscard]] const std::vector<Rational>& masses() const { return mass_; }

 private:
  Domain domain_;
  std::vector<Rational> mass_;
};

/// Risk of the theory on every effective hypothesis about `inputs`:
/// errors[s] is the empirical risk against the label vector s (bit t = label at x_t).
struct RiskProfile {
  InputSequence inputs;
  std::vector<Rational> errors;
};

/// Distribution of error values induced by a uniformly random effective hypothesis.
struct ErrorDistribution {
  std::vector<Rational> values;  // ascending
  std::vector<Rational> masses;

  [[nodiscard]] Rational mass_at(const Rational& value) const;
  [[nodiscard]] Rational expectation() const;
};

/// min_f (1/n) sum_t [f(x_t) != y_t].
Rational empirical_risk(const Theory& theory, const LabeledSample& sample);
/// min_f E_{(x,y)~P} [f(x) != y].
Rational distributional_risk(const Theory& theory, const EventDistribution& dist);
/// Expected loss of one predictor under dist.
Rational predictor_risk(const Theory& theory, std::size_t predictor, const EventDistribution& dist);

RiskProfile risk_profile(const Theory& theory, const InputSequence& inputs);
ErrorDistribution risk_induced_error_distribution(const RiskProfile& profile);

/// Number of distinct restrictions of the predictors to the inputs.
std::size_t covering_number(const Theory& theory, const InputSequence& inputs);
/// As above for any point sequence (repeats allowed).
std::size_t covering_number(const Theory& theory, std::span<const std::size_t> points);

/// Inputs that attain an infimum over n-subsets, with the attained value.
template <typename T>
struct Attained {
  T value;
  InputSequence witness;
};

/// F(O|x) = 2 E_Q[eps].
Rational soft_falsifiability(const Theory& theory, const InputSequence& inputs);
/// F_n = min over n-subsets of X (risk is permutation invariant).
Attained<Rational> soft_falsifiability_n(const Theory& theory, std::size_t n);

/// G(O|x) = (n - log2 |{s : risk(s) = 0}|) / n.
double hard_falsifiability(const Theory& theory, const InputSequence& inputs);
Attained<double> hard_falsifiability_n(const Theory& theory, std::size_t n);

/// E_zeta sup_f (1/n) sum_t zeta_t (2 f(x_t) - 1): predictors embedded as +/-1.
Rational rademacher(const Theory& theory, const InputSequence& inputs);
/// E_zeta sup_f (1/n) sum_t zeta_t [f(x_t) != y_t].
Rational rademacher_loss(const Theory& theory, const LabeledSample& sample);
/// Loss form with all-zero labels (the value does not depend on the labels).
Rational rademacher_loss(const Theory& theory, const InputSequence& inputs);
/// Loss form on an arbitrary point sequence with repeats (all-zero labels). Exact; the
/// sign sums of repeated points are grouped into binomial counts, so n may be large
/// as long as the number of distinct points is small.
Rational rademacher_loss_sequence(const Theory& theory, std::span<const std::size_t> points);

bool shatters(const Theory& theory, const InputSequence& inputs);
std::size_t vc_dimension(const Theory& theory);

/// Index of a training-error minimizer; ties go to the lowest index.
std::size_t erm(const Theory& theory, const LabeledSample& sample);

/// Every nonempty theory of at most max_size predictors over an m-point domain:
/// by size, then lexicographically by predictor mask.
std::vector<Theory> enumerate_theories(std::size_t domain_size, std::size_t max_size);

/// All n-subsets of the domain as increasing input sequences.
std::vector<InputSequence> enumerate_input_subsets(const Domain& domain, std::size_t n);

// ---- generalization experiment --------------------------------------------------------

/// c = sqrt(2 / log e) of the soft bound.
double soft_bound_constant();
/// d1 = sqrt(6 / log e), d2 = sqrt(1 / log e) of the hard bound.
double hard_bound_constant_d1();
double hard_bound_constant_d2();

struct GeneralizationTrial {
  std::size_t chosen;     // ERM predictor index
  Rational train_risk;
  Rational test_risk;     // exact expected risk under the distribution
  Rational gap;           // test - train
  Rational soft_falsifiability;  // F on the drawn inputs
  double hard_falsifiability;    // G on the drawn inputs
  double soft_bound;
  double hard_bound;
};

struct GeneralizationReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<GeneralizationTrial> per_trial;
  std::size_t soft_violations = 0;
  std::size_t hard_violations = 0;
  double min_soft_margin = 0.0;
  double min_hard_margin = 0.0;
  double median_soft_margin = 0.0;
  double median_hard_margin = 0.0;

  [[nodiscard]] double soft_violation_rate() const;
  [[nodiscard]] double hard_violation_rate() const;
};

/// Draws n i.i.d. events per trial, runs ERM and checks both data-dependent bounds on
/// the drawn inputs. F and G on a drawn sample (which may repeat points) are evaluated
/// through F = 1 - 2 Radem_loss and G = 1 - log2(Cover)/n.
GeneralizationReport generalization_experiment(const Theory& theory, const EventDistribution& dist,
                                               std::size_t n, std::size_t trials, double delta,
                                               std::uint64_t seed);

/// Draws event indices (2x + y) from an EventDistribution exactly: masses are put over a
/// common 64-bit denominator and a uniform integer is drawn by rejection, so the stream
/// depends only on the mt19937_64 sequence (portable across standard libraries).
class EventSampler {
 public:
  explicit EventSampler(const EventDistribution& dist);
  std::size_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t denominator_ = 1;
};

// ---- falsifiability chain ------------------------------------------------------------------

struct SltChainReport {
  std::size_t n = 0;
  Rational soft;                // F_n
  double hard = 0.0;            // G_n
  InputSequence soft_witness;
  InputSequence hard_witness;
  Rational one_minus_soft;      // 1 - F_n
  double chain_rhs = 0.0;       // sqrt(8) sqrt(1 - G_n)
  bool chain_holds = false;     // 1 - F_n <= rhs + slack
  Rational erm_gap_proxy;       // max over the family of the exact expected ERM gap
  std::size_t proxy_argmax = 0;
  bool proxy_holds = false;     // proxy <= 1 - F_n
};

/// Exact E_{z ~ P^n}[R_P(ERM(z)) - R_O(P)] by enumerating the support of P^n.
Rational expected_erm_gap(const Theory& theory, const EventDistribution& dist, std::size_t n);

/// Default distribution family: every deterministic labeling with uniform inputs, plus
/// the uniform distribution over all events.
std::vector<EventDistribution> default_distribution_family(std::size_t domain_size);

SltChainReport verify_chain_slt(const Theory& theory, std::size_t n,
                                const std::vector<EventDistribution>& family);

}  // namespace falsify
