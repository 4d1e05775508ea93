#include "falsify/slt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "falsify/errors.hpp"
#include "falsify/numerics.hpp"

namespace falsify {

namespace {

Labels low_mask(std::size_t bits) {
  return bits >= 64 ? ~Labels{0} : ((Labels{1} << bits) - 1);
}

int popcount(Labels v) { return std::popcount(v); }

// Restriction of a predictor to a point sequence: bit t = f(points[t]).
Labels restrict_to(Labels predictor, std::span<const std::size_t> points) {
  Labels out = 0;
  for (std::size_t t = 0; t < points.size(); ++t) {
    out |= ((predictor >> points[t]) & 1U) << t;
  }
  return out;
}

std::vector<Labels> distinct_restrictions(const Theory& theory, std::span<const std::size_t> points) {
  std::set<Labels> seen;
  for (Labels f : theory.predictors()) {
    seen.insert(restrict_to(f, points));
  }
  return {seen.begin(), seen.end()};
}

void check_exact_length(std::size_t n) {
  if (n > kMaxExactLength) {
    throw capacity_error("sequence length " + std::to_string(n) + " exceeds the exact-enumeration limit " +
                         std::to_string(kMaxExactLength));
  }
}

void check_same_domain(const Theory& theory, const Domain& domain) {
  if (!(theory.domain() == domain)) {
    throw input_error("theory and inputs live on different domains");
  }
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) {
        idx[j] = idx[j - 1] + 1;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

// ---- types ----------------------------------------------------------------------------

Domain::Domain(std::size_t size) : size_(size) {
  if (size == 0) {
    throw input_error("domain must have at least one input");
  }
  if (size > kMaxDomain) {
    throw capacity_error("domain size " + std::to_string(size) + " exceeds limit " +
                         std::to_string(kMaxDomain));
  }
}

Theory::Theory(Domain domain, std::vector<Labels> predictors)
    : domain_(domain), predictors_(std::move(predictors)) {
  if (predictors_.empty()) {
    throw input_error("theory must contain at least one predictor");
  }
  std::set<Labels> seen;
  for (Labels f : predictors_) {
    if ((f & ~low_mask(domain_.size())) != 0) {
      throw input_error("predictor has labels outside the domain");
    }
    if (!seen.insert(f).second) {
      throw input_error("duplicate predictor in theory");
    }
  }
}

Theory Theory::from_strings(const std::vector<std::string>& predictors) {
  if (predictors.empty()) {
    throw input_error("theory must contain at least one predictor");
  }
  const std::size_t m = predictors.front().size();
  std::vector<Labels> masks;
  for (const auto& p : predictors) {
    if (p.size() != m) {
      throw input_error("predictors '" + p + "' and '" + predictors.front() + "' differ in length");
    }
    Labels mask = 0;
    for (std::size_t x = 0; x < m; ++x) {
      if (p[x] == '1') {
        mask |= Labels{1} << x;
      } else if (p[x] != '0') {
        throw input_error("predictor '" + p + "' is not a 0/1 string");
      }
    }
    masks.push_back(mask);
  }
  return Theory(Domain(m), std::move(masks));
}

Theory Theory::full(std::size_t domain_size) {
  Domain d(domain_size);
  std::vector<Labels> all(std::size_t{1} << domain_size);
  std::iota(all.begin(), all.end(), Labels{0});
  return Theory(d, std::move(all));
}

Theory Theory::constants(std::size_t domain_size) {
  Domain d(domain_size);
  return Theory(d, {0, low_mask(domain_size)});
}

std::vector<std::string> Theory::to_strings() const {
  std::vector<std::string> out;
  for (Labels f : predictors_) {
    std::string s(domain_.size(), '0');
    for (std::size_t x = 0; x < domain_.size(); ++x) {
      if (((f >> x) & 1U) != 0) s[x] = '1';
    }
    out.push_back(std::move(s));
  }
  return out;
}

Theory Theory::with(Labels predictor) const {
  auto p = predictors_;
  p.push_back(predictor);
  return Theory(domain_, std::move(p));
}

InputSequence::InputSequence(Domain domain, std::vector<std::size_t> points)
    : domain_(domain), points_(std::move(points)) {
  std::set<std::size_t> seen;
  for (std::size_t x : points_) {
    if (x >= domain_.size()) {
      throw input_error("input " + std::to_string(x) + " outside the domain");
    }
    if (!seen.insert(x).second) {
      throw input_error("input sequence repeats point " + std::to_string(x));
    }
  }
  if (points_.size() > 64) {
    throw capacity_error("input sequence longer than 64");
  }
}

LabeledSample::LabeledSample(InputSequence in, std::vector<int> lab)
    : inputs(std::move(in)), labels(std::move(lab)) {
  if (labels.size() != inputs.size()) {
    throw input_error("sample has " + std::to_string(inputs.size()) + " inputs but " +
                      std::to_string(labels.size()) + " labels");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw input_error("labels must be 0 or 1");
    }
  }
}

EventDistribution::EventDistribution(Domain domain, std::vector<Rational> mass)
    : domain_(domain), mass_(std::move(mass)) {
  if (mass_.size() != 2 * domain_.size()) {
    throw input_error("event distribution needs 2|X| masses");
  }
  Rational total;
  for (const auto& m : mass_) {
    if (m.sign() < 0) {
      throw input_error("negative event mass");
    }
    total += m;
  }
  if (total != 1) {
    throw input_error("event masses sum to " + total.str());
  }
}

EventDistribution EventDistribution::uniform_inputs(std::size_t domain_size, Labels labels) {
  Domain d(domain_size);
  std::vector<Rational> m(2 * domain_size);
  for (std::size_t x = 0; x < domain_size; ++x) {
    m[2 * x + ((labels >> x) & 1U)] = Rational(1, domain_size);
  }
  return EventDistribution(d, std::move(m));
}

EventDistribution EventDistribution::uniform_events(std::size_t domain_size) {
  Domain d(domain_size);
  return EventDistribution(d, std::vector<Rational>(2 * domain_size, Rational(1, 2 * domain_size)));
}

Rational ErrorDistribution::mass_at(const Rational& value) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return masses[i];
  }
  return Rational{};
}

Rational ErrorDistribution::expectation() const {
  Rational e;
  for (std::size_t i = 0; i < values.size(); ++i) e += values[i] * masses[i];
  return e;
}

// ---- risks ----------------------------------------------------------------------------

Rational empirical_risk(const Theory& theory, const LabeledSample& sample) {
  check_same_domain(theory, sample.inputs.domain());
  const std::size_t n = sample.inputs.size();
  if (n == 0) {
    throw input_error("empirical risk of an empty sample");
  }
  Labels y = 0;
  for (std::size_t t = 0; t < n; ++t) y |= static_cast<Labels>(sample.labels[t]) << t;
  int best = static_cast<int>(n);
  for (Labels f : theory.predictors()) {
    best = std::min(best, popcount(restrict_to(f, sample.inputs.points()) ^ y));
  }
  return {best, n};
}

Rational predictor_risk(const Theory& theory, std::size_t predictor, const EventDistribution& dist) {
  Rational r;
  for (std::size_t x = 0; x < theory.domain().size(); ++x) {
    const int fx = theory.label(predictor, x);
    r += dist.mass(x, 1 - fx);
  }
  return r;
}

Rational distributional_risk(const Theory& theory, const EventDistribution& dist) {
  check_same_domain(theory, dist.domain());
  Rational best = predictor_risk(theory, 0, dist);
  for (std::size_t i = 1; i < theory.size(); ++i) {
    best = min(best, predictor_risk(theory, i, dist));
  }
  return best;
}

RiskProfile risk_profile(const Theory& theory, const InputSequence& inputs) {
  check_same_domain(theory, inputs.domain());
  const std::size_t n = inputs.size();
  check_exact_length(n);
  if (n == 0) {
    throw input_error("risk profile of an empty input sequence");
  }
  const auto restrictions = distinct_restrictions(theory, inputs.points());
  RiskProfile profile{inputs, std::vector<Rational>(std::size_t{1} << n)};
  for (Labels s = 0; s < (Labels{1} << n); ++s) {
    int best = static_cast<int>(n);
    for (Labels r : restrictions) best = std::min(best, popcount(r ^ s));
    profile.errors[s] = Rational(best, n);
  }
  return profile;
}

ErrorDistribution risk_induced_error_distribution(const RiskProfile& profile) {
  std::map<Rational, std::size_t> counts;
  for (const auto& e : profile.errors) ++counts[e];
  ErrorDistribution q;
  for (const auto& [value, count] : counts) {
    q.values.push_back(value);
    q.masses.emplace_back(count, profile.errors.size());
  }
  return q;
}

std::size_t covering_number(const Theory& theory, std::span<const std::size_t> points) {
  if (points.size() > 64) {
    throw capacity_error("covering number on more than 64 points");
  }
  return distinct_restrictions(theory, points).size();
}

std::size_t covering_number(const Theory& theory, const InputSequence& inputs) {
  check_same_domain(theory, inputs.domain());
  return covering_number(theory, std::span<const std::size_t>(inputs.points()));
}

// ---- falsifiability -------------------------------------------------------------------

Rational soft_falsifiability(const Theory& theory, const InputSequence& inputs) {
  return 2 * risk_induced_error_distribution(risk_profile(theory, inputs)).expectation();
}

double hard_falsifiability(const Theory& theory, const InputSequence& inputs) {
  const auto q = risk_induced_error_distribution(risk_profile(theory, inputs));
  // Gain(R, 0) = -log2 Q(0); Q(0) > 0 because every predictor explains its own labeling
  const double gain = -log2(q.mass_at(Rational{}));
  return gain / static_cast<double>(inputs.size());
}

std::vector<InputSequence> enumerate_input_subsets(const Domain& domain, std::size_t n) {
  if (n == 0 || n > domain.size()) {
    throw input_error("subset size " + std::to_string(n) + " outside 1.." + std::to_string(domain.size()));
  }
  std::vector<InputSequence> out;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  do {
    out.emplace_back(domain, idx);
  } while (next_combination(idx, domain.size()));
  return out;
}

Attained<Rational> soft_falsifiability_n(const Theory& theory, std::size_t n) {
  std::optional<Attained<Rational>> best;
  for (auto& x : enumerate_input_subsets(theory.domain(), n)) {
    Rational f = soft_falsifiability(theory, x);
    if (!best || f < best->value) best = Attained<Rational>{std::move(f), std::move(x)};
  }
  return *best;
}

Attained<double> hard_falsifiability_n(const Theory& theory, std::size_t n) {
  std::optional<Attained<double>> best;
  for (auto& x : enumerate_input_subsets(theory.domain(), n)) {
    const double g = hard_falsifiability(theory, x);
    if (!best || g < best->value) best = Attained<double>{g, std::move(x)};
  }
  return *best;
}

// ---- Rademacher -----------------------------------------------------------------------

Rational rademacher(const Theory& theory, const InputSequence& inputs) {
  check_same_domain(theory, inputs.domain());
  const std::size_t n = inputs.size();
  check_exact_length(n);
  const auto restrictions = distinct_restrictions(theory, inputs.points());
  long long total = 0;
  for (Labels z = 0; z < (Labels{1} << n); ++z) {
    // zeta_t (2 f_t - 1) is +1 where the sign bit agrees with the label bit
    int best = -static_cast<int>(n);
    for (Labels r : restrictions) best = std::max(best, static_cast<int>(n) - 2 * popcount(z ^ r));
    total += best;
  }
  return Rational(total, static_cast<long long>(n) << n);
}

Rational rademacher_loss(const Theory& theory, const LabeledSample& sample) {
  check_same_domain(theory, sample.inputs.domain());
  const std::size_t n = sample.inputs.size();
  check_exact_length(n);
  Labels y = 0;
  for (std::size_t t = 0; t < n; ++t) y |= static_cast<Labels>(sample.labels[t]) << t;
  const auto restrictions = distinct_restrictions(theory, sample.inputs.points());
  const Labels all = low_mask(n);
  long long total = 0;
  for (Labels z = 0; z < (Labels{1} << n); ++z) {
    int best = -static_cast<int>(n);
    for (Labels r : restrictions) {
      const Labels loss = r ^ y;
      best = std::max(best, popcount(loss & z) - popcount(loss & ~z & all));
    }
    total += best;
  }
  return Rational(total, static_cast<long long>(n) << n);
}

Rational rademacher_loss(const Theory& theory, const InputSequence& inputs) {
  return rademacher_loss(theory, LabeledSample(inputs, std::vector<int>(inputs.size(), 0)));
}

Rational rademacher_loss_sequence(const Theory& theory, std::span<const std::size_t> points) {
  const std::size_t n = points.size();
  if (n == 0) {
    throw input_error("Rademacher complexity of an empty sequence");
  }
  std::map<std::size_t, unsigned long> counts;
  for (std::size_t x : points) {
    if (x >= theory.domain().size()) throw input_error("point outside the domain");
    ++counts[x];
  }
  std::vector<std::size_t> distinct;
  std::vector<unsigned long> mult;
  double combos = 1.0;
  for (auto [x, c] : counts) {
    distinct.push_back(x);
    mult.push_back(c);
    combos *= static_cast<double>(c + 1);
  }
  if (combos > static_cast<double>(1 << 24)) {
    throw capacity_error("too many sign-count combinations for exact Rademacher complexity");
  }
  const auto restrictions = distinct_restrictions(theory, distinct);
  const std::size_t k = distinct.size();

  // S_u = 2 b_u - c_u with b_u ~ Binomial(c_u, 1/2); enumerate all (b_u).
  std::vector<unsigned long> b(k, 0);
  std::vector<mpz_class> binom(k);
  mpz_class total = 0;
  for (;;) {
    mpz_class weight = 1;
    for (std::size_t u = 0; u < k; ++u) {
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), mult[u], b[u]);
      weight *= c;
    }
    long best = std::numeric_limits<long>::min();
    for (Labels r : restrictions) {
      long s = 0;
      for (std::size_t u = 0; u < k; ++u) {
        if (((r >> u) & 1U) != 0) s += 2 * static_cast<long>(b[u]) - static_cast<long>(mult[u]);
      }
      best = std::max(best, s);
    }
    total += weight * best;
    std::size_t u = 0;
    while (u < k && b[u] == mult[u]) b[u++] = 0;
    if (u == k) break;
    ++b[u];
  }
  mpz_class den = n;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), n);
  return Rational(total, den);
}

// ---- shattering, ERM ------------------------------------------------------------------

bool shatters(const Theory& theory, const InputSequence& inputs) {
  return covering_number(theory, inputs) == (std::size_t{1} << inputs.size());
}

std::size_t vc_dimension(const Theory& theory) {
  std::size_t vc = 0;
  for (std::size_t n = 1; n <= theory.domain().size(); ++n) {
    bool any = false;
    for (const auto& x : enumerate_input_subsets(theory.domain(), n)) {
      if (shatters(theory, x)) {
        any = true;
        break;
      }
    }
    if (!any) break;
    vc = n;
  }
  return vc;
}

namespace {

// Training mistakes of every predictor on a raw event sequence (repeats allowed).
std::size_t erm_on_events(const Theory& theory, std::span<const std::size_t> events,
                          std::size_t* mistakes_out) {
  std::size_t best = 0;
  std::size_t best_mistakes = events.size() + 1;
  for (std::size_t i = 0; i < theory.size(); ++i) {
    std::size_t mistakes = 0;
    for (std::size_t e : events) {
      if (theory.label(i, e / 2) != static_cast<int>(e % 2)) ++mistakes;
    }
    if (mistakes < best_mistakes) {
      best = i;
      best_mistakes = mistakes;
    }
  }
  if (mistakes_out != nullptr) *mistakes_out = best_mistakes;
  return best;
}

}  // namespace

std::size_t erm(const Theory& theory, const LabeledSample& sample) {
  check_same_domain(theory, sample.inputs.domain());
  if (sample.inputs.size() == 0) {
    throw input_error("ERM on an empty sample");
  }
  std::vector<std::size_t> events;
  for (std::size_t t = 0; t < sample.inputs.size(); ++t) {
    events.push_back(2 * sample.inputs[t] + static_cast<std::size_t>(sample.labels[t]));
  }
  return erm_on_events(theory, events, nullptr);
}

std::vector<Theory> enumerate_theories(std::size_t domain_size, std::size_t max_size) {
  if (domain_size == 0 || domain_size > 4) {
    throw input_error("theory enumeration supports domains of size 1..4");
  }
  const std::size_t total = std::size_t{1} << domain_size;
  if (max_size == 0 || max_size > total) {
    throw input_error("theory size bound must be in 1.." + std::to_string(total));
  }
  const Domain d(domain_size);
  std::vector<Theory> out;
  for (std::size_t k = 1; k <= max_size; ++k) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
      out.emplace_back(d, std::vector<Labels>(idx.begin(), idx.end()));
    } while (next_combination(idx, total));
  }
  return out;
}

// ---- generalization experiment --------------------------------------------------------

double soft_bound_constant() { return std::sqrt(2.0 / kLog2E); }
double hard_bound_constant_d1() { return std::sqrt(6.0 / kLog2E); }
double hard_bound_constant_d2() { return std::sqrt(1.0 / kLog2E); }

EventSampler::EventSampler(const EventDistribution& dist) {
  mpz_class lcm = 1;
  for (const auto& m : dist.masses()) {
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), m.denominator().get_mpz_t());
  }
  if (mpz_sizeinbase(lcm.get_mpz_t(), 2) > 62) {
    throw capacity_error("event masses need a common denominator below 2^62");
  }
  denominator_ = lcm.get_ui();
  std::uint64_t acc = 0;
  for (const auto& m : dist.masses()) {
    mpz_class part = m.numerator() * (lcm / m.denominator());
    acc += part.get_ui();
    cumulative_.push_back(acc);
  }
}

std::size_t EventSampler::operator()(std::mt19937_64& rng) const {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % denominator_;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  r %= denominator_;
  return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), r) -
                                  cumulative_.begin());
}

double GeneralizationReport::soft_violation_rate() const {
  return trials == 0 ? 0.0 : static_cast<double>(soft_violations) / static_cast<double>(trials);
}

double GeneralizationReport::hard_violation_rate() const {
  return trials == 0 ? 0.0 : static_cast<double>(hard_violations) / static_cast<double>(trials);
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

GeneralizationReport generalization_experiment(const Theory& theory, const EventDistribution& dist,
                                               std::size_t n, std::size_t trials, double delta,
                                               std::uint64_t seed) {
  check_same_domain(theory, dist.domain());
  if (!(delta > 0.0 && delta < 1.0)) {
    throw input_error("delta must lie in (0, 1)");
  }
  if (trials < 100) {
    throw input_error("generalization experiment needs at least 100 trials");
  }
  if (n == 0 || n > 64) {
    throw input_error("sample size must be in 1..64");
  }
  GeneralizationReport report;
  report.n = n;
  report.trials = trials;
  report.delta = delta;
  report.seed = seed;

  std::vector<Rational> risks;
  for (std::size_t i = 0; i < theory.size(); ++i) risks.push_back(predictor_risk(theory, i, dist));

  const double confidence = std::sqrt((1.0 - std::log2(delta)) / static_cast<double>(n));
  const double c = soft_bound_constant();
  const double d1 = hard_bound_constant_d1();
  const double d2 = hard_bound_constant_d2();

  const EventSampler sampler(dist);
  std::mt19937_64 rng(seed);
  std::map<std::vector<std::size_t>, Rational> radem_cache;
  std::vector<std::size_t> events(n);
  std::vector<std::size_t> points(n);
  std::vector<double> soft_margins;
  std::vector<double> hard_margins;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (std::size_t t = 0; t < n; ++t) {
      events[t] = sampler(rng);
      points[t] = events[t] / 2;
    }
    std::size_t mistakes = 0;
    const std::size_t chosen = erm_on_events(theory, events, &mistakes);

    std::vector<std::size_t> key = points;
    std::sort(key.begin(), key.end());
    auto it = radem_cache.find(key);
    if (it == radem_cache.end()) {
      it = radem_cache.emplace(key, rademacher_loss_sequence(theory, key)).first;
    }
    GeneralizationTrial tr{chosen, Rational(mistakes, n), risks[chosen], Rational{}, 1 - 2 * it->second,
                           0.0, 0.0, 0.0};
    tr.gap = tr.test_risk - tr.train_risk;
    const double cover = static_cast<double>(covering_number(theory, points));
    tr.hard_falsifiability = 1.0 - std::log2(cover) / static_cast<double>(n);
    tr.soft_bound = (1 - tr.soft_falsifiability).to_double() + c * confidence;
    tr.hard_bound = d1 * std::sqrt(std::max(0.0, 1.0 - tr.hard_falsifiability)) + d2 * confidence;
    const double gap = tr.gap.to_double();
    if (gap > tr.soft_bound) ++report.soft_violations;
    if (gap > tr.hard_bound) ++report.hard_violations;
    soft_margins.push_back(tr.soft_bound - gap);
    hard_margins.push_back(tr.hard_bound - gap);
    report.per_trial.push_back(std::move(tr));
  }
  report.min_soft_margin = *std::min_element(soft_margins.begin(), soft_margins.end());
  report.min_hard_margin = *std::min_element(hard_margins.begin(), hard_margins.end());
  report.median_soft_margin = median(soft_margins);
  report.median_hard_margin = median(hard_margins);
  return report;
}

// ---- falsifiability chain ----------------------------------------------------------------

Rational expected_erm_gap(const Theory& theory, const EventDistribution& dist, std::size_t n) {
  check_same_domain(theory, dist.domain());
  std::vector<std::size_t> support;
  for (std::size_t e = 0; e < dist.masses().size(); ++e) {
    if (!dist.masses()[e].is_zero()) support.push_back(e);
  }
  if (std::pow(static_cast<double>(support.size()), static_cast<double>(n)) > static_cast<double>(1 << 20)) {
    throw capacity_error("support^n too large for exact ERM gap enumeration");
  }
  std::vector<Rational> risks;
  for (std::size_t i = 0; i < theory.size(); ++i) risks.push_back(predictor_risk(theory, i, dist));
  const Rational best = *std::min_element(risks.begin(), risks.end());

  std::vector<std::size_t> digit(n, 0);
  std::vector<std::size_t> events(n);
  Rational total;
  for (;;) {
    Rational prob = 1;
    for (std::size_t t = 0; t < n; ++t) {
      events[t] = support[digit[t]];
      prob *= dist.masses()[events[t]];
    }
    total += prob * (risks[erm_on_events(theory, events, nullptr)] - best);
    std::size_t t = 0;
    while (t < n && digit[t] + 1 == support.size()) digit[t++] = 0;
    if (t == n) break;
    ++digit[t];
  }
  return total;
}

std::vector<EventDistribution> default_distribution_family(std::size_t domain_size) {
  std::vector<EventDistribution> family;
  for (Labels s = 0; s < (Labels{1} << domain_size); ++s) {
    family.push_back(EventDistribution::uniform_inputs(domain_size, s));
  }
  family.push_back(EventDistribution::uniform_events(domain_size));
  return family;
}

SltChainReport verify_chain_slt(const Theory& theory, std::size_t n,
                                const std::vector<EventDistribution>& family) {
  auto soft = soft_falsifiability_n(theory, n);
  auto hard = hard_falsifiability_n(theory, n);
  SltChainReport r{n, soft.value, hard.value, soft.witness, hard.witness, 1 - soft.value, 0.0,
                   false, Rational{}, 0, true};
  r.chain_rhs = kChainConstant * std::sqrt(std::max(0.0, 1.0 - r.hard));
  r.chain_holds = r.one_minus_soft.to_double() <= r.chain_rhs + kLogSlack;
  for (std::size_t i = 0; i < family.size(); ++i) {
    Rational gap = expected_erm_gap(theory, family[i], n);
    if (i == 0 || r.erm_gap_proxy < gap) {
      r.erm_gap_proxy = std::move(gap);
      r.proxy_argmax = i;
    }
  }
  r.proxy_holds = r.erm_gap_proxy <= r.one_minus_soft;
  return r;
}

}  // namespace falsify
