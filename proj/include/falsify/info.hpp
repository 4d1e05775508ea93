#pragma once

#include <cstddef>
#include <vector>

#include "falsify/rational.hpp"

namespace falsify {

/// Probability mass function over atoms 0..size()-1. Masses are >= 0 and sum to exactly 1.
class FiniteDistribution {
 public:
  explicit FiniteDistribution(std::vector<Rational> mass);

  static FiniteDistribution uniform(std::size_t size);
  static FiniteDistribution point(std::size_t size, std::size_t atom);

  [[nodiscard]] std::size_t size() const { return mass_.size(); }
  [[nodiscard]] const Rational& operator[](std::size_t atom) const { return mass_[atom]; }
  [[nodiscard]] const std::vector<Rational>& masses() const { return mass_; }

  friend bool operator==(const FiniteDistribution&, const FiniteDistribution&) = default;

 private:
  std::vector<Rational> mass_;
};

/// Conditional distribution P(y | x) over finite input and output sets.
class Channel {
 public:
  /// conditional[x][y] = P(y | x); each row must be a distribution.
  explicit Channel(std::vector<std::vector<Rational>> conditional);

  /// Deterministic function f: {0..|f|-1} -> {0..outputs-1} as a 0/1 channel.
  static Channel deterministic(const std::vector<std::size_t>& f, std::size_t outputs);

  [[nodiscard]] std::size_t inputs() const { return conditional_.size(); }
  [[nodiscard]] std::size_t outputs() const { return conditional_.front().size(); }
  [[nodiscard]] const Rational& prob(std::size_t y, std::size_t x) const { return conditional_[x][y]; }

 private:
  std::vector<std::vector<Rational>> conditional_;
};

/// y -> sum_x prior(x) P(y|x).
FiniteDistribution induced_distribution(const Channel& ch, const FiniteDistribution& prior);
FiniteDistribution induced_distribution(const Channel& ch);  // uniform prior

/// Bayes' rule after observing y. Throws undefined_gain_error if y has induced probability 0.
FiniteDistribution bayes_posterior(const Channel& ch, std::size_t y, const FiniteDistribution& prior);
FiniteDistribution bayes_posterior(const Channel& ch, std::size_t y);

/// KL(p || q) in bits with 0 log 0 = 0. Throws infinite_divergence_error when p is not
/// absolutely continuous with respect to q.
double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q);

/// KL of the posterior after observing y from the prior.
double info_gain(const Channel& ch, std::size_t y, const FiniteDistribution& prior);
double info_gain(const Channel& ch, std::size_t y);

/// Expected information gain over the induced output distribution.
double mutual_information(const Channel& ch, const FiniteDistribution& prior);
double mutual_information(const Channel& ch);

}  // namespace falsify
