#include "falsify/info.hpp"

#include <string>

#include "falsify/errors.hpp"
#include "falsify/numerics.hpp"

namespace falsify {

FiniteDistribution::FiniteDistribution(std::vector<Rational> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) {
    throw input_error("distribution needs at least one atom");
  }
  Rational total;
  for (const auto& m : mass_) {
    if (m.sign() < 0) {
      throw input_error("negative probability mass " + m.str());
    }
    total += m;
  }
  if (total != 1) {
    throw input_error("masses sum to " + total.str() + ", not 1");
  }
}

FiniteDistribution FiniteDistribution::uniform(std::size_t size) {
  if (size == 0) {
    throw input_error("uniform distribution over zero atoms");
  }
  return FiniteDistribution(std::vector<Rational>(size, Rational(1, size)));
}

FiniteDistribution FiniteDistribution::point(std::size_t size, std::size_t atom) {
  if (atom >= size) {
    throw input_error("point mass outside support");
  }
  std::vector<Rational> m(size);
  m[atom] = 1;
  return FiniteDistribution(std::move(m));
}

Channel::Channel(std::vector<std::vector<Rational>> conditional)
    : conditional_(std::move(conditional)) {
  if (conditional_.empty()) {
    throw input_error("channel needs at least one input");
  }
  for (const auto& row : conditional_) {
    if (row.size() != conditional_.front().size()) {
      throw input_error("channel rows have unequal output sets");
    }
    FiniteDistribution check(row);  // validates the row
  }
}

Channel Channel::deterministic(const std::vector<std::size_t>& f, std::size_t outputs) {
  std::vector<std::vector<Rational>> rows;
  rows.reserve(f.size());
  for (std::size_t y : f) {
    if (y >= outputs) {
      throw input_error("function value outside output set");
    }
    std::vector<Rational> row(outputs);
    row[y] = 1;
    rows.push_back(std::move(row));
  }
  return Channel(std::move(rows));
}

namespace {

void check_prior(const Channel& ch, const FiniteDistribution& prior) {
  if (prior.size() != ch.inputs()) {
    throw input_error("prior has " + std::to_string(prior.size()) + " atoms, channel has " +
                      std::to_string(ch.inputs()) + " inputs");
  }
}

}  // namespace

FiniteDistribution induced_distribution(const Channel& ch, const FiniteDistribution& prior) {
  check_prior(ch, prior);
  std::vector<Rational> out(ch.outputs());
  for (std::size_t x = 0; x < ch.inputs(); ++x) {
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
      out[y] += prior[x] * ch.prob(y, x);
    }
  }
  return FiniteDistribution(std::move(out));
}

FiniteDistribution induced_distribution(const Channel& ch) {
  return induced_distribution(ch, FiniteDistribution::uniform(ch.inputs()));
}

FiniteDistribution bayes_posterior(const Channel& ch, std::size_t y, const FiniteDistribution& prior) {
  check_prior(ch, prior);
  if (y >= ch.outputs()) {
    throw input_error("output atom outside channel output set");
  }
  const Rational py = induced_distribution(ch, prior)[y];
  if (py.is_zero()) {
    throw undefined_gain_error("posterior undefined: output " + std::to_string(y) +
                               " has probability zero");
  }
  std::vector<Rational> post(ch.inputs());
  for (std::size_t x = 0; x < ch.inputs(); ++x) {
    post[x] = ch.prob(y, x) * prior[x] / py;
  }
  return FiniteDistribution(std::move(post));
}

FiniteDistribution bayes_posterior(const Channel& ch, std::size_t y) {
  return bayes_posterior(ch, y, FiniteDistribution::uniform(ch.inputs()));
}

double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.size() != q.size()) {
    throw input_error("KL divergence of distributions on different supports");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].is_zero()) {
      continue;
    }
    if (q[i].is_zero()) {
      throw infinite_divergence_error("p(" + std::to_string(i) + ") > 0 = q(" +
                                      std::to_string(i) + ")");
    }
    total += p[i].to_double() * log2(p[i] / q[i]);
  }
  // rounding can leave -1e-17 for identical inputs
  return total < 0.0 ? 0.0 : total;
}

double info_gain(const Channel& ch, std::size_t y, const FiniteDistribution& prior) {
  return kl_divergence(bayes_posterior(ch, y, prior), prior);
}

double info_gain(const Channel& ch, std::size_t y) {
  return info_gain(ch, y, FiniteDistribution::uniform(ch.inputs()));
}

double mutual_information(const Channel& ch, const FiniteDistribution& prior) {
  const FiniteDistribution induced = induced_distribution(ch, prior);
  double total = 0.0;
  for (std::size_t y = 0; y < ch.outputs(); ++y) {
    if (!induced[y].is_zero()) {
      total += induced[y].to_double() * info_gain(ch, y, prior);
    }
  }
  return total;
}

double mutual_information(const Channel& ch) {
  return mutual_information(ch, FiniteDistribution::uniform(ch.inputs()));
}

}  // namespace falsify
