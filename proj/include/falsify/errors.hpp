#pragma once

#include <stdexcept>
#include <string>

namespace falsify {

// Caller passed something outside an operation's precondition.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact enumeration would exceed a hard ceiling.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Argument outside a mathematical function's domain (log of a non-positive value).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bayes posterior or information gain requested for an output of probability zero.
class undefined_gain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// KL divergence with p(x) > 0 = q(x).
class infinite_divergence_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Solomonoff conditional requested for a history of prior zero.
class unpredictable_history_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace falsify
