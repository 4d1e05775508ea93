#pragma once

#include <cstddef>
#include <vector>

#include "falsify/rational.hpp"

namespace falsify {

// All logarithms in the library are base 2 (bits).

/// Slack used whenever an inequality involves a logarithm or square root.
inline constexpr double kLogSlack = 1e-9;

/// log2(e), so "log e" in bound constants means this value.
inline constexpr double kLog2E = 1.4426950408889634073599246810019;

/// Binary logarithm of a positive rational, absolute error <= 1e-12.
/// Exact (integer-valued) when r is a power of two. Throws domain_error for r <= 0.
double log2(const Rational& r);

/// Finite two-player zero-sum game. The row player minimizes, the column player maximizes.
class MatrixGame {
 public:
  explicit MatrixGame(std::vector<std::vector<Rational>> payoff);

  [[nodiscard]] std::size_t rows() const { return payoff_.size(); }
  [[nodiscard]] std::size_t cols() const { return payoff_.front().size(); }
  [[nodiscard]] const Rational& at(std::size_t row, std::size_t col) const {
    return payoff_[row][col];
  }
  [[nodiscard]] const std::vector<std::vector<Rational>>& payoff() const { return payoff_; }

 private:
  std::vector<std::vector<Rational>> payoff_;
};

struct GameSolution {
  Rational value;
  std::vector<Rational> row_strategy;     // optimal mixture for the minimizer
  std::vector<Rational> column_strategy;  // optimal mixture for the maximizer
};

/// Exact minimax value min_p max_j (p^T A)_j together with optimal mixtures for both players.
///
/// Iteratively removes weakly dominated rows and columns, then enumerates square
/// kernels (row support S, column support T, |S| = |T|) in a fixed order and returns
/// the first pair of mixtures that certify each other. Deterministic: equal inputs and
/// positively scaled inputs produce the same supports.
GameSolution solve_matrix_game(const MatrixGame& game);

/// Max over columns of the expected payoff when the row player mixes with p.
Rational row_guarantee(const MatrixGame& game, const std::vector<Rational>& p);

/// Min over rows of the expected payoff when the column player mixes with q.
Rational column_guarantee(const MatrixGame& game, const std::vector<Rational>& q);

}  // namespace falsify
