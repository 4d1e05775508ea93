#include "falsify/numerics.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "falsify/errors.hpp"

namespace falsify {

namespace {

// log2 of a positive integer: mantissa in [0.5, 1) times 2^exp.
long double log2_positive(const mpz_class& z) {
  long exp = 0;
  const double mantissa = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log2(static_cast<long double>(mantissa)) + static_cast<long double>(exp);
}

// Exponent e with z = 2^e, if any.
std::optional<long> exact_power_of_two(const mpz_class& z) {
  if (z <= 0) {
    return std::nullopt;
  }
  const auto low = mpz_scan1(z.get_mpz_t(), 0);
  if (mpz_sizeinbase(z.get_mpz_t(), 2) != low + 1) {
    return std::nullopt;
  }
  return static_cast<long>(low);
}

}  // namespace

double log2(const Rational& r) {
  if (r.sign() <= 0) {
    throw domain_error("log2 of non-positive value " + r.str());
  }
  const mpz_class num = r.numerator();
  const mpz_class den = r.denominator();
  const auto pn = exact_power_of_two(num);
  const auto pd = exact_power_of_two(den);
  if (pn && pd) {
    return static_cast<double>(*pn - *pd);
  }
  return static_cast<double>(log2_positive(num) - log2_positive(den));
}

MatrixGame::MatrixGame(std::vector<std::vector<Rational>> payoff) : payoff_(std::move(payoff)) {
  if (payoff_.empty() || payoff_.front().empty()) {
    throw input_error("matrix game needs at least one row and one column");
  }
  for (const auto& row : payoff_) {
    if (row.size() != payoff_.front().size()) {
      throw input_error("matrix game rows have unequal length");
    }
  }
}

Rational row_guarantee(const MatrixGame& game, const std::vector<Rational>& p) {
  std::optional<Rational> best;
  for (std::size_t j = 0; j < game.cols(); ++j) {
    Rational s;
    for (std::size_t i = 0; i < game.rows(); ++i) {
      if (!p[i].is_zero()) {
        s += p[i] * game.at(i, j);
      }
    }
    if (!best || *best < s) {
      best = std::move(s);
    }
  }
  return *best;
}

Rational column_guarantee(const MatrixGame& game, const std::vector<Rational>& q) {
  std::optional<Rational> best;
  for (std::size_t i = 0; i < game.rows(); ++i) {
    Rational s;
    for (std::size_t j = 0; j < game.cols(); ++j) {
      if (!q[j].is_zero()) {
        s += q[j] * game.at(i, j);
      }
    }
    if (!best || s < *best) {
      best = std::move(s);
    }
  }
  return *best;
}

namespace {

using Matrix = std::vector<std::vector<Rational>>;

// Solves the square system m x = b exactly; nullopt when singular.
std::optional<std::vector<Rational>> solve_linear(Matrix m, std::vector<Rational> b) {
  const std::size_t n = m.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col].is_zero()) {
      ++pivot;
    }
    if (pivot == n) {
      return std::nullopt;
    }
    std::swap(m[pivot], m[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) {
        continue;
      }
      const Rational factor = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) {
        m[r][c] -= factor * m[col][c];
      }
      b[r] -= factor * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = b[i] / m[i][i];
  }
  return x;
}

// Advances a sorted k-subset of {0..n-1} to its lexicographic successor.
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

// Removes weakly dominated rows (minimizer) and columns (maximizer) until stable.
// Among identical lines the lowest index survives.
void reduce_dominated(const MatrixGame& g, std::vector<std::size_t>& rows,
                      std::vector<std::size_t>& cols) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < rows.size() && rows.size() > 1; ++a) {
      for (std::size_t b = 0; b < rows.size(); ++b) {
        if (a == b) {
          continue;
        }
        bool le = true;
        bool equal = true;
        for (std::size_t c : cols) {
          const auto ord = g.at(rows[b], c) <=> g.at(rows[a], c);
          if (ord > 0) {
            le = false;
            break;
          }
          if (ord != 0) {
            equal = false;
          }
        }
        // row b is no worse than row a everywhere: drop a
        if (le && (!equal || rows[b] < rows[a])) {
          rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(a));
          changed = true;
          --a;
          break;
        }
      }
    }
    for (std::size_t a = 0; a < cols.size() && cols.size() > 1; ++a) {
      for (std::size_t b = 0; b < cols.size(); ++b) {
        if (a == b) {
          continue;
        }
        bool ge = true;
        bool equal = true;
        for (std::size_t r : rows) {
          const auto ord = g.at(r, cols[b]) <=> g.at(r, cols[a]);
          if (ord < 0) {
            ge = false;
            break;
          }
          if (ord != 0) {
            equal = false;
          }
        }
        if (ge && (!equal || cols[b] < cols[a])) {
          cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(a));
          changed = true;
          --a;
          break;
        }
      }
    }
  }
}

}  // namespace

GameSolution solve_matrix_game(const MatrixGame& game) {
  std::vector<std::size_t> rows(game.rows());
  std::vector<std::size_t> cols(game.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  reduce_dominated(game, rows, cols);

  Matrix sub(rows.size(), std::vector<Rational>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      sub[i][j] = game.at(rows[i], cols[j]);
    }
  }
  const MatrixGame reduced(sub);

  const std::size_t kmax = std::min(rows.size(), cols.size());
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::vector<std::size_t> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    do {
      std::vector<std::size_t> t(k);
      for (std::size_t i = 0; i < k; ++i) t[i] = i;
      do {
        // row mixture p on s equalizing columns t: sum_i p_i A_ij - v = 0, sum p = 1
        Matrix mp(k + 1, std::vector<Rational>(k + 1));
        Matrix mq(k + 1, std::vector<Rational>(k + 1));
        std::vector<Rational> rhs(k + 1);
        rhs[k] = 1;
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t b = 0; b < k; ++b) {
            mp[a][b] = reduced.at(s[b], t[a]);
            mq[a][b] = reduced.at(s[a], t[b]);
          }
          mp[a][k] = -1;
          mq[a][k] = -1;
          mp[k][a] = 1;
          mq[k][a] = 1;
        }
        auto xp = solve_linear(mp, rhs);
        if (!xp) continue;
        bool ok = true;
        for (std::size_t a = 0; a < k && ok; ++a) ok = (*xp)[a].sign() >= 0;
        if (!ok) continue;
        auto xq = solve_linear(mq, rhs);
        if (!xq) continue;
        for (std::size_t a = 0; a < k && ok; ++a) ok = (*xq)[a].sign() >= 0;
        if (!ok || (*xp)[k] != (*xq)[k]) continue;

        std::vector<Rational> p(reduced.rows());
        std::vector<Rational> q(reduced.cols());
        for (std::size_t a = 0; a < k; ++a) {
          p[s[a]] = (*xp)[a];
          q[t[a]] = (*xq)[a];
        }
        const Rational& v = (*xp)[k];
        if (row_guarantee(reduced, p) != v || column_guarantee(reduced, q) != v) continue;

        GameSolution sol{v, std::vector<Rational>(game.rows()), std::vector<Rational>(game.cols())};
        for (std::size_t i = 0; i < rows.size(); ++i) sol.row_strategy[rows[i]] = p[i];
        for (std::size_t j = 0; j < cols.size(); ++j) sol.column_strategy[cols[j]] = q[j];
        if (row_guarantee(game, sol.row_strategy) != v ||
            column_guarantee(game, sol.column_strategy) != v) {
          throw std::logic_error("dominance reduction changed the game value");
        }
        return sol;
      } while (next_combination(t, cols.size()));
    } while (next_combination(s, rows.size()));
  }
  // Shapley-Snow guarantees a square kernel for every finite game.
  throw std::logic_error("no square kernel found for matrix game");
}

}  // namespace falsify
