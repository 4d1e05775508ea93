#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "falsify/errors.hpp"
#include "falsify/numerics.hpp"
#include "falsify/rational.hpp"

using namespace falsify;

namespace {

// Reference fraction on 128-bit integers, reduced with std::gcd.
struct Frac {
  __int128 num;
  __int128 den;
};

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Frac reduce(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const __int128 g = gcd128(n, d);
  return {n / g, d / g};
}

std::string frac_str(const Frac& f) {
  auto to_s = [](__int128 v) {
    if (v == 0) return std::string("0");
    const bool neg = v < 0;
    std::string s;
    for (; v != 0; v /= 10) s.insert(s.begin(), static_cast<char>('0' + (neg ? -(v % 10) : v % 10)));
    return neg ? "-" + s : s;
  };
  return to_s(f.num) + "/" + to_s(f.den);
}

// Exact value of a 2-row game: the minimizer's upper envelope is piecewise linear in
// the weight on row 0, so its minimum sits at 0, 1 or a crossing of two columns.
Rational two_row_value(const std::vector<std::vector<Rational>>& a) {
  std::vector<Rational> candidates = {Rational(0), Rational(1)};
  const std::size_t cols = a[0].size();
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = i + 1; j < cols; ++j) {
      // p a0i + (1-p) a1i = p a0j + (1-p) a1j
      const Rational slope = (a[0][i] - a[1][i]) - (a[0][j] - a[1][j]);
      if (slope.is_zero()) continue;
      const Rational p = (a[1][j] - a[1][i]) / slope;
      if (p.sign() >= 0 && p <= Rational(1)) candidates.push_back(p);
    }
  }
  Rational best;
  bool first = true;
  for (const auto& p : candidates) {
    Rational worst;
    for (std::size_t j = 0; j < cols; ++j) {
      const Rational v = p * a[0][j] + (1 - p) * a[1][j];
      if (j == 0 || worst < v) worst = v;
    }
    if (first || worst < best) best = worst;
    first = false;
  }
  return best;
}

std::vector<std::vector<Rational>> random_game(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> entry(-4, 6);
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols));
  for (auto& row : a) {
    for (auto& v : row) v = Rational(entry(rng), 1 + (entry(rng) + 4) % 3);
  }
  return a;
}

}  // namespace

TEST_CASE("rational canonical form and parsing") {
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(-3, -6).str() == "1/2");
  CHECK(Rational(3, -6).str() == "-1/2");
  CHECK(Rational(5).str() == "5/1");
  CHECK(Rational(0, 7).str() == "0/1");
  CHECK(Rational::parse("6/8") == Rational(3, 4));
  CHECK(Rational::parse("-7") == Rational(-7));
  CHECK_THROWS_AS(Rational::parse("1/0"), input_error);
  CHECK_THROWS_AS(Rational::parse("abc"), input_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
  CHECK(pow2(-3) == Rational(1, 8));
  CHECK(pow2(4) == Rational(16));
}

TEST_CASE("rational arithmetic matches a 128-bit fraction oracle") {
  std::mt19937_64 rng(20261019);
  std::uniform_int_distribution<long> num(-(1L << 20), 1L << 20);
  std::uniform_int_distribution<long> den(1, 1L << 20);
  for (int i = 0; i < 2000; ++i) {
    const long an = num(rng), ad = den(rng), bn = num(rng), bd = den(rng);
    const Rational a(an, ad), b(bn, bd);
    CHECK((a + b).str() == frac_str(reduce(static_cast<__int128>(an) * bd + static_cast<__int128>(bn) * ad,
                                           static_cast<__int128>(ad) * bd)));
    CHECK((a - b).str() == frac_str(reduce(static_cast<__int128>(an) * bd - static_cast<__int128>(bn) * ad,
                                           static_cast<__int128>(ad) * bd)));
    CHECK((a * b).str() == frac_str(reduce(static_cast<__int128>(an) * bn, static_cast<__int128>(ad) * bd)));
    if (bn != 0) {
      CHECK((a / b).str() == frac_str(reduce(static_cast<__int128>(an) * bd, static_cast<__int128>(ad) * bn)));
    }
    const __int128 lhs = static_cast<__int128>(an) * bd;
    const __int128 rhs = static_cast<__int128>(bn) * ad;
    CHECK((a < b) == (lhs < rhs));
    CHECK((a == b) == (lhs == rhs));
    CHECK(Rational::parse(a.str()) == a);
  }
}

TEST_CASE("log2 values") {
  CHECK(log2(Rational(1)) == 0.0);
  CHECK(log2(Rational(1, 4)) == -2.0);
  CHECK(log2(Rational(1024)) == 10.0);
  // 3/4: log2 3 - 2 from the series ln 3 = 2 atanh(1/2) summed in long double
  long double atanh = 0;
  for (int k = 0; k < 80; ++k) atanh += std::pow(0.5L, 2 * k + 1) / (2 * k + 1);
  const long double expected = 2 * atanh / std::log(2.0L) - 2;
  CHECK(std::abs(log2(Rational(3, 4)) - static_cast<double>(expected)) <= 1e-12);
  CHECK(std::abs(log2(Rational(3, 4)) + 0.415037499278843818) <= 1e-12);
  CHECK_THROWS_AS(log2(Rational(0)), std::domain_error);
  CHECK_THROWS_AS(log2(Rational(-1, 2)), std::domain_error);
  // huge numerators and denominators
  const Rational big(mpz_class("340282366920938463463374607431768211457"), mpz_class(3));
  CHECK(std::abs(log2(big) - (128.0 - std::log2(3.0))) <= 1e-9);
}

TEST_CASE("matrix game examples") {
  SUBCASE("single action") {
    const auto s = solve_matrix_game(MatrixGame({{Rational(3, 7)}}));
    CHECK(s.value == Rational(3, 7));
    CHECK(s.row_strategy == std::vector<Rational>{Rational(1)});
  }
  SUBCASE("matching pennies") {
    const MatrixGame g({{Rational(0), Rational(1)}, {Rational(1), Rational(0)}});
    const auto s = solve_matrix_game(g);
    CHECK(s.value == Rational(1, 2));
    CHECK(s.row_strategy == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
    // both pure column responses against the uniform row mixture give 1/2
    CHECK(row_guarantee(g, {Rational(1, 2), Rational(1, 2)}) == Rational(1, 2));
  }
  SUBCASE("dominated row") {
    const auto s = solve_matrix_game(MatrixGame({{Rational(0), Rational(0)}, {Rational(1), Rational(1)}}));
    CHECK(s.value == Rational(0));
    CHECK(s.row_strategy == std::vector<Rational>{Rational(1), Rational(0)});
  }
  CHECK_THROWS_AS(MatrixGame({}), input_error);
  CHECK_THROWS_AS(MatrixGame({{Rational(1)}, {Rational(1), Rational(2)}}), input_error);
}

TEST_CASE("matrix game properties on random games") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + trial % 4;
    const std::size_t cols = 1 + (trial / 4) % 5;
    const auto a = random_game(rng, rows, cols);
    const MatrixGame g(a);
    const auto s = solve_matrix_game(g);
    CHECK(row_guarantee(g, s.row_strategy) == s.value);
    CHECK(column_guarantee(g, s.column_strategy) == s.value);
    for (std::size_t i = 0; i < rows; ++i) {
      Rational worst = a[i][0];
      for (std::size_t j = 1; j < cols; ++j) worst = max(worst, a[i][j]);
      CHECK(worst >= s.value);
    }
    if (rows == 2) CHECK(s.value == two_row_value(a));

    // positive scaling scales the value and keeps the support
    const Rational c(trial % 5 + 1, 3);
    auto scaled = a;
    for (auto& row : scaled) {
      for (auto& v : row) v *= c;
    }
    const auto t = solve_matrix_game(MatrixGame(scaled));
    CHECK(t.value == c * s.value);
    for (std::size_t i = 0; i < rows; ++i) CHECK(t.row_strategy[i].is_zero() == s.row_strategy[i].is_zero());
  }
}
