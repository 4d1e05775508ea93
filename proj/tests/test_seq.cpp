#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <set>

#include "falsify/errors.hpp"
#include "falsify/numerics.hpp"
#include "falsify/seq.hpp"

using namespace falsify;

namespace {

Theory consts(std::size_t m) { return Theory::constants(m); }
Theory single(std::size_t m) { return Theory(Domain(m), {0}); }

std::vector<std::size_t> walk(const Tree& tree, std::uint64_t w) {
  return path_apply(tree, Path(tree.depth(), w));
}

unsigned along(Labels f, const std::vector<std::size_t>& xs) {
  unsigned s = 0;
  for (std::size_t t = 0; t < xs.size(); ++t) s |= static_cast<unsigned>((f >> xs[t]) & 1U) << t;
  return s;
}

// F from the definition: sigma ranges over every hypothesis on X.
Rational oracle_soft_seq(const Theory& o, const Tree& tree) {
  const std::size_t n = tree.depth();
  const std::size_t m = o.domain().size();
  Rational total;
  for (std::uint64_t w = 0; w < (1U << n); ++w) {
    for (Labels sigma = 0; sigma < (Labels{1} << m); ++sigma) {
      total += soft_risk_seq(o, Path(n, w), tree, sigma);
    }
  }
  return 2 * total / Rational(std::uint64_t{1} << (n + m));
}

// G from the definition: effective lifted hypotheses are the realized label sequences
// sigma(x(rho)); zero-risk ones are those some (f, omega) matches.
double oracle_hard_seq(const Theory& o, const Tree& tree) {
  const std::size_t n = tree.depth();
  const LiftedTheory lifted(o, n);
  std::set<unsigned> effective, zero;
  for (std::uint64_t rho = 0; rho < (1U << n); ++rho) {
    for (Labels sigma = 0; sigma < (Labels{1} << o.domain().size()); ++sigma) {
      const unsigned s = along(sigma, walk(tree, rho));
      effective.insert(s);
      if (hard_risk_seq(lifted, tree, sigma, Path(n, rho)).is_zero()) zero.insert(s);
    }
  }
  return (std::log2(static_cast<double>(effective.size())) - std::log2(static_cast<double>(zero.size()))) /
         static_cast<double>(n);
}

// Smallest k such that some k label trees cover every (f, omega).
std::size_t oracle_zero_cover(const Theory& o, const Tree& tree) {
  const std::size_t n = tree.depth();
  const std::size_t nodes = tree.nodes().size();
  auto label_along = [&](unsigned v, std::uint64_t w) {
    unsigned s = 0;
    std::size_t i = 0;
    for (std::size_t t = 0; t < n; ++t) {
      s |= ((v >> i) & 1U) << t;
      i = 2 * i + 1 + ((w >> t) & 1U);
    }
    return s;
  };
  const unsigned candidates = 1U << nodes;
  for (std::size_t k = 1; k <= o.size() << n; ++k) {
    // choose k candidate label trees (with repetition harmless) via odometer over subsets
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << candidates); ++subset) {
      if (static_cast<std::size_t>(std::popcount(subset)) != k) continue;
      bool covers = true;
      for (Labels f : o.predictors()) {
        for (std::uint64_t w = 0; w < (1U << n) && covers; ++w) {
          const unsigned target = along(f, walk(tree, w));
          bool hit = false;
          for (unsigned v = 0; v < candidates && !hit; ++v) {
            hit = ((subset >> v) & 1U) != 0 && label_along(v, w) == target;
          }
          covers = hit;
        }
      }
      if (covers) return k;
    }
  }
  return 0;
}

// Best response solver for a theory with at most two predictors: the minimizer's
// envelope is piecewise linear in the weight of row 0.
Rational small_game_value(const std::vector<std::vector<Rational>>& a) {
  if (a.size() == 1) return *std::max_element(a[0].begin(), a[0].end());
  std::vector<Rational> candidates = {Rational(0), Rational(1)};
  for (std::size_t i = 0; i < a[0].size(); ++i) {
    for (std::size_t j = i + 1; j < a[0].size(); ++j) {
      const Rational slope = (a[0][i] - a[1][i]) - (a[0][j] - a[1][j]);
      if (slope.is_zero()) continue;
      const Rational p = (a[1][j] - a[1][i]) / slope;
      if (p.sign() >= 0 && p <= Rational(1)) candidates.push_back(p);
    }
  }
  std::optional<Rational> best;
  for (const auto& p : candidates) {
    std::optional<Rational> worst;
    for (std::size_t j = 0; j < a[0].size(); ++j) {
      const Rational v = p * a[0][j] + (1 - p) * a[1][j];
      if (!worst || *worst < v) worst = v;
    }
    if (!best || *worst < *best) best = worst;
  }
  return *best;
}

Rational oracle_game(const Theory& o, std::size_t rounds, std::vector<std::size_t>& events) {
  if (events.size() == rounds) return -Rational(hindsight_comparator(o, events));
  const std::size_t z_count = 2 * o.domain().size();
  std::vector<std::vector<Rational>> a(o.size(), std::vector<Rational>(z_count));
  for (std::size_t z = 0; z < z_count; ++z) {
    events.push_back(z);
    const Rational cont = oracle_game(o, rounds, events);
    events.pop_back();
    for (std::size_t f = 0; f < o.size(); ++f) a[f][z] = (o.label(f, z / 2) != static_cast<int>(z % 2) ? 1 : 0) + cont;
  }
  return small_game_value(a);
}

}  // namespace

TEST_CASE("paths and trees") {
  const Domain d(3);
  CHECK(Path::from_signs({-1, 1, 1}).bits() == 0b110);
  CHECK(Path::from_signs({1, -1}).sign(0) == 1);
  CHECK_THROWS_AS(Path::from_signs({0}), input_error);
  CHECK_THROWS_AS(Path(2, 4), input_error);
  CHECK_THROWS_AS(Tree(d, 2, {0, 1}), input_error);
  CHECK_THROWS_AS(Tree(d, 2, {0, 0, 0}), input_error);
  CHECK_THROWS_AS(Tree(d, 2, {0, 1, 3}), input_error);
  CHECK_THROWS_AS(Tree(Domain(8), 7, std::vector<std::size_t>(127, 0)), capacity_error);

  const Tree t1(d, 1, {2});
  CHECK(path_apply(t1, Path::from_signs({-1})) == std::vector<std::size_t>{2});
  CHECK(path_apply(t1, Path::from_signs({1})) == std::vector<std::size_t>{2});
  const Tree abb(d, 2, {0, 1, 1});
  CHECK(path_apply(abb, Path::from_signs({1, -1})) == std::vector<std::size_t>{0, 1});
  const Tree abc(d, 2, {0, 1, 2});
  CHECK(path_apply(abc, Path::from_signs({-1, 1})) == std::vector<std::size_t>{0, 1});
  CHECK(path_apply(abc, Path::from_signs({1, 1})) == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(path_apply(abc, Path::from_signs({1})), input_error);
  CHECK(abc.all_paths_distinct());
  CHECK_FALSE(Tree(d, 2, {0, 0, 1}).all_paths_distinct());

  CHECK(enumerate_trees(Domain(2), 2).size() == 6);
  CHECK(enumerate_trees(Domain(2), 3).empty());
  for (const auto& t : enumerate_trees(Domain(3), 2)) CHECK(t.depth() == 2);
}

TEST_CASE("soft and hard sequential risk") {
  const Tree ab(Domain(2), 2, {0, 1, 1});
  const Path p = Path::from_signs({1, 1});
  CHECK(soft_risk_seq(Theory::full(2), p, ab, 0b10) == Rational(0));
  CHECK(soft_risk_seq(consts(2), p, ab, 0b10) == Rational(1, 2));
  CHECK(soft_risk_seq(single(2), p, ab, 0b11) == Rational(1));

  const LiftedTheory lifted(consts(2), 2);
  CHECK(hard_risk_seq(lifted, ab, 0b00, p) == Rational(0));
  CHECK(hard_risk_seq(lifted, ab, 0b10, p) == Rational(1, 2));
  CHECK_THROWS_AS(hard_risk_seq(LiftedTheory(consts(2), 1), ab, 0, p), input_error);

  // hard risk never exceeds soft risk
  for (const auto& o : enumerate_theories(3, 8)) {
    for (const auto& tree : enumerate_trees(o.domain(), 2)) {
      const LiftedTheory l(o, 2);
      for (Labels sigma = 0; sigma < 8; ++sigma) {
        for (std::uint64_t rho = 0; rho < 4; ++rho) {
          CHECK(hard_risk_seq(l, tree, sigma, Path(2, rho)) <= soft_risk_seq(o, Path(2, rho), tree, sigma));
        }
      }
    }
  }
}

TEST_CASE("sequential falsifiability examples") {
  const Tree abb(Domain(2), 2, {0, 1, 1});
  CHECK(soft_falsifiability_seq(single(2), abb) == Rational(1));
  CHECK(soft_falsifiability_seq(consts(2), abb) == Rational(1, 2));
  CHECK(soft_falsifiability_seq(Theory::full(2), abb) == Rational(0));
  CHECK(hard_falsifiability_seq(single(2), abb).value == 1.0);
  CHECK(hard_falsifiability_seq(consts(2), abb).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hard_falsifiability_seq(Theory::full(2), abb).value == 0.0);
  CHECK_FALSE(hard_falsifiability_seq(consts(2), abb).degenerate);

  const Tree repeated(Domain(2), 2, {0, 0, 1});
  const auto g = hard_falsifiability_seq(Theory::full(2), repeated);
  // the path (x0, x1) still realizes all four label sequences
  CHECK(g.effective_count == 4);
  CHECK_FALSE(g.degenerate);
}

TEST_CASE("sequential measures agree with definition-level oracles") {
  for (std::size_t m = 1; m <= 3; ++m) {
    for (const auto& o : enumerate_theories(m, std::size_t{1} << m)) {
      for (std::size_t n = 1; n <= std::min<std::size_t>(m, 2); ++n) {
        for (const auto& tree : enumerate_trees(o.domain(), n)) {
          const Rational f = soft_falsifiability_seq(o, tree);
          CHECK(f == oracle_soft_seq(o, tree));
          const auto g = hard_falsifiability_seq(o, tree);
          CHECK(std::abs(g.value - oracle_hard_seq(o, tree)) <= 1e-12);
          const std::size_t q = q_image_count(LiftedTheory(o, n), tree);
          if (!g.degenerate) {
            CHECK(std::abs(g.value - (static_cast<double>(n) - std::log2(static_cast<double>(q))) /
                                         static_cast<double>(n)) <= kLogSlack);
          }
          CHECK(f.sign() >= 0);
          CHECK(f <= Rational(1));
          if (tree.all_paths_distinct()) CHECK(f == 1 - 2 * path_averaged_rademacher_loss(o, tree));
        }
      }
    }
  }
}

TEST_CASE("sequential Rademacher values") {
  const Tree abb(Domain(2), 2, {0, 1, 1});
  CHECK(seq_rademacher(single(2), abb) == Rational(0));
  CHECK(seq_rademacher_loss(single(2), abb) == Rational(0));
  CHECK(seq_rademacher_loss(consts(2), abb) == Rational(1, 4));
  CHECK(seq_rademacher_loss(Theory::full(2), abb) == Rational(1, 2));
  CHECK(seq_rademacher(Theory::full(2), abb) == Rational(1));
  CHECK_THROWS_AS(seq_rademacher_loss(consts(2), abb, {0, 1}), input_error);
}

TEST_CASE("coupled sequential Rademacher breaks the soft identity") {
  // Tree evaluated along the sign vector itself: F differs from 1 - 2 Radem here.
  const Theory o = Theory::from_strings({"000", "001", "010"});
  const Tree tree(Domain(3), 2, {1, 0, 2});
  CHECK(tree.all_paths_distinct());
  CHECK(soft_falsifiability_seq(o, tree) == Rational(3, 8));
  CHECK(seq_rademacher_loss(o, tree) == Rational(1, 4));
  CHECK(soft_falsifiability_seq(o, tree) != 1 - 2 * seq_rademacher_loss(o, tree));
  CHECK(soft_falsifiability_seq(o, tree) == 1 - 2 * path_averaged_rademacher_loss(o, tree));
}

TEST_CASE("zero cover") {
  const Tree abc(Domain(3), 2, {0, 1, 2});
  CHECK(zero_cover_number(single(3), abc) == 1);
  CHECK(zero_cover_number(consts(3), abc) == 2);
  CHECK(q_image_count(LiftedTheory(consts(3), 2), abc) == 2);
  CHECK(q_image_count(LiftedTheory(Theory::full(3), 2), abc) == 4);
  CHECK_THROWS_AS(zero_cover_number(Theory::full(4), Tree(Domain(4), 2, {0, 1, 2})), capacity_error);

  for (std::size_t m = 1; m <= 3; ++m) {
    for (const auto& o : enumerate_theories(m, std::min<std::size_t>(8, std::size_t{1} << m))) {
      for (std::size_t n = 1; n <= std::min<std::size_t>(m, 2); ++n) {
        for (const auto& tree : enumerate_trees(o.domain(), n)) {
          const std::size_t cover = zero_cover_number(o, tree);
          CHECK(cover == oracle_zero_cover(o, tree));
          CHECK(cover <= q_image_count(LiftedTheory(o, n), tree));
        }
      }
    }
  }
}

TEST_CASE("singleton indicators have q-image n + 1 on trees with distinct values") {
  for (std::size_t n : {2U, 3U}) {
    const std::size_t m = (std::size_t{1} << n) - 1;
    std::vector<Labels> fs;
    for (std::size_t x = 0; x < m; ++x) fs.push_back(Labels{1} << x);
    const Theory o(Domain(m), fs);
    std::vector<std::size_t> nodes(m);
    for (std::size_t i = 0; i < m; ++i) nodes[i] = i;
    const Tree tree(Domain(m), n, nodes);
    CHECK(q_image_count(LiftedTheory(o, n), tree) == n + 1);
    CHECK(zero_cover_number(Theory(Domain(m), std::vector<Labels>(fs.begin(), fs.begin() + std::min<std::size_t>(8, m))),
                            tree) <= n + 1);
  }
}

TEST_CASE("Littlestone dimension") {
  for (std::size_t m = 1; m <= 4; ++m) CHECK(littlestone_dimension(Theory::full(m)) == m);
  CHECK(littlestone_dimension(consts(3)) == 1);
  CHECK(littlestone_dimension(single(3)) == 0);
  CHECK(vc_lifted(single(3), 3) == 0);
  CHECK(vc_lifted(consts(3), 3) == 1);
  CHECK_THROWS_AS(vc_lifted(consts(3), 4), capacity_error);
  for (std::size_t m = 1; m <= 3; ++m) {
    for (const auto& o : enumerate_theories(m, std::size_t{1} << m)) {
      CHECK(littlestone_dimension(o) == littlestone_dimension_by_trees(o, 3));
      CHECK(littlestone_dimension(o) <= vc_dimension(o) + m);
      CHECK(vc_dimension(o) <= littlestone_dimension(o));
    }
  }
}

TEST_CASE("lifted VC dimension can exceed the Littlestone dimension") {
  const Theory o = Theory::from_strings({"100", "110"});
  const Tree tree(Domain(3), 2, {1, 0, 2});
  CHECK(tree.all_paths_distinct());
  CHECK(q_image_count(LiftedTheory(o, 2), tree) == 4);
  // depth-3 trees that repeat points on some paths push it to 3
  CHECK(vc_lifted(o, 3) == 3);
  CHECK(littlestone_dimension(o) == 1);
}

TEST_CASE("minimax game values") {
  CHECK(minimax_value_seq(GameSpec(single(2), 1)).value == Rational(0));
  CHECK(minimax_value_seq(GameSpec(single(2), 3)).value == Rational(0));
  CHECK(minimax_value_seq(GameSpec(consts(1), 1)).value == Rational(1, 2));
  CHECK(minimax_value_seq(GameSpec(Theory::full(1), 1)).value == Rational(1, 2));
  CHECK(minimax_value_seq(GameSpec(consts(1), 2)).value == Rational(1, 4));
  CHECK(minimax_value_seq(GameSpec(Theory::full(2), 2)).value == Rational(1, 2));
  const auto root = minimax_value_seq(GameSpec(consts(1), 1)).root_strategy;
  CHECK(root == std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK_THROWS_AS(GameSpec(consts(2), 5), capacity_error);
  CHECK_THROWS_AS(GameSpec(consts(5), 1), capacity_error);
  CHECK_THROWS_AS(GameSpec(consts(2), 0), input_error);

  for (std::size_t m = 1; m <= 2; ++m) {
    for (const auto& o : enumerate_theories(m, 2)) {
      for (std::size_t n = 1; n <= 3; ++n) {
        std::vector<std::size_t> events;
        CHECK(minimax_value_seq(GameSpec(o, n)).value == oracle_game(o, n, events) / Rational(n));
      }
    }
  }
}

TEST_CASE("adding a predictor never raises the hindsight comparator") {
  for (const auto& o : enumerate_theories(2, 3)) {
    for (Labels extra = 0; extra < 4; ++extra) {
      const auto& p = o.predictors();
      if (std::find(p.begin(), p.end(), extra) != p.end()) continue;
      const Theory bigger = o.with(extra);
      for (std::size_t code = 0; code < 64; ++code) {
        const std::vector<std::size_t> events = {code % 4, (code / 4) % 4, code / 16};
        CHECK(hindsight_comparator(bigger, events) <= hindsight_comparator(o, events));
      }
    }
  }
}

TEST_CASE("sequential falsifiability chain") {
  for (std::size_t m = 1; m <= 2; ++m) {
    for (const auto& o : enumerate_theories(m, std::size_t{1} << m)) {
      for (std::size_t n = 1; n <= m; ++n) {
        const auto r = verify_chain_seq(o, n, enumerate_trees(o.domain(), n));
        CHECK(r.value_holds);
        CHECK(r.chain_holds);
      }
    }
  }
  const auto r = verify_chain_seq(consts(1), 1, enumerate_trees(Domain(1), 1));
  CHECK(r.value == Rational(1, 2));
  CHECK(r.soft == Rational(0));
  CHECK(r.value_holds);
}
