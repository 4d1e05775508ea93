#include "falsify/seq.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "falsify/errors.hpp"
#include "falsify/numerics.hpp"

namespace falsify {

namespace {

std::uint64_t path_count(std::size_t n) { return std::uint64_t{1} << n; }

// Labels of predictor f along a point sequence: bit t = f(points[t]).
Labels along(Labels f, const std::vector<std::size_t>& points) {
  Labels out = 0;
  for (std::size_t t = 0; t < points.size(); ++t) out |= ((f >> points[t]) & 1U) << t;
  return out;
}

// Heap index of the node visited at step t (0-based) along path bits.
std::size_t heap_index(std::uint64_t bits, std::size_t t) {
  std::size_t i = 0;
  for (std::size_t s = 0; s < t; ++s) i = 2 * i + 1 + ((bits >> s) & 1U);
  return i;
}

std::vector<std::size_t> points_along(const Tree& tree, std::uint64_t bits) {
  std::vector<std::size_t> pts(tree.depth());
  for (std::size_t t = 0; t < tree.depth(); ++t) pts[t] = tree.nodes()[heap_index(bits, t)];
  return pts;
}

bool distinct(const std::vector<std::size_t>& pts) {
  std::set<std::size_t> s(pts.begin(), pts.end());
  return s.size() == pts.size();
}

std::vector<std::size_t> distinct_points(const std::vector<std::size_t>& pts) {
  std::set<std::size_t> s(pts.begin(), pts.end());
  return {s.begin(), s.end()};
}

// Label sequence along pts of the hypothesis that assigns `assignment` bit i to dpts[i].
Labels labels_from_assignment(const std::vector<std::size_t>& pts, const std::vector<std::size_t>& dpts,
                              std::uint64_t assignment) {
  Labels sigma = 0;
  for (std::size_t i = 0; i < dpts.size(); ++i) sigma |= ((assignment >> i) & 1U) << dpts[i];
  return along(sigma, pts);
}

void check_domain(const Theory& theory, const Tree& tree) {
  if (!(theory.domain() == tree.domain())) {
    throw input_error("theory and tree live on different domains");
  }
}

}  // namespace

// ---- types ----------------------------------------------------------------------------

Path::Path(std::size_t length, std::uint64_t bits) : length_(length), bits_(bits) {
  if (length > 63) throw capacity_error("path longer than 63");
  if ((bits >> length) != 0) throw input_error("path bits exceed its length");
}

Path Path::from_signs(const std::vector<int>& signs) {
  std::uint64_t bits = 0;
  for (std::size_t t = 0; t < signs.size(); ++t) {
    if (signs[t] == 1) {
      bits |= std::uint64_t{1} << t;
    } else if (signs[t] != -1) {
      throw input_error("path signs must be -1 or +1");
    }
  }
  return {signs.size(), bits};
}

Tree::Tree(Domain domain, std::size_t depth, std::vector<std::size_t> nodes)
    : domain_(domain), depth_(depth), nodes_(std::move(nodes)) {
  if (depth == 0) throw input_error("tree depth must be at least 1");
  if (depth > kMaxTreeDepth) {
    throw capacity_error("tree depth " + std::to_string(depth) + " exceeds limit " +
                         std::to_string(kMaxTreeDepth));
  }
  if (nodes_.size() != (std::size_t{1} << depth) - 1) {
    throw input_error("depth-" + std::to_string(depth) + " tree needs " +
                      std::to_string((std::size_t{1} << depth) - 1) + " nodes");
  }
  for (std::size_t x : nodes_) {
    if (x >= domain_.size()) throw input_error("tree node outside the domain");
  }
  bool ok = false;
  for (std::uint64_t w = 0; w < path_count(depth) && !ok; ++w) ok = distinct(points_along(*this, w));
  if (!ok) throw input_error("tree has no path with distinct points");
}

std::size_t Tree::node(const Path& path, std::size_t t) const {
  return nodes_[heap_index(path.bits(), t)];
}

bool Tree::all_paths_distinct() const {
  for (std::uint64_t w = 0; w < path_count(depth_); ++w) {
    if (!distinct(points_along(*this, w))) return false;
  }
  return true;
}

LiftedTheory::LiftedTheory(Theory b, std::size_t d) : base(std::move(b)), depth(d) {
  if (depth == 0) throw input_error("lifted theory depth must be at least 1");
}

GameSpec::GameSpec(Theory t, std::size_t n) : theory(std::move(t)), rounds(n) {
  if (rounds == 0) throw input_error("game needs at least one round");
  if (rounds > kMaxGameRounds) {
    throw capacity_error("game rounds " + std::to_string(rounds) + " exceed limit " +
                         std::to_string(kMaxGameRounds));
  }
  if (2 * theory.domain().size() > kMaxGameEvents) {
    throw capacity_error("game event set of size " + std::to_string(2 * theory.domain().size()) +
                         " exceeds limit " + std::to_string(kMaxGameEvents));
  }
}

// ---- risks ----------------------------------------------------------------------------

std::vector<std::size_t> path_apply(const Tree& tree, const Path& path) {
  if (path.size() != tree.depth()) {
    throw input_error("path length " + std::to_string(path.size()) + " does not match tree depth " +
                      std::to_string(tree.depth()));
  }
  return points_along(tree, path.bits());
}

Rational soft_risk_seq(const Theory& theory, const Path& path, const Tree& tree, Labels sigma) {
  check_domain(theory, tree);
  const auto pts = path_apply(tree, path);
  const Labels target = along(sigma, pts);
  int best = static_cast<int>(pts.size());
  for (Labels f : theory.predictors()) best = std::min(best, std::popcount(along(f, pts) ^ target));
  return {best, pts.size()};
}

Rational hard_risk_seq(const LiftedTheory& lifted, const Tree& tree, Labels sigma, const Path& rho) {
  check_domain(lifted.base, tree);
  if (lifted.depth != tree.depth()) throw input_error("lifted theory depth does not match tree");
  const Labels target = along(sigma, path_apply(tree, rho));
  const std::size_t n = tree.depth();
  int best = static_cast<int>(n);
  for (std::uint64_t w = 0; w < path_count(n); ++w) {
    const auto pts = points_along(tree, w);
    for (Labels f : lifted.base.predictors()) best = std::min(best, std::popcount(along(f, pts) ^ target));
  }
  return {best, n};
}

// ---- falsifiability -------------------------------------------------------------------

Rational soft_falsifiability_seq(const Theory& theory, const Tree& tree) {
  check_domain(theory, tree);
  const std::size_t n = tree.depth();
  Rational total;
  for (std::uint64_t w = 0; w < path_count(n); ++w) {
    const auto pts = points_along(tree, w);
    const auto dpts = distinct_points(pts);
    std::set<Labels> restr;
    for (Labels f : theory.predictors()) restr.insert(along(f, pts));
    long long mistakes = 0;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << dpts.size()); ++a) {
      const Labels s = labels_from_assignment(pts, dpts, a);
      int best = static_cast<int>(n);
      for (Labels r : restr) best = std::min(best, std::popcount(r ^ s));
      mistakes += best;
    }
    // E over effective hypotheses on this path of the risk
    total += Rational(mistakes, static_cast<long long>(n) << dpts.size());
  }
  return 2 * total / Rational(path_count(n));
}

std::size_t q_image_count(const LiftedTheory& lifted, const Tree& tree) {
  check_domain(lifted.base, tree);
  if (lifted.depth != tree.depth()) throw input_error("lifted theory depth does not match tree");
  std::set<Labels> image;
  for (std::uint64_t w = 0; w < path_count(tree.depth()); ++w) {
    const auto pts = points_along(tree, w);
    for (Labels f : lifted.base.predictors()) image.insert(along(f, pts));
  }
  return image.size();
}

SeqHardFalsifiability hard_falsifiability_seq(const Theory& theory, const Tree& tree) {
  check_domain(theory, tree);
  const std::size_t n = tree.depth();
  std::set<Labels> effective;
  for (std::uint64_t rho = 0; rho < path_count(n); ++rho) {
    const auto pts = points_along(tree, rho);
    const auto dpts = distinct_points(pts);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << dpts.size()); ++a) {
      effective.insert(labels_from_assignment(pts, dpts, a));
    }
  }
  SeqHardFalsifiability g;
  g.effective_count = effective.size();
  g.explained_count = q_image_count(LiftedTheory(theory, n), tree);
  g.degenerate = g.effective_count < path_count(n);
  const double gain = log2(Rational(g.effective_count)) - log2(Rational(g.explained_count));
  g.value = gain / static_cast<double>(n);
  return g;
}

namespace {

void check_family(const std::vector<Tree>& family) {
  if (family.empty()) throw input_error("tree family is empty");
  for (const auto& t : family) {
    if (t.depth() != family.front().depth()) throw input_error("tree family mixes depths");
  }
}

}  // namespace

TreeAttained<Rational> soft_falsifiability_seq_inf(const Theory& theory, const std::vector<Tree>& family) {
  check_family(family);
  TreeAttained<Rational> best{soft_falsifiability_seq(theory, family[0]), 0};
  for (std::size_t i = 1; i < family.size(); ++i) {
    Rational f = soft_falsifiability_seq(theory, family[i]);
    if (f < best.value) best = {std::move(f), i};
  }
  return best;
}

TreeAttained<double> hard_falsifiability_seq_inf(const Theory& theory, const std::vector<Tree>& family) {
  check_family(family);
  TreeAttained<double> best{hard_falsifiability_seq(theory, family[0]).value, 0};
  for (std::size_t i = 1; i < family.size(); ++i) {
    const double g = hard_falsifiability_seq(theory, family[i]).value;
    if (g < best.value) best = {g, i};
  }
  return best;
}

// ---- Rademacher -----------------------------------------------------------------------

Rational seq_rademacher(const Theory& theory, const Tree& tree) {
  check_domain(theory, tree);
  const std::size_t n = tree.depth();
  long long total = 0;
  for (std::uint64_t z = 0; z < path_count(n); ++z) {
    const auto pts = points_along(tree, z);
    int best = -static_cast<int>(n);
    for (Labels f : theory.predictors()) {
      best = std::max(best, static_cast<int>(n) - 2 * std::popcount(z ^ along(f, pts)));
    }
    total += best;
  }
  return Rational(total, static_cast<long long>(n) << n);
}

Rational seq_rademacher_loss(const Theory& theory, const Tree& tree, const std::vector<int>& label_tree) {
  check_domain(theory, tree);
  if (label_tree.size() != tree.nodes().size()) throw input_error("label tree shape does not match");
  const std::size_t n = tree.depth();
  const Labels all = (Labels{1} << n) - 1;
  long long total = 0;
  for (std::uint64_t z = 0; z < path_count(n); ++z) {
    const auto pts = points_along(tree, z);
    Labels y = 0;
    for (std::size_t t = 0; t < n; ++t) y |= static_cast<Labels>(label_tree[heap_index(z, t)] & 1) << t;
    int best = -static_cast<int>(n);
    for (Labels f : theory.predictors()) {
      const Labels loss = along(f, pts) ^ y;
      best = std::max(best, std::popcount(loss & z) - std::popcount(loss & ~z & all));
    }
    total += best;
  }
  return Rational(total, static_cast<long long>(n) << n);
}

Rational seq_rademacher_loss(const Theory& theory, const Tree& tree) {
  return seq_rademacher_loss(theory, tree, std::vector<int>(tree.nodes().size(), 0));
}

Rational path_averaged_rademacher_loss(const Theory& theory, const Tree& tree) {
  check_domain(theory, tree);
  const std::size_t n = tree.depth();
  const Labels all = (Labels{1} << n) - 1;
  long long total = 0;
  for (std::uint64_t w = 0; w < path_count(n); ++w) {
    const auto pts = points_along(tree, w);
    for (Labels eta = 0; eta <= all; ++eta) {
      int best = -static_cast<int>(n);
      for (Labels f : theory.predictors()) {
        const Labels r = along(f, pts);
        best = std::max(best, std::popcount(r & eta) - std::popcount(r & ~eta & all));
      }
      total += best;
    }
  }
  return Rational(total, static_cast<long long>(n) << (2 * n));
}

// ---- zero cover -----------------------------------------------------------------------

namespace {

class SetCover {
 public:
  SetCover(std::vector<std::uint64_t> sets, std::uint64_t universe, std::size_t incumbent)
      : sets_(std::move(sets)), universe_(universe), best_(incumbent) {}

  std::size_t solve() {
    search(0, 0);
    return best_;
  }

 private:
  void search(std::uint64_t covered, std::size_t used) {
    if (covered == universe_) {
      best_ = std::min(best_, used);
      return;
    }
    const std::uint64_t open = universe_ & ~covered;
    int widest = 0;
    for (auto s : sets_) widest = std::max(widest, std::popcount(s & open));
    if (widest == 0) return;
    const std::size_t remaining = static_cast<std::size_t>(std::popcount(open));
    const std::size_t bound = (remaining + static_cast<std::size_t>(widest) - 1) / static_cast<std::size_t>(widest);
    if (used + bound >= best_) return;

    // branch on the open element with the fewest covering sets
    std::size_t pick = 64;
    std::size_t fewest = sets_.size() + 1;
    for (std::size_t e = 0; e < 64; ++e) {
      if (((open >> e) & 1U) == 0) continue;
      std::size_t c = 0;
      for (auto s : sets_) c += (s >> e) & 1U;
      if (c < fewest) {
        fewest = c;
        pick = e;
      }
    }
    std::vector<std::uint64_t> options;
    for (auto s : sets_) {
      if (((s >> pick) & 1U) != 0) options.push_back(s);
    }
    std::sort(options.begin(), options.end(), [open](std::uint64_t a, std::uint64_t b) {
      return std::popcount(a & open) > std::popcount(b & open);
    });
    for (auto s : options) search(covered | s, used + 1);
  }

  std::vector<std::uint64_t> sets_;
  std::uint64_t universe_;
  std::size_t best_;
};

}  // namespace

std::size_t zero_cover_number(const Theory& theory, const Tree& tree) {
  check_domain(theory, tree);
  const std::size_t n = tree.depth();
  if (n > kMaxCoverDepth || theory.size() > kMaxCoverTheory) {
    throw capacity_error("zero cover needs depth <= " + std::to_string(kMaxCoverDepth) + " and |O| <= " +
                         std::to_string(kMaxCoverTheory));
  }
  const std::size_t paths = path_count(n);
  const std::size_t node_count = tree.nodes().size();
  // element (f, omega) has index f * 2^n + omega
  std::vector<std::vector<std::size_t>> path_nodes(paths);
  std::vector<Labels> f_labels(theory.size() * paths);
  for (std::size_t w = 0; w < paths; ++w) {
    for (std::size_t t = 0; t < n; ++t) path_nodes[w].push_back(heap_index(w, t));
    const auto pts = points_along(tree, w);
    for (std::size_t f = 0; f < theory.size(); ++f) f_labels[f * paths + w] = along(theory.predictor(f), pts);
  }
  std::set<std::uint64_t> candidates;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << node_count); ++v) {
    std::uint64_t covers = 0;
    for (std::size_t w = 0; w < paths; ++w) {
      Labels vl = 0;
      for (std::size_t t = 0; t < n; ++t) vl |= ((v >> path_nodes[w][t]) & 1U) << t;
      for (std::size_t f = 0; f < theory.size(); ++f) {
        if (f_labels[f * paths + w] == vl) covers |= std::uint64_t{1} << (f * paths + w);
      }
    }
    if (covers != 0) candidates.insert(covers);
  }
  // drop candidates strictly contained in another
  std::vector<std::uint64_t> maximal;
  for (auto a : candidates) {
    bool dominated = false;
    for (auto b : candidates) {
      if (a != b && (a & b) == a) {
        dominated = true;
        break;
      }
    }
    if (!dominated) maximal.push_back(a);
  }
  const std::size_t elements = theory.size() * paths;
  const std::uint64_t universe = elements == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << elements) - 1;
  const std::size_t incumbent = q_image_count(LiftedTheory(theory, n), tree);
  return SetCover(std::move(maximal), universe, incumbent).solve();
}

// ---- dimensions -----------------------------------------------------------------------

bool seq_shatters(const Theory& theory, const Tree& tree) {
  check_domain(theory, tree);
  for (std::uint64_t w = 0; w < path_count(tree.depth()); ++w) {
    const auto pts = points_along(tree, w);
    bool found = false;
    for (Labels f : theory.predictors()) {
      if (along(f, pts) == w) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace {

int ldim_rec(const std::vector<Labels>& s, std::size_t m, std::map<std::vector<Labels>, int>& memo) {
  if (s.empty()) return -1;
  if (s.size() == 1) return 0;
  if (auto it = memo.find(s); it != memo.end()) return it->second;
  int best = 0;
  for (std::size_t x = 0; x < m; ++x) {
    std::vector<Labels> zero;
    std::vector<Labels> one;
    for (Labels f : s) (((f >> x) & 1U) != 0 ? one : zero).push_back(f);
    if (zero.empty() || one.empty()) continue;
    best = std::max(best, 1 + std::min(ldim_rec(zero, m, memo), ldim_rec(one, m, memo)));
  }
  memo.emplace(s, best);
  return best;
}

}  // namespace

std::size_t littlestone_dimension(const Theory& theory) {
  std::map<std::vector<Labels>, int> memo;
  auto s = theory.predictors();
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(ldim_rec(s, theory.domain().size(), memo));
}

std::vector<Tree> enumerate_trees(const Domain& domain, std::size_t depth) {
  if (depth == 0) throw input_error("tree depth must be at least 1");
  const std::size_t nodes = (std::size_t{1} << depth) - 1;
  if (std::pow(static_cast<double>(domain.size()), static_cast<double>(nodes)) > static_cast<double>(1 << 20)) {
    throw capacity_error("too many trees to enumerate at depth " + std::to_string(depth));
  }
  std::vector<Tree> out;
  if (depth > domain.size()) return out;
  std::vector<std::size_t> v(nodes, 0);
  for (;;) {
    bool ok = false;
    for (std::uint64_t w = 0; w < path_count(depth) && !ok; ++w) {
      std::set<std::size_t> seen;
      for (std::size_t t = 0; t < depth; ++t) seen.insert(v[heap_index(w, t)]);
      ok = seen.size() == depth;
    }
    if (ok) out.emplace_back(domain, depth, v);
    std::size_t i = nodes;
    while (i-- > 0) {
      if (++v[i] < domain.size()) break;
      v[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

std::size_t littlestone_dimension_by_trees(const Theory& theory, std::size_t max_depth) {
  std::size_t ld = 0;
  for (std::size_t d = 1; d <= max_depth; ++d) {
    bool any = false;
    for (const auto& tree : enumerate_trees(theory.domain(), d)) {
      if (seq_shatters(theory, tree)) {
        any = true;
        break;
      }
    }
    if (!any) break;
    ld = d;
  }
  return ld;
}

std::size_t vc_lifted(const Theory& theory, std::size_t depth_bound) {
  if (depth_bound > kMaxCoverDepth) {
    throw capacity_error("lifted VC dimension supports depth bounds up to " + std::to_string(kMaxCoverDepth));
  }
  std::size_t vc = 0;
  for (std::size_t d = 1; d <= depth_bound; ++d) {
    const LiftedTheory lifted(theory, d);
    bool any = false;
    for (const auto& tree : enumerate_trees(theory.domain(), d)) {
      if (q_image_count(lifted, tree) == path_count(d)) {
        any = true;
        break;
      }
    }
    if (!any) break;
    vc = d;
  }
  return vc;
}

// ---- minimax game ---------------------------------------------------------------------

std::size_t hindsight_comparator(const Theory& theory, const std::vector<std::size_t>& events) {
  std::size_t best = events.size();
  for (std::size_t f = 0; f < theory.size(); ++f) {
    std::size_t loss = 0;
    for (std::size_t e : events) loss += theory.label(f, e / 2) != static_cast<int>(e % 2) ? 1 : 0;
    best = std::min(best, loss);
  }
  return best;
}

namespace {

class GameSolver {
 public:
  explicit GameSolver(const GameSpec& spec) : spec_(spec), events_(2 * spec.theory.domain().size()) {
    loss_.resize(spec.theory.size(), std::vector<int>(events_));
    for (std::size_t f = 0; f < spec.theory.size(); ++f) {
      for (std::size_t z = 0; z < events_; ++z) {
        loss_[f][z] = spec.theory.label(f, z / 2) != static_cast<int>(z % 2) ? 1 : 0;
      }
    }
  }

  // Value (unnormalized) of the remaining game after `done` rounds with cumulative
  // per-predictor losses `cum`. Shift invariance: val(L + c) = val(L) - c.
  Rational value(std::size_t done, std::vector<int> cum, std::vector<Rational>* strategy) {
    const int shift = *std::min_element(cum.begin(), cum.end());
    for (int& c : cum) c -= shift;
    if (done == spec_.rounds) return Rational(-shift);
    auto key = std::make_pair(done, cum);
    if (strategy == nullptr) {
      if (auto it = memo_.find(key); it != memo_.end()) return it->second - shift;
    }
    std::vector<std::vector<Rational>> payoff(spec_.theory.size(), std::vector<Rational>(events_));
    for (std::size_t z = 0; z < events_; ++z) {
      std::vector<int> next = cum;
      for (std::size_t f = 0; f < next.size(); ++f) next[f] += loss_[f][z];
      const Rational cont = value(done + 1, next, nullptr);
      for (std::size_t f = 0; f < next.size(); ++f) payoff[f][z] = loss_[f][z] + cont;
    }
    GameSolution sol = solve_matrix_game(MatrixGame(std::move(payoff)));
    ++solved_;
    if (strategy != nullptr) *strategy = sol.row_strategy;
    memo_.emplace(std::move(key), sol.value);
    return sol.value - shift;
  }

  [[nodiscard]] std::size_t solved() const { return solved_; }

 private:
  const GameSpec& spec_;
  std::size_t events_;
  std::vector<std::vector<int>> loss_;
  std::map<std::pair<std::size_t, std::vector<int>>, Rational> memo_;
  std::size_t solved_ = 0;
};

}  // namespace

SeqGameResult minimax_value_seq(const GameSpec& spec) {
  GameSolver solver(spec);
  SeqGameResult result;
  const Rational total = solver.value(0, std::vector<int>(spec.theory.size(), 0), &result.root_strategy);
  result.value = total / Rational(spec.rounds);
  result.states_solved = solver.solved();
  return result;
}

// ---- sequential falsifiability chain ---------------------------------------------------------

SeqChainReport verify_chain_seq(const Theory& theory, std::size_t n, const std::vector<Tree>& tree_family) {
  check_family(tree_family);
  if (tree_family.front().depth() != n) throw input_error("tree family depth does not match n");
  SeqChainReport r;
  r.n = n;
  r.value = minimax_value_seq(GameSpec(theory, n)).value;
  const auto soft = soft_falsifiability_seq_inf(theory, tree_family);
  const auto hard = hard_falsifiability_seq_inf(theory, tree_family);
  r.soft = soft.value;
  r.soft_tree = soft.tree_index;
  r.hard = hard.value;
  r.hard_tree = hard.tree_index;
  r.one_minus_soft = 1 - r.soft;
  r.chain_rhs = kChainConstant * std::sqrt(std::max(0.0, 1.0 - r.hard));
  r.value_holds = r.value <= r.one_minus_soft;
  r.chain_holds = r.one_minus_soft.to_double() <= r.chain_rhs + kLogSlack;
  for (const auto& tree : tree_family) {
    Rational twice = 2 * seq_rademacher_loss(theory, tree);
    if (r.max_twice_seq_rademacher < twice) r.max_twice_seq_rademacher = std::move(twice);
  }
  const auto q = q_image_count(LiftedTheory(theory, n), tree_family[r.hard_tree]);
  r.vc_rate_rhs = std::sqrt(2.0 * std::log2(static_cast<double>(q)) / static_cast<double>(n));
  return r;
}

}  // namespace falsify
