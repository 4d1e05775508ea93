#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "falsify/rational.hpp"
#include "falsify/slt.hpp"

namespace falsify {

/// Hard ceilings for exact sequential computations.
inline constexpr std::size_t kMaxTreeDepth = 6;
inline constexpr std::size_t kMaxCoverDepth = 3;
inline constexpr std::size_t kMaxCoverTheory = 8;
inline constexpr std::size_t kMaxGameRounds = 4;
inline constexpr std::size_t kMaxGameEvents = 8;

/// A sequence of signs omega_1..omega_n in {-1, +1}.
///
/// Stored as a bit mask: bit t is set when omega_{t+1} = +1.
class Path {
 public:
  Path(std::size_t length, std::uint64_t bits);
  static Path from_signs(const std::vector<int>& signs);

  [[nodiscard]] std::size_t size() const { return length_; }
  [[nodiscard]] int sign(std::size_t t) const { return ((bits_ >> t) & 1U) != 0 ? 1 : -1; }
  [[nodiscard]] std::uint64_t bits() const { return bits_; }

 private:
  std::size_t length_;
  std::uint64_t bits_;
};

/// Complete binary X-valued tree of depth n, heap ordered: the root is node 0 and the
/// children of node i are 2i+1 (sign -1, left) and 2i+2 (sign +1, right).
///
/// Invariant: at least one root-to-leaf path visits n distinct inputs.
class Tree {
 public:
  Tree(Domain domain, std::size_t depth, std::vector<std::size_t> nodes);

  [[nodiscard]] const Domain& domain() const { return domain_; }
  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] const std::vector<std::size_t>& nodes() const { return nodes_; }
  /// x_t(omega_{1:t-1}) for t = prefix length + 1.
  [[nodiscard]] std::size_t node(const Path& path, std::size_t t) const;
  /// True when every path visits n distinct inputs.
  [[nodiscard]] bool all_paths_distinct() const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  Domain domain_;
  std::size_t depth_;
  std::vector<std::size_t> nodes_;
};

/// O x Omega^n: predictor-path pairs acting on depth-n trees.
struct LiftedTheory {
  LiftedTheory(Theory base, std::size_t depth);

  Theory base;
  std::size_t depth;
};

/// The n-round Forecaster-vs-Nature game with events Z = X x {0, 1}.
struct GameSpec {
  GameSpec(Theory theory, std::size_t rounds);

  Theory theory;
  std::size_t rounds;
};

/// (x_1, x_2(omega_1), ..., x_n(omega_{1:n-1})).
std::vector<std::size_t> path_apply(const Tree& tree, const Path& path);

/// Soft risk: min_f (1/n) sum_t [f(x_t(omega)) != sigma(x_t(omega))] for a hypothesis sigma on X.
Rational soft_risk_seq(const Theory& theory, const Path& path, const Tree& tree, Labels sigma);

/// Hard risk: min over (f, omega) of (1/n) sum_t [f(x_t(omega)) != sigma(x_t(rho))].
Rational hard_risk_seq(const LiftedTheory& lifted, const Tree& tree, Labels sigma, const Path& rho);

/// 2 E_omega E_{eps ~ Q_omega}[eps], exact.
Rational soft_falsifiability_seq(const Theory& theory, const Tree& tree);

struct SeqHardFalsifiability {
  double value = 0.0;                  // (log2 |H_ef| - log2 |zero-risk classes|) / n
  std::uint64_t effective_count = 0;   // realized label sequences over all (sigma, rho)
  std::uint64_t explained_count = 0;   // zero-risk classes = q-image size
  bool degenerate = false;             // effective_count < 2^n
};

SeqHardFalsifiability hard_falsifiability_seq(const Theory& theory, const Tree& tree);

/// Minimum over a tree family with the index of the minimizing tree.
template <typename T>
struct TreeAttained {
  T value;
  std::size_t tree_index;
};

TreeAttained<Rational> soft_falsifiability_seq_inf(const Theory& theory, const std::vector<Tree>& family);
TreeAttained<double> hard_falsifiability_seq_inf(const Theory& theory, const std::vector<Tree>& family);

/// Sequential Rademacher complexity with the tree followed along the sign vector itself.
/// Class form embeds predictors as +/-1.
Rational seq_rademacher(const Theory& theory, const Tree& tree);
/// Loss form: E_zeta sup_f (1/n) sum_t zeta_t [f(x_t(zeta)) != y_t(zeta)] for a Y-valued
/// label tree in the same heap layout (all zeros when omitted).
Rational seq_rademacher_loss(const Theory& theory, const Tree& tree);
Rational seq_rademacher_loss(const Theory& theory, const Tree& tree, const std::vector<int>& label_tree);
/// E_omega Radem_loss(O | x(omega)): statistical Rademacher complexity averaged over paths,
/// with signs drawn independently of the path.
Rational path_averaged_rademacher_loss(const Theory& theory, const Tree& tree);

/// |q(O x Omega^n)|: distinct label sequences (f(x_1), f(x_2(omega_1)), ...).
std::size_t q_image_count(const LiftedTheory& lifted, const Tree& tree);

/// Exact minimum size of a zero-cover by Y-valued trees (branch and bound set cover).
std::size_t zero_cover_number(const Theory& theory, const Tree& tree);

bool seq_shatters(const Theory& theory, const Tree& tree);
/// Mistake-tree recursion over input and label splits.
std::size_t littlestone_dimension(const Theory& theory);
/// Largest d <= max_depth such that some valid depth-d tree is SEQ-shattered.
std::size_t littlestone_dimension_by_trees(const Theory& theory, std::size_t max_depth);

/// VC dimension of the lifted theory acting on trees: largest d <= depth_bound such that
/// some depth-d tree has q-image of size 2^d.
std::size_t vc_lifted(const Theory& theory, std::size_t depth_bound);

/// All valid trees of the given depth over the domain, in lexicographic node order.
std::vector<Tree> enumerate_trees(const Domain& domain, std::size_t depth);

struct SeqGameResult {
  Rational value;                     // normalized by 1/n
  std::vector<Rational> root_strategy;  // Forecaster's optimal first-round mixture
  std::size_t states_solved = 0;
};

/// Exact n-round minimax regret by backward induction with exact matrix games.
SeqGameResult minimax_value_seq(const GameSpec& spec);

/// inf_f sum_t loss(f, z_t) for an event sequence (z = 2x + y).
std::size_t hindsight_comparator(const Theory& theory, const std::vector<std::size_t>& events);

struct SeqChainReport {
  std::size_t n = 0;
  Rational value;            // exact V
  Rational soft;             // inf over family of F
  std::size_t soft_tree = 0;
  double hard = 0.0;         // inf over family of G
  std::size_t hard_tree = 0;
  Rational one_minus_soft;
  double chain_rhs = 0.0;    // sqrt(8) sqrt(1 - G)
  bool value_holds = false;  // V <= 1 - F
  bool chain_holds = false;  // 1 - F <= sqrt(8) sqrt(1 - G) + slack
  Rational max_twice_seq_rademacher;  // 2 sup over family of Radem^SEQ(loss), reported
  double vc_rate_rhs = 0.0;        // sqrt(2 log2 q / n) at the hard-falsifiability witness
};

SeqChainReport verify_chain_seq(const Theory& theory, std::size_t n, const std::vector<Tree>& tree_family);

}  // namespace falsify
