#include "falsify/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "falsify/errors.hpp"
#include "falsify/numerics.hpp"
#include "falsify/seq.hpp"
#include "falsify/uni.hpp"

namespace falsify {

using nlohmann::json;

namespace {

const std::set<std::string> kScenarios = {"slt", "seq", "uni", "sweep"};
const std::set<std::string> kTheoryNames = {"full", "constants", "singleton", "indicators", "all"};

// "p/q", an integer or a plain decimal such as 0.05, read exactly.
Rational parse_delta(const std::string& text) {
  const auto dot = text.find('.');
  const bool plain = !text.empty() && text.find_first_not_of("0123456789./") == std::string::npos &&
                     (dot == std::string::npos || text.find('/') == std::string::npos);
  if (!plain) throw input_error("config field 'delta' must be \"p/q\" or a plain decimal (got '" + text + "')");
  try {
    if (dot == std::string::npos) return Rational::parse(text);
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    if (digits.empty() || text.find('.', dot + 1) != std::string::npos) throw input_error("");
    return Rational(mpz_class(digits), mpz_class("1" + std::string(text.size() - dot - 1, '0')));
  } catch (const std::exception&) {
    throw input_error("config field 'delta' must be \"p/q\" or a plain decimal (got '" + text + "')");
  }
}

std::size_t get_size(const json& j, const char* field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw input_error(std::string("config field '") + field + "' must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::string theory_label(const Theory& theory) {
  std::string out;
  for (const auto& s : theory.to_strings()) out += (out.empty() ? "" : "|") + s;
  return "O=" + out;
}

// Runs fn(i) for i in [0, count) on a small thread pool; results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, std::size_t threads, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

json measure_json(const Measure& m) {
  json j;
  if (m.exact) j["exact"] = m.exact->str();
  j["decimal"] = m.decimal;
  return j;
}

Measure subtract(const std::string& name, const Measure& a, const Measure& b) {
  if (a.exact && b.exact) return Measure::of(name, *a.exact - *b.exact);
  return Measure::of(name, a.decimal - b.decimal);
}

std::vector<std::string> corpus_strings(const ExperimentConfig& c) {
  if (!c.corpus.empty()) return c.corpus;
  std::vector<std::string> out;
  for (std::size_t len = 0; len <= c.max_length; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      std::string s;
      for (std::size_t i = 0; i < len; ++i) s += ((v >> (len - 1 - i)) & 1U) != 0 ? '1' : '0';
      out.push_back(s);
    }
  }
  return out;
}

std::vector<Theory> scenario_theories(const ExperimentConfig& c) {
  if (c.theory_name == "all") {
    const std::size_t cap = c.max_theory_size == 0 ? (std::size_t{1} << c.domain_size) : c.max_theory_size;
    return enumerate_theories(c.domain_size, cap);
  }
  return {build_theory(c)};
}

std::size_t instance_count(const ExperimentConfig& c) {
  if (c.scenario == "uni") return corpus_strings(c).size();
  if (c.theory_name == "all") return scenario_theories(c).size();
  return 1;
}

double violation_threshold(double delta, std::size_t trials) {
  return delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
}

// ---- scenarios ------------------------------------------------------------------------

ReportRow sweep_row(const Theory& theory, std::size_t n) {
  ReportRow row;
  row.instance = theory_label(theory);
  Rational soft_gap;      // max |F - (1 - Radem)|
  Rational loss_gap;      // max |F - (1 - 2 Radem_loss)|
  double hard_gap = 0.0;  // max |G - (1 - log2 Cover / n)|
  Rational f_min = 1;
  Rational f_max = 0;
  double g_min = 1.0;
  double g_max = 0.0;
  for (const auto& inputs : enumerate_input_subsets(theory.domain(), n)) {
    const Rational f = soft_falsifiability(theory, inputs);
    const double g = hard_falsifiability(theory, inputs);
    soft_gap = max(soft_gap, abs(f - (1 - rademacher(theory, inputs))));
    loss_gap = max(loss_gap, abs(f - (1 - 2 * rademacher_loss(theory, inputs))));
    const double via_cover =
        1.0 - std::log2(static_cast<double>(covering_number(theory, inputs))) / static_cast<double>(n);
    hard_gap = std::max(hard_gap, std::abs(g - via_cover));
    f_min = min(f_min, f);
    f_max = max(f_max, f);
    g_min = std::min(g_min, g);
    g_max = std::max(g_max, g);
  }
  const SltChainReport chain = verify_chain_slt(theory, n, default_distribution_family(theory.domain().size()));
  row.measures = {Measure::of("F_n", chain.soft),
                  Measure::of("G_n", chain.hard),
                  Measure::of("Radem", rademacher(theory, chain.soft_witness)),
                  Measure::of("Cover", Rational(covering_number(theory, chain.hard_witness))),
                  Measure::of("VC", Rational(vc_dimension(theory))),
                  Measure::of("one_minus_F", chain.one_minus_soft),
                  Measure::of("chain_rhs", chain.chain_rhs),
                  Measure::of("erm_gap", chain.erm_gap_proxy)};
  const Measure zero = Measure::of("zero", Rational(0));
  row.assertions.push_back(assert_eq("prop identities", "F = 1 - Radem", Measure::of("max_abs_diff", soft_gap), zero));
  row.assertions.push_back(
      assert_eq("prop identities", "F = 1 - 2 Radem_loss", Measure::of("max_abs_diff", loss_gap), zero));
  row.assertions.push_back(assert_le("prop identities", "G = 1 - log2(Cover)/n",
                                     Measure::of("max_abs_diff", hard_gap), Measure::of("tolerance", kLogSlack)));
  row.assertions.push_back(assert_le("range", "F >= 0", zero, Measure::of("min_F", f_min)));
  row.assertions.push_back(assert_le("range", "F <= 1", Measure::of("max_F", f_max), Measure::of("one", Rational(1))));
  row.assertions.push_back(assert_le("range", "G >= 0", zero, Measure::of("min_G", g_min), kLogSlack));
  row.assertions.push_back(assert_le("range", "G <= 1", Measure::of("max_G", g_max), Measure::of("one", 1.0), kLogSlack));
  row.assertions.push_back(assert_le("D", "1 - F_n <= sqrt(8) sqrt(1 - G_n)", Measure::of("one_minus_F", chain.one_minus_soft),
                                     Measure::of("chain_rhs", chain.chain_rhs), kLogSlack));
  row.assertions.push_back(assert_le("D", "expected ERM gap <= 1 - F_n", Measure::of("erm_gap", chain.erm_gap_proxy),
                                     Measure::of("one_minus_F", chain.one_minus_soft)));
  return row;
}

ReportRow slt_row(const ExperimentConfig& c, const Theory& theory) {
  const EventDistribution dist = build_distribution(c);
  const double delta = c.delta.to_double();
  const GeneralizationReport g = generalization_experiment(theory, dist, c.n, c.trials, delta, c.seed);
  ReportRow row;
  row.instance = theory_label(theory);
  const std::size_t k = std::min(c.n, theory.domain().size());
  const SltChainReport chain = verify_chain_slt(theory, k, default_distribution_family(theory.domain().size()));
  const double threshold = violation_threshold(delta, c.trials);
  row.measures = {Measure::of("risk", distributional_risk(theory, dist)),
                  Measure::of("VC", Rational(vc_dimension(theory))),
                  Measure::of("F_k", chain.soft),
                  Measure::of("G_k", chain.hard),
                  Measure::of("soft_violation_rate", Rational(g.soft_violations, c.trials)),
                  Measure::of("hard_violation_rate", Rational(g.hard_violations, c.trials)),
                  Measure::of("min_soft_margin", g.min_soft_margin),
                  Measure::of("min_hard_margin", g.min_hard_margin),
                  Measure::of("median_soft_margin", g.median_soft_margin),
                  Measure::of("median_hard_margin", g.median_hard_margin)};
  row.assertions.push_back(assert_le("D''-s", "soft bound violation rate",
                                     Measure::of("rate", g.soft_violation_rate()),
                                     Measure::of("threshold", threshold)));
  row.assertions.push_back(assert_le("D''-h", "hard bound violation rate",
                                     Measure::of("rate", g.hard_violation_rate()),
                                     Measure::of("threshold", threshold)));
  row.assertions.push_back(assert_le("D", "1 - F_k <= sqrt(8) sqrt(1 - G_k)",
                                     Measure::of("one_minus_F", chain.one_minus_soft),
                                     Measure::of("chain_rhs", chain.chain_rhs), kLogSlack));
  row.detail = {{"chain_length", k}, {"trials", c.trials}, {"delta", c.delta.str()}, {"seed", c.seed}};
  return row;
}

ReportRow seq_row(const ExperimentConfig& c, const Theory& theory) {
  const std::size_t n = c.n;
  const std::vector<Tree> family = enumerate_trees(theory.domain(), n);
  if (family.empty()) throw input_error("config field 'n' exceeds the domain size: no valid trees");
  const SeqChainReport chain = verify_chain_seq(theory, n, family);
  const Tree& soft_tree = family[chain.soft_tree];
  const Tree& hard_tree = family[chain.hard_tree];
  ReportRow row;
  row.instance = theory_label(theory);
  const Rational averaged = path_averaged_rademacher_loss(theory, soft_tree);
  const std::size_t q = q_image_count(LiftedTheory(theory, n), hard_tree);
  const std::size_t ldim = littlestone_dimension(theory);
  const std::size_t vc = vc_lifted(theory, std::min(n, kMaxCoverDepth));
  row.measures = {Measure::of("V", chain.value),
                  Measure::of("F_seq", chain.soft),
                  Measure::of("G_seq", chain.hard),
                  Measure::of("one_minus_F", chain.one_minus_soft),
                  Measure::of("chain_rhs", chain.chain_rhs),
                  Measure::of("Radem_seq_loss", seq_rademacher_loss(theory, soft_tree)),
                  Measure::of("Radem_path_averaged", averaged),
                  Measure::of("q_image", Rational(q)),
                  Measure::of("ldim", Rational(ldim)),
                  Measure::of("vc_lifted", Rational(vc))};
  row.assertions.push_back(assert_le("D-SEQ", "V <= 1 - F", Measure::of("V", chain.value),
                                     Measure::of("one_minus_F", chain.one_minus_soft)));
  row.assertions.push_back(assert_le("D-SEQ", "1 - F <= sqrt(8) sqrt(1 - G)",
                                     Measure::of("one_minus_F", chain.one_minus_soft),
                                     Measure::of("chain_rhs", chain.chain_rhs), kLogSlack));
  const Rational coupled = seq_rademacher_loss(theory, soft_tree);
  row.assertions.push_back(assert_eq("prop identities", "F = 1 - 2 Radem_seq_loss", Measure::of("F_seq", chain.soft),
                                     Measure::of("rhs", 1 - 2 * coupled)));
  if (soft_tree.all_paths_distinct()) {
    row.assertions.push_back(assert_eq("prop identities", "F = 1 - 2 path-averaged Radem_loss",
                                       Measure::of("F_seq", chain.soft), Measure::of("rhs", 1 - 2 * averaged)));
  }
  if (n <= kMaxCoverDepth && theory.size() <= kMaxCoverTheory) {
    const std::size_t cover = zero_cover_number(theory, hard_tree);
    row.measures.push_back(Measure::of("zero_cover", Rational(cover)));
    row.assertions.push_back(assert_le("lemma zero-cover", "zero cover <= q-image",
                                       Measure::of("zero_cover", Rational(cover)), Measure::of("q_image", Rational(q))));
  }
  row.assertions.push_back(assert_le("prop reduction", "vc_lifted <= ldim", Measure::of("vc_lifted", Rational(vc)),
                                     Measure::of("ldim", Rational(ldim))));
  row.detail = {{"trees", family.size()}, {"soft_tree", soft_tree.nodes()}, {"hard_tree", hard_tree.nodes()}};
  return row;
}

ReportRow uni_row(const std::string& y) {
  const UniversalChainReport e = verify_theorem_E(y);
  ReportRow row;
  row.instance = "y=" + y;
  row.measures = {Measure::of("Q", e.prior), Measure::of("loss", e.loss), Measure::of("G", e.gain),
                  Measure::of("K", Rational(e.complexity))};
  row.assertions.push_back(assert_le("E", "loss <= G", Measure::of("loss", e.loss), Measure::of("G", e.gain), kLogSlack));
  row.assertions.push_back(
      assert_le("E", "G <= K", Measure::of("G", e.gain), Measure::of("K", Rational(e.complexity)), kLogSlack));
  bool steps = true;
  for (const auto& s : e.steps) steps = steps && s.holds;
  row.detail = {{"steps_hold", steps}};
  return row;
}

}  // namespace

// ---- config ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw input_error("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") {
      if (!value.is_string()) throw input_error("config field 'scenario' must be a string");
      c.scenario = value.get<std::string>();
    } else if (key == "domain_size") {
      c.domain_size = get_size(value, "domain_size");
    } else if (key == "theory") {
      if (value.is_string()) {
        c.theory_name = value.get<std::string>();
      } else if (value.is_array()) {
        for (const auto& p : value) {
          if (!p.is_string()) throw input_error("config field 'theory' must list label strings");
          c.theory.push_back(p.get<std::string>());
        }
      } else {
        throw input_error("config field 'theory' must be a name or a list of label strings");
      }
    } else if (key == "max_theory_size") {
      c.max_theory_size = get_size(value, "max_theory_size");
    } else if (key == "n") {
      c.n = get_size(value, "n");
    } else if (key == "distribution") {
      c.distribution = value;
    } else if (key == "trials") {
      c.trials = get_size(value, "trials");
    } else if (key == "delta") {
      if (value.is_string()) {
        c.delta = parse_delta(value.get<std::string>());
      } else if (value.is_number()) {
        // numbers are read as the exact fraction of their shortest decimal text
        std::ostringstream os;
        os << value.get<double>();
        c.delta = parse_delta(os.str());
      } else {
        throw input_error("config field 'delta' must be a number or a \"p/q\" string");
      }
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) {
        throw input_error("config field 'seed' must be an integer");
      }
      c.seed = value.get<std::uint64_t>();
    } else if (key == "max_length") {
      c.max_length = get_size(value, "max_length");
    } else if (key == "corpus") {
      if (!value.is_array()) throw input_error("config field 'corpus' must be a list of binary strings");
      for (const auto& s : value) {
        if (!s.is_string()) throw input_error("config field 'corpus' must be a list of binary strings");
        c.corpus.push_back(s.get<std::string>());
      }
    } else if (key == "threads") {
      c.threads = get_size(value, "threads");
    } else if (key == "budget") {
      if (!value.is_object()) throw input_error("config field 'budget' must be an object");
      for (const auto& [bk, bv] : value.items()) {
        if (bk == "max_instances") {
          c.budget.max_instances = get_size(bv, "budget.max_instances");
        } else if (bk == "max_trials") {
          c.budget.max_trials = get_size(bv, "budget.max_trials");
        } else if (bk == "max_sample") {
          c.budget.max_sample = get_size(bv, "budget.max_sample");
        } else {
          throw input_error("unknown config field 'budget." + bk + "'");
        }
      }
    } else {
      throw input_error("unknown config field '" + key + "'");
    }
  }
  if (c.theory.empty() && c.theory_name.empty()) c.theory_name = c.scenario == "sweep" ? "all" : "full";
  if (!c.theory.empty()) c.domain_size = c.theory.front().size();
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (!kScenarios.contains(scenario)) {
    throw input_error("config field 'scenario' must be one of slt, seq, uni, sweep (got '" + scenario + "')");
  }
  if (scenario == "uni") {
    for (const auto& y : corpus) {
      check_bits(y);
      if (y.size() > kMaxComplexityLength) {
        throw capacity_error("corpus string length exceeds limit " + std::to_string(kMaxComplexityLength));
      }
    }
    if (corpus.empty() && max_length > kMaxComplexityLength) {
      throw capacity_error("config field 'max_length' exceeds limit " + std::to_string(kMaxComplexityLength));
    }
  } else {
    if (!theory_name.empty() && !kTheoryNames.contains(theory_name)) {
      throw input_error("config field 'theory' names an unknown generator '" + theory_name + "'");
    }
    if (theory_name == "all" && scenario == "slt") {
      throw input_error("config field 'theory': scenario slt needs a single theory");
    }
    if (domain_size == 0 || domain_size > kMaxDomain) {
      throw capacity_error("config field 'domain_size' must be in 1.." + std::to_string(kMaxDomain));
    }
    if (theory_name == "all" && domain_size > 4) {
      throw capacity_error("theory enumeration supports domain_size up to 4");
    }
    if (n == 0) throw input_error("config field 'n' must be positive");
    if ((scenario == "sweep" || scenario == "seq") && n > domain_size) {
      throw input_error("config field 'n' must not exceed domain_size");
    }
    if (scenario == "seq") {
      if (n > kMaxGameRounds) throw capacity_error("config field 'n' exceeds game round limit " + std::to_string(kMaxGameRounds));
      if (2 * domain_size > kMaxGameEvents) {
        throw capacity_error("config field 'domain_size' exceeds game event limit " + std::to_string(kMaxGameEvents));
      }
    }
    if (scenario == "slt") {
      if (n > budget.max_sample) throw capacity_error("config field 'n' exceeds budget.max_sample " + std::to_string(budget.max_sample));
      if (trials < 100) throw input_error("config field 'trials' must be at least 100");
      if (trials > budget.max_trials) {
        throw capacity_error("config field 'trials' exceeds budget.max_trials " + std::to_string(budget.max_trials));
      }
      if (delta.sign() <= 0 || delta >= Rational(1)) throw input_error("config field 'delta' must lie in (0, 1)");
    }
  }
  const std::size_t count = instance_count(*this);
  if (count > budget.max_instances) {
    throw capacity_error("instance count " + std::to_string(count) + " exceeds budget.max_instances " +
                         std::to_string(budget.max_instances));
  }
}

json ExperimentConfig::to_json() const {
  json j = {{"scenario", scenario}, {"seed", seed}};
  if (scenario == "uni") {
    if (corpus.empty()) {
      j["max_length"] = max_length;
    } else {
      j["corpus"] = corpus;
    }
  } else {
    j["domain_size"] = domain_size;
    if (theory.empty()) {
      j["theory"] = theory_name;
    } else {
      j["theory"] = theory;
    }
    j["n"] = n;
    if (max_theory_size != 0) j["max_theory_size"] = max_theory_size;
    if (scenario == "slt") {
      j["distribution"] = distribution;
      j["trials"] = trials;
      j["delta"] = delta.str();
    }
  }
  j["budget"] = {{"max_instances", budget.max_instances},
                 {"max_trials", budget.max_trials},
                 {"max_sample", budget.max_sample}};
  return j;
}

Theory build_theory(const ExperimentConfig& c) {
  if (!c.theory.empty()) return Theory::from_strings(c.theory);
  const std::size_t m = c.domain_size;
  if (c.theory_name == "full") return Theory::full(m);
  if (c.theory_name == "constants") return Theory::constants(m);
  if (c.theory_name == "singleton") return Theory(Domain(m), {0});
  if (c.theory_name == "indicators") {
    std::vector<Labels> fs;
    for (std::size_t x = 0; x < m; ++x) fs.push_back(Labels{1} << x);
    return Theory(Domain(m), fs);
  }
  throw input_error("config field 'theory' does not name a single theory");
}

EventDistribution build_distribution(const ExperimentConfig& c) {
  const json& d = c.distribution;
  const std::size_t m = c.theory.empty() ? c.domain_size : c.theory.front().size();
  if (d.is_string() && d.get<std::string>() == "uniform_events") return EventDistribution::uniform_events(m);
  if (d.is_object() && d.contains("labels") && d.size() == 1 && d["labels"].is_string()) {
    const auto text = d["labels"].get<std::string>();
    if (text.size() != m) throw input_error("config field 'distribution.labels' must have one label per input");
    check_bits(text);
    Labels labels = 0;
    for (std::size_t x = 0; x < m; ++x) labels |= static_cast<Labels>(text[x] == '1') << x;
    return EventDistribution::uniform_inputs(m, labels);
  }
  if (d.is_object() && d.contains("masses") && d.size() == 1 && d["masses"].is_array()) {
    std::vector<Rational> mass;
    for (const auto& v : d["masses"]) {
      if (!v.is_string()) throw input_error("config field 'distribution.masses' must hold \"p/q\" strings");
      mass.push_back(Rational::parse(v.get<std::string>()));
    }
    return EventDistribution(Domain(m), std::move(mass));
  }
  throw input_error(
      "config field 'distribution' must be \"uniform_events\", {\"labels\": ...} or {\"masses\": [...]}");
}

// ---- measures and assertions ----------------------------------------------------------

Measure Measure::of(std::string name, const Rational& value) {
  return {std::move(name), value, value.to_double()};
}

Measure Measure::of(std::string name, double value) {
  return {std::move(name), std::nullopt, value == 0.0 ? 0.0 : value};  // no negative zero in reports
}

Assertion assert_le(std::string tag, std::string name, const Measure& lhs, const Measure& rhs, double slack) {
  Assertion a{std::move(tag), std::move(name), false, lhs, rhs, subtract("margin", rhs, lhs)};
  a.holds = lhs.exact && rhs.exact ? *lhs.exact <= *rhs.exact : lhs.decimal <= rhs.decimal + slack;
  return a;
}

Assertion assert_eq(std::string tag, std::string name, const Measure& lhs, const Measure& rhs, double tolerance) {
  Assertion a{std::move(tag), std::move(name), false, lhs, rhs, subtract("margin", rhs, lhs)};
  a.holds = lhs.exact && rhs.exact ? *lhs.exact == *rhs.exact : std::abs(lhs.decimal - rhs.decimal) <= tolerance;
  return a;
}

bool ReportRow::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.holds; });
}

std::size_t Report::assertion_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.assertions.size();
  return n;
}

std::size_t Report::failure_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) {
    for (const auto& a : r.assertions) n += a.holds ? 0 : 1;
  }
  return n;
}

json Report::body() const {
  json j;
  j["artifact"] = kArtifactVersion;
  j["config"] = config.to_json();
  if (config.scenario == "uni") j["machine_id"] = kMachineId;
  json rows_json = json::array();
  for (const auto& r : rows) {
    json row;
    row["instance"] = r.instance;
    json measures = json::object();
    for (const auto& m : r.measures) measures[m.name] = measure_json(m);
    row["measures"] = measures;
    json assertions = json::array();
    for (const auto& a : r.assertions) {
      assertions.push_back({{"tag", a.tag},
                            {"name", a.name},
                            {"holds", a.holds},
                            {"lhs", measure_json(a.lhs)},
                            {"rhs", measure_json(a.rhs)},
                            {"margin", measure_json(a.margin)}});
    }
    row["assertions"] = assertions;
    row["pass"] = r.passed();
    if (!r.detail.is_null()) row["detail"] = r.detail;
    rows_json.push_back(row);
  }
  j["rows"] = rows_json;
  j["summary"] = {{"instances", rows.size()},
                  {"assertions", assertion_count()},
                  {"failures", failure_count()},
                  {"pass", passed()}};
  return j;
}

json Report::to_json() const {
  json j;
  j["report"] = body();
  j["timing"] = {{"runtime_seconds", runtime_seconds}};
  return j;
}

std::string Report::csv() const {
  std::vector<std::string> names;
  std::map<std::string, bool> exact;
  for (const auto& r : rows) {
    for (const auto& m : r.measures) {
      if (!exact.contains(m.name)) names.push_back(m.name);
      exact[m.name] = exact[m.name] || m.exact.has_value();
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "instance";
  for (const auto& n : names) {
    if (exact[n]) os << ',' << n;
    os << ',' << n << "_decimal";
  }
  os << ",pass\n";
  for (const auto& r : rows) {
    os << r.instance;
    for (const auto& n : names) {
      const auto it = std::find_if(r.measures.begin(), r.measures.end(), [&](const Measure& m) { return m.name == n; });
      if (exact[n]) os << ',' << (it != r.measures.end() && it->exact ? it->exact->str() : "");
      os << ',';
      if (it != r.measures.end()) os << it->decimal;
    }
    os << ',' << (r.passed() ? "pass" : "fail") << '\n';
  }
  return os.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    out.push_back(std::move(cells));
  }
  return out;
}

// ---- run ------------------------------------------------------------------------------

Report run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.config = config;
  if (config.scenario == "uni") {
    const auto corpus = corpus_strings(config);
    report.rows = parallel_map<ReportRow>(corpus.size(), config.threads,
                                          [&](std::size_t i) { return uni_row(corpus[i]); });
  } else {
    const auto theories = scenario_theories(config);
    std::function<ReportRow(std::size_t)> fn;
    if (config.scenario == "sweep") {
      fn = [&](std::size_t i) { return sweep_row(theories[i], config.n); };
    } else if (config.scenario == "seq") {
      fn = [&](std::size_t i) { return seq_row(config, theories[i]); };
    } else {
      fn = [&](std::size_t i) { return slt_row(config, theories[i]); };
    }
    report.rows = parallel_map<ReportRow>(theories.size(), config.threads, fn);
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Report run_game(const ExperimentConfig& config) {
  if (config.theory_name == "all") throw input_error("config field 'theory': the game needs a single theory");
  const Theory theory = build_theory(config);
  const auto start = std::chrono::steady_clock::now();
  const SeqGameResult game = minimax_value_seq(GameSpec(theory, config.n));
  Report report;
  report.config = config;
  report.config.scenario = "seq";
  ReportRow row;
  row.instance = theory_label(theory);
  row.measures.push_back(Measure::of("V", game.value));
  json strategy = json::array();
  for (const auto& p : game.root_strategy) strategy.push_back(p.str());
  row.detail = {{"rounds", config.n}, {"root_strategy", strategy}, {"states_solved", game.states_solved}};
  report.rows.push_back(std::move(row));
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string describe(const ExperimentConfig& config) {
  config.validate();
  std::ostringstream os;
  os << "scenario: " << config.scenario << '\n';
  if (config.scenario == "uni") {
    const auto corpus = corpus_strings(config);
    os << "machine: " << kMachineId << '\n';
    os << "strings: " << corpus.size() << " planned";
    if (config.corpus.empty()) os << " (all binary strings of length <= " << config.max_length << ")";
    os << '\n';
    os << "program enumeration: " << enumerate_programs(kMaxProgramLength).size() << " programs of length <= "
       << kMaxProgramLength << '\n';
    os << "asserted tags: E (loss <= G, G <= K)\n";
    return os.str();
  }
  const auto theories = scenario_theories(config);
  const std::size_t m = config.domain_size;
  os << "domain size: " << m << '\n';
  os << "theories: " << theories.size() << '\n';
  os << "n: " << config.n << '\n';
  if (config.scenario == "sweep") {
    std::size_t subsets = 1;
    for (std::size_t i = 0; i < config.n; ++i) subsets = subsets * (m - i) / (i + 1);
    os << "input subsets per theory: " << subsets << '\n';
    os << "labelings per subset: " << (std::size_t{1} << config.n) << '\n';
    os << "asserted tags: prop identities, range, D\n";
  } else if (config.scenario == "seq") {
    const double trees = std::pow(static_cast<double>(m), static_cast<double>((std::size_t{1} << config.n) - 1));
    os << "candidate trees: " << trees << " (valid ones are kept)\n";
    os << "game events: " << 2 * m << ", rounds: " << config.n << '\n';
    if (config.n <= kMaxCoverDepth) {
      os << "zero-cover candidates: " << (std::size_t{1} << ((std::size_t{1} << config.n) - 1)) << " label trees\n";
    }
    os << "asserted tags: D-SEQ, prop identities, lemma zero-cover, prop reduction\n";
  } else {
    os << "trials: " << config.trials << ", delta: " << config.delta.str() << ", seed: " << config.seed << '\n';
    os << "events drawn: " << config.trials * config.n << '\n';
    os << "asserted tags: D''-s, D''-h, D\n";
  }
  return os.str();
}

}  // namespace falsify
