#include "falsify/uni.hpp"

#include <algorithm>
#include <cmath>

#include "falsify/errors.hpp"
#include "falsify/numerics.hpp"

namespace falsify {

namespace {

struct Compiled {
  ToyProgram program;
  MachineOutput output;
};

// All programs up to the enumeration ceiling with their outputs, built once.
const std::vector<Compiled>& compiled_programs() {
  static const std::vector<Compiled> table = [] {
    std::vector<Compiled> out;
    for (const auto& p : enumerate_programs(kMaxProgramLength)) out.push_back({p, run_machine(p)});
    return out;
  }();
  return table;
}

void check_length(std::size_t n) {
  if (n > kMaxProgramLength) {
    throw capacity_error("program length " + std::to_string(n) + " exceeds limit " +
                         std::to_string(kMaxProgramLength));
  }
}

// y is a prefix of w^infinity (w nonempty).
bool periodic_extends(std::string_view w, std::string_view y) {
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (w[t % w.size()] != y[t]) return false;
  }
  return true;
}

}  // namespace

void check_bits(std::string_view bits) {
  for (char c : bits) {
    if (c != '0' && c != '1') throw input_error("binary string may only contain '0' and '1'");
  }
}

bool MachineOutput::extends(std::string_view y) const {
  if (kind == Kind::finite) return content.size() >= y.size() && content.compare(0, y.size(), y) == 0;
  return periodic_extends(content, y);
}

std::optional<char> MachineOutput::at(std::size_t t) const {
  if (kind == Kind::periodic) return content[t % content.size()];
  if (t < content.size()) return content[t];
  return std::nullopt;
}

std::optional<ToyProgram> parse_program(std::string_view bits) {
  check_bits(bits);
  if (bits.size() < 2 || bits.size() % 2 != 0) return std::nullopt;
  for (std::size_t i = 0; i + 2 < bits.size(); i += 2) {
    if (bits[i] != '0') return std::nullopt;
  }
  if (bits[bits.size() - 2] != '1') return std::nullopt;
  return ToyProgram(std::string(bits));
}

MachineOutput run_machine(const ToyProgram& program) {
  const std::string& b = program.bits();
  MachineOutput out;
  for (std::size_t i = 0; i + 2 < b.size(); i += 2) out.content.push_back(b[i + 1]);
  const bool repeat = b.back() == '0';
  out.kind = repeat && !out.content.empty() ? MachineOutput::Kind::periodic : MachineOutput::Kind::finite;
  return out;
}

std::optional<ToyProgram> strip_padding(std::string_view padded) {
  check_bits(padded);
  for (std::size_t i = 0; i + 1 < padded.size(); i += 2) {
    if (padded[i] == '1') return parse_program(padded.substr(0, i + 2));
  }
  return std::nullopt;
}

std::vector<ToyProgram> enumerate_programs(std::size_t max_len) {
  check_length(max_len);
  std::vector<ToyProgram> out;
  for (std::size_t k = 0; 2 * k + 2 <= max_len; ++k) {
    std::vector<std::string> batch;
    for (std::uint64_t emit = 0; emit < (std::uint64_t{1} << k); ++emit) {
      std::string body;
      for (std::size_t i = 0; i < k; ++i) {
        body += '0';
        body += ((emit >> (k - 1 - i)) & 1U) != 0 ? '1' : '0';
      }
      batch.push_back(body + "10");
      batch.push_back(body + "11");
    }
    std::sort(batch.begin(), batch.end());
    for (auto& s : batch) out.push_back(*parse_program(s));
  }
  return out;
}

std::uint64_t explaining_count(std::string_view y, std::size_t n) {
  check_bits(y);
  check_length(n);
  std::uint64_t count = 0;
  for (const auto& c : compiled_programs()) {
    if (c.program.size() <= n && c.output.extends(y)) count += std::uint64_t{1} << (n - c.program.size());
  }
  return count;
}

Rational solomonoff_prior_finite(std::string_view y, std::size_t n) {
  return Rational(explaining_count(y, n)) / pow2(static_cast<long>(n));
}

Rational solomonoff_prior_tail(std::string_view y, std::size_t n) {
  check_bits(y);
  const auto len = static_cast<long>(y.size());
  // Programs with at least |y| emits match iff their first |y| emits spell y; summing
  // over emit counts k >= k0 gives 2^{-|y|-k0-1} per terminator.
  const long k0 = std::max(len, static_cast<long>(n / 2));
  Rational tail = 2 * pow2(-len - k0 - 1);
  // Repeat programs with a shorter period j must have y as a prefix of its repetition.
  for (std::size_t j = 1; j < y.size(); ++j) {
    if (2 * j + 2 > n && periodic_extends(y.substr(0, j), y)) tail += pow2(-2 * static_cast<long>(j) - 2);
  }
  return tail;
}

Rational solomonoff_prior_exact(std::string_view y) { return solomonoff_prior_tail(y, 0); }

Prediction solomonoff_predict(std::string_view history, bool normalize) {
  const Rational base = solomonoff_prior_exact(history);
  if (base.is_zero()) throw unpredictable_history_error("history has zero prior");
  const std::string h(history);
  Prediction p{solomonoff_prior_exact(h + "0") / base, solomonoff_prior_exact(h + "1") / base};
  if (normalize) {
    const Rational total = p.q0 + p.q1;
    if (total.is_zero()) throw unpredictable_history_error("history has no continuation mass");
    p.q0 /= total;
    p.q1 /= total;
  }
  return p;
}

std::size_t risk_uni(std::string_view y, const ToyProgram& program) {
  check_bits(y);
  const MachineOutput out = run_machine(program);
  std::size_t risk = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto bit = out.at(t);
    if (!bit || *bit != y[t]) ++risk;
  }
  return risk;
}

std::size_t theory_risk_uni(std::string_view y, std::size_t max_len) {
  check_bits(y);
  check_length(max_len);
  std::size_t best = y.size();
  for (const auto& c : compiled_programs()) {
    if (c.program.size() > max_len) break;
    best = std::min(best, risk_uni(y, c.program));
  }
  return best;
}

double hard_falsifiability_uni(std::string_view y) {
  const Rational q = solomonoff_prior_exact(y);
  if (q.is_zero()) throw undefined_gain_error("zero prior");
  return -log2(q);
}

double finite_gain_uni(std::string_view y, std::size_t n) {
  const std::uint64_t count = explaining_count(y, n);
  if (count == 0) throw undefined_gain_error("no length-" + std::to_string(n) + " string explains the data");
  return static_cast<double>(n) - log2(Rational(count));
}

std::size_t kolmogorov_complexity(std::string_view y) {
  check_bits(y);
  if (y.size() > kMaxComplexityLength) {
    throw capacity_error("complexity search supports strings up to length " +
                         std::to_string(kMaxComplexityLength));
  }
  // Explicit emission of y followed by a halt always works at length 2|y| + 2.
  for (std::size_t k = 0; k <= y.size(); ++k) {
    for (std::uint64_t emit = 0; emit < (std::uint64_t{1} << k); ++emit) {
      std::string body;
      for (std::size_t i = 0; i < k; ++i) {
        body += '0';
        body += ((emit >> (k - 1 - i)) & 1U) != 0 ? '1' : '0';
      }
      for (const char* terminator : {"10", "11"}) {
        if (run_machine(*parse_program(body + terminator)).extends(y)) return 2 * k + 2;
      }
    }
  }
  throw std::logic_error("explicit emission program not found");
}

FalsificationLedger falsification_ledger(std::string_view y, std::size_t n) {
  check_bits(y);
  check_length(n);
  FalsificationLedger ledger;
  ledger.n = n;
  for (std::size_t t = 0; t <= y.size(); ++t) ledger.counts.push_back(explaining_count(y.substr(0, t), n));
  if (ledger.counts.back() == 0) {
    throw undefined_gain_error("no length-" + std::to_string(n) + " string explains the data");
  }
  ledger.base = static_cast<double>(n) - log2(Rational(ledger.counts[0]));
  for (std::size_t t = 1; t <= y.size(); ++t) {
    ledger.entries.push_back(log2(Rational(ledger.counts[t - 1])) - log2(Rational(ledger.counts[t])));
  }
  ledger.gain = static_cast<double>(n) - log2(Rational(ledger.counts.back()));
  return ledger;
}

UniversalChainReport verify_theorem_E(std::string_view y) {
  check_bits(y);
  UniversalChainReport r;
  r.y = std::string(y);
  r.prior = solomonoff_prior_exact(y);
  if (r.prior.is_zero()) throw undefined_gain_error("zero prior");
  for (std::size_t t = 0; t < y.size(); ++t) {
    const Prediction p = solomonoff_predict(y.substr(0, t));
    SolomonoffStep s;
    s.q = y[t] == '0' ? p.q0 : p.q1;
    s.loss = 1 - s.q;
    s.surprise = -log2(s.q);
    s.holds = s.loss.to_double() <= s.surprise + kLogSlack;
    r.loss += s.loss;
    r.steps.push_back(std::move(s));
  }
  r.gain = hard_falsifiability_uni(y);
  r.complexity = kolmogorov_complexity(y);
  r.loss_holds = r.loss.to_double() <= r.gain + kLogSlack;
  r.complexity_holds = r.gain <= static_cast<double>(r.complexity) + kLogSlack;
  return r;
}

}  // namespace falsify
