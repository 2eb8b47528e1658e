#include "ringlab/impossibility.hpp"

#include <algorithm>

namespace ringlab {

bool ConsensusFunction::valid() const {
  if (n < 1 || table.size() != (1ULL << n)) return false;
  for (int v : table)
    if (v != 0 && v != 1) return false;
  return table.front() == 0 && table.back() == 1;
}

ConsensusFunction ConsensusFunction::parity(int n) {
  if (n < 1 || n > 20) throw ConfigError("parity table needs 1 <= n <= 20");
  ConsensusFunction f;
  f.n = n;
  f.table.resize(1u << n);
  for (std::uint32_t mask = 0; mask < f.table.size(); ++mask)
    f.table[mask] = __builtin_popcount(mask) & 1;
  return f;
}

std::string ConsensusFunction::hex() const {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  for (size_t i = 0; i < table.size(); i += 4) {
    int nibble = 0;
    for (size_t j = 0; j < 4 && i + j < table.size(); ++j)
      nibble |= table[i + j] << j;
    out.push_back(digits[nibble]);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

int forced_decision(int v_input, int ones, int n) {
  if (v_input != 0 && v_input != 1)
    throw ConfigError("v_input must be a bit");
  if (n < 2 || ones < 0 || ones > n - 1)
    throw ConfigError("ones(j) must lie in [0, n-1]");
  // Closed form of the backward induction below; the parity of n decides
  // whether the chain lands on XOR or its negation.
  return (v_input + ones + n + 1) & 1;
}

ConstraintReport derive_constraints(int n) {
  if (n < 2) throw ConfigError("need at least one cheater");
  ConstraintReport report;
  report.n = n;
  report.forced.resize(n);

  // Base at ones(j) = n-1: validity pins v_input = 1 (everything looks
  // all-one to v); the utility argument pins v_input = 0 to the opposite.
  report.forced[n - 1] = {0, 1};
  // Step ones = k -> k-1: a coalition member declaring 0 among k ones is
  // locally indistinguishable from v with input 0 at level k, so agreement
  // copies that value to v_input = 1; the utility argument then forces
  // v_input = 0 to the complement.
  for (int k = n - 1; k >= 1; --k) {
    report.forced[k - 1][1] = report.forced[k][0];
    report.forced[k - 1][0] = 1 - report.forced[k - 1][1];
  }
  for (int k = 0; k < n; ++k)
    for (int v = 0; v <= 1; ++v)
      if (report.forced[k][v] != forced_decision(v, k, n))
        throw std::logic_error("closed form disagrees with the recurrence");

  // Validity also demands the all-zero profile decide 0.
  if (report.forced[0][0] != 0) {
    report.consistent = false;
    report.witness_v_input = 0;
    report.witness_ones = 0;
    return report;
  }
  report.consistent = true;
  if (n <= 20) {
    ConsensusFunction f = ConsensusFunction::parity(n);
    for (std::uint32_t mask = 0; mask < f.table.size(); ++mask) {
      int v = mask & 1;
      int ones = __builtin_popcount(mask >> 1);
      if (f.table[mask] != report.forced[ones][v])
        throw std::logic_error("parity rule violates the derived constraints");
    }
    report.unique = std::move(f);
  }
  return report;
}

bool is_input_cheater_equilibrium(const ConsensusFunction& f) {
  if (!f.valid()) return false;
  const std::uint32_t half = 1u << (f.n - 1);
  for (int v = 0; v < f.n; ++v) {
    const std::uint32_t low = (1u << v) - 1;
    for (int b = 0; b <= 1; ++b) {
      // hits(y) = number of inputs of v for which the decision equals b,
      // given the other n-1 nodes declare y. Truth-telling is optimal for
      // every true profile iff every y attains the maximum.
      int best = -1, worst = 3;
      for (std::uint32_t y = 0; y < half; ++y) {
        std::uint32_t others = ((y & ~low) << 1) | (y & low);
        int hits = (f.table[others] == b) + (f.table[others | (1u << v)] == b);
        best = std::max(best, hits);
        worst = std::min(worst, hits);
      }
      if (best != worst) return false;
    }
  }
  return true;
}

bool constancy_characterization(const ConsensusFunction& f) {
  if (!f.valid()) return false;
  const std::uint32_t half = 1u << (f.n - 1);
  for (int v = 0; v < f.n; ++v) {
    const std::uint32_t low = (1u << v) - 1;
    int expected = -1;
    for (std::uint32_t y = 0; y < half; ++y) {
      std::uint32_t others = ((y & ~low) << 1) | (y & low);
      int sum = f.table[others] + f.table[others | (1u << v)];
      if (expected < 0) expected = sum;
      if (sum != expected) return false;
    }
  }
  return true;
}

std::vector<ConsensusFunction> equilibrium_functions_bruteforce(int n) {
  if (n < 1) throw ConfigError("ring size must be positive");
  if (n > 4)
    throw CapacityError("brute force over 2^(2^n) tables needs n <= 4");
  const std::uint32_t entries = 1u << n;
  std::vector<ConsensusFunction> out;
  for (std::uint64_t code = 0; code < (1ULL << entries); ++code) {
    ConsensusFunction f;
    f.n = n;
    f.table.resize(entries);
    for (std::uint32_t i = 0; i < entries; ++i)
      f.table[i] = static_cast<int>((code >> i) & 1);
    if (is_input_cheater_equilibrium(f)) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace ringlab
