#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringlab/adversary.hpp"
#include "ringlab/fraction.hpp"
#include "ringlab/ring_sim.hpp"

namespace ringlab {

// Capacity bound for exact enumeration; RRL_MAX_UNIVERSE overrides.
std::uint64_t default_max_universe();

enum class OutcomeKind {
  DecidedZero = 0,
  DecidedOne = 1,
  Disagreement = 2,  // honest nodes split; violates agreement, utility 0
  Erroneous = 3,     // some honest node reported a cheater
};

struct OutcomeDistribution {
  std::array<long long, 4> counts{};
  long long total = 0;

  Fraction prob(OutcomeKind k) const {
    return Fraction(counts[static_cast<int>(k)], total);
  }
  Fraction prob_decided(int bit) const {
    return prob(bit ? OutcomeKind::DecidedOne : OutcomeKind::DecidedZero);
  }
};

struct UtilityModel {
  int preferred = 1;  // legal preferred outcome worth 1, everything else 0
};

// How the coalition positions behave; honest positions are always honest.
struct CoalitionSpec {
  enum Kind {
    TruthfulRun,    // coalition plays the protocol with its true values
    InputCheaters,  // protocol-compliant with declared inputs
    Scripted,       // forging per a ForgeScript
  };
  Kind kind = TruthfulRun;
  CoalitionAssignment assignment;  // true values by position
  std::vector<int> declared;       // by position, InputCheaters only
  const ForgeScript* script = nullptr;
  int preferred = 1;

  static CoalitionSpec truthful(const RingConfig& config, int preferred = 1);
  static CoalitionSpec scripted(const RingConfig& config,
                                const ForgeScript& script, int preferred);
  static CoalitionSpec input_cheaters(const RingConfig& config,
                                      std::vector<int> declared,
                                      int preferred);
};

// Reusable single-configuration executor: one behavior set, preallocated
// buffers, one lockstep run per honest-universe point. Decisions are
// bit-identical to run_ring on the same point.
class Evaluator {
 public:
  Evaluator(const RingConfig& config, const CoalitionSpec& spec);

  void set_script(const ForgeScript* script);

  struct NodeStats {
    int position = 0;
    bool decided = false;
    int value = 0;
    bool self_elected = false;
    long long leader_id = 0;
    long long input_l = 0;   // Lie-set input sum of this node's view
    bool rigged = false;     // upstream neighbor is a coalition member
    bool honest_upstream = false;
  };

  // inputs/randoms indexed by honest order (honest_positions()).
  OutcomeKind evaluate(std::span<const int> inputs,
                       std::span<const int> randoms);

  const std::vector<int>& honest_positions() const { return honest_; }
  const std::vector<NodeStats>& stats() const { return stats_; }
  const RingConfig& config() const { return *cfg_; }

 private:
  const RingConfig* cfg_;
  CoalitionSpec spec_;
  std::vector<int> honest_;
  std::vector<std::unique_ptr<Behavior>> owned_;
  std::vector<Behavior*> behaviors_;
  std::vector<HonestBehavior*> honest_behaviors_;  // honest order
  std::vector<CoalitionMember*> members_;
  std::vector<std::optional<Triplet>> receipts_;  // [p*n + r-1]
  std::vector<std::optional<Triplet>> sent_;
  std::vector<Decision> decisions_;
  std::vector<NodeStats> stats_;
  std::vector<int> truth_arc_;  // honest order; 0 when no coalition exists
};

// Mixed-radix enumeration of honest inputs ({0,1}^h) x honest randoms (Z_n^h).
class HonestUniverse {
 public:
  HonestUniverse(int honest_count, int n);
  std::uint64_t size() const { return size_; }
  void decode(std::uint64_t index, std::span<int> inputs,
              std::span<int> randoms) const;

 private:
  int h_, n_;
  std::uint64_t size_;
};

OutcomeDistribution exact_distribution(
    const RingConfig& config, const CoalitionSpec& spec,
    const std::optional<std::vector<int>>& fixed_honest_inputs = std::nullopt,
    std::uint64_t max_universe = default_max_universe());

Fraction coalition_utility(const OutcomeDistribution& dist,
                           const UtilityModel& model);

// Marginal probability that honest node u decides `bit`.
Fraction node_success_probability(
    const RingConfig& config, const CoalitionSpec& spec, int u, int bit,
    std::uint64_t max_universe = default_max_universe());

struct FairnessReport {
  int n = 0;
  long long agreement_violations = 0;
  long long validity_violations = 0;
  Fraction p_zero, p_one;
  std::string witness;  // first violating assignment, if any
  bool pass() const {
    return agreement_violations == 0 && validity_violations == 0 &&
           p_zero == Fraction(1, 2) && p_one == Fraction(1, 2);
  }
};

// Exhaustive agreement/validity/half-half check over an all-honest even ring.
FairnessReport check_fairness(int n,
                              std::uint64_t max_universe = default_max_universe());

struct LeaderUniformityReport {
  std::vector<std::pair<long long, Fraction>> leader_probability;  // by id
  int detected_points = 0;
  bool uniform = false;  // every elected id has probability exactly 1/n
};

// Marginalizes over u's own random with every other honest value pinned.
LeaderUniformityReport check_leader_uniformity(
    const RingConfig& config, const ForgeScript& script, int u, int u_input,
    std::span<const int> other_inputs, std::span<const int> other_randoms,
    int preferred = 1);

struct ConditionalReport {
  struct PerNode {
    int position = 0;
    long long cond_total = 0, cond_ones = 0;      // leader != u
    long long uncond_total = 0, uncond_ones = 0;  // all decided points
    bool honest_upstream = false;
  };
  std::vector<PerNode> nodes;
  bool pass() const;
};

// P(u decides 1 | u's leader != u) must be exactly 1/2 for every honest u;
// a node whose upstream neighbor is honest must sit at 1/2 unconditionally.
ConditionalReport check_conditional_half(
    const RingConfig& config, const CoalitionSpec& spec,
    std::uint64_t max_universe = default_max_universe());

struct StrategySurvey {
  std::uint64_t scripts = 0;
  std::uint64_t conditional_checks = 0, conditional_violations = 0;
  std::uint64_t unconditional_checks = 0, unconditional_violations = 0;
  std::uint64_t full_control_checks = 0, full_control_violations = 0;
  std::uint64_t scripts_with_detection = 0;
};

struct StrategyRecord {
  std::uint64_t index = 0;
  std::uint64_t digest = 0;
  Fraction utility;
  Fraction detected;
};

struct EquilibriumReport {
  Fraction baseline;
  Fraction best_utility;
  std::uint64_t best_index = 0;
  ForgeScript best_script;
  bool profitable = false;  // best_utility > baseline, exact comparison
  std::uint64_t scripts_evaluated = 0;
};

// Exhaustive utility maximization over a StrategySpace, with optional
// per-trace lemma checks (conditional half, full control) and per-strategy
// records for CSV emission.
EquilibriumReport best_response_search(
    const RingConfig& config, int preferred, const StrategySpace& space,
    StrategySurvey* survey = nullptr,
    std::vector<StrategyRecord>* records = nullptr,
    std::uint64_t max_universe = default_max_universe());

struct AdaptiveSearchResult {
  Fraction best_utility;
  std::uint64_t policies = 0;
};

// Bounded search over history-dependent coalition policies (echo transforms
// of honest triplets plus forged constants). A robustness probe, not a proof.
AdaptiveSearchResult adaptive_policy_search(const RingConfig& config,
                                            int preferred);

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

MonteCarloResult monte_carlo(const RingConfig& config,
                             const CoalitionSpec& spec, std::uint64_t samples,
                             std::uint64_t seed);

}  // namespace ringlab
