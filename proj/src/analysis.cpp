#include "ringlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

namespace ringlab {

std::uint64_t default_max_universe() {
  if (const char* env = std::getenv("RRL_MAX_UNIVERSE")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    throw ConfigError("RRL_MAX_UNIVERSE must be a positive integer");
  }
  return 100'000'000ULL;
}

// ---------------------------------------------------------------------------
// CoalitionSpec

namespace {

CoalitionAssignment zero_assignment(const RingConfig& config) {
  CoalitionAssignment a;
  a.inputs.assign(config.n, 0);
  a.randoms.assign(config.n, 0);
  return a;
}

}  // namespace

CoalitionSpec CoalitionSpec::truthful(const RingConfig& config, int preferred) {
  CoalitionSpec s;
  s.kind = TruthfulRun;
  s.assignment = zero_assignment(config);
  s.preferred = preferred;
  return s;
}

CoalitionSpec CoalitionSpec::scripted(const RingConfig& config,
                                      const ForgeScript& script,
                                      int preferred) {
  CoalitionSpec s;
  s.kind = Scripted;
  s.assignment = zero_assignment(config);
  s.script = &script;
  s.preferred = preferred;
  return s;
}

CoalitionSpec CoalitionSpec::input_cheaters(const RingConfig& config,
                                            std::vector<int> declared,
                                            int preferred) {
  CoalitionSpec s;
  s.kind = InputCheaters;
  s.assignment = zero_assignment(config);
  s.declared = std::move(declared);
  s.preferred = preferred;
  return s;
}

// ---------------------------------------------------------------------------
// Evaluator

Evaluator::Evaluator(const RingConfig& config, const CoalitionSpec& spec)
    : cfg_(&config), spec_(spec) {
  config.validate();
  const int n = config.n;
  if (spec_.assignment.inputs.size() != static_cast<size_t>(n) ||
      spec_.assignment.randoms.size() != static_cast<size_t>(n))
    throw ConfigError("coalition assignment must cover every position");
  honest_ = config.honest_positions();
  behaviors_.resize(n);
  for (int p = 0; p < n; ++p) {
    std::unique_ptr<Behavior> b;
    if (config.roles[p] == Role::Honest) {
      auto h = std::make_unique<HonestBehavior>(config.node_ids[p], n, 0, 0);
      honest_behaviors_.push_back(h.get());
      b = std::move(h);
    } else {
      switch (spec_.kind) {
        case CoalitionSpec::TruthfulRun:
          b = std::make_unique<HonestBehavior>(config.node_ids[p], n,
                                               spec_.assignment.inputs[p],
                                               spec_.assignment.randoms[p]);
          break;
        case CoalitionSpec::InputCheaters: {
          if (spec_.declared.size() != static_cast<size_t>(n))
            throw ConfigError("declared inputs must cover every position");
          b = std::make_unique<HonestBehavior>(config.node_ids[p], n,
                                               spec_.declared[p],
                                               spec_.assignment.randoms[p]);
          break;
        }
        case CoalitionSpec::Scripted: {
          auto m = std::make_unique<CoalitionMember>(
              *cfg_, p, spec_.assignment, spec_.preferred);
          m->set_script(spec_.script);
          members_.push_back(m.get());
          b = std::move(m);
          break;
        }
      }
    }
    behaviors_[p] = b.get();
    owned_.push_back(std::move(b));
  }
  receipts_.resize(static_cast<size_t>(n) * n);
  sent_.resize(n);
  decisions_.resize(n);
  stats_.resize(honest_.size());
  truth_arc_.resize(honest_.size(), 0);
  for (size_t i = 0; i < honest_.size(); ++i) {
    int p = honest_[i];
    stats_[i].position = p;
    stats_[i].rigged = config.roles[(p - 1 + n) % n] == Role::Coalition;
    stats_[i].honest_upstream = !stats_[i].rigged;
    if (config.has_coalition()) truth_arc_[i] = config.truth_arc_length(p);
  }
}

void Evaluator::set_script(const ForgeScript* script) {
  spec_.script = script;
  for (auto* m : members_) m->set_script(script);
}

OutcomeKind Evaluator::evaluate(std::span<const int> inputs,
                                std::span<const int> randoms) {
  const int n = cfg_->n;
  for (size_t i = 0; i < honest_behaviors_.size(); ++i)
    honest_behaviors_[i]->reset(inputs[i], randoms[i]);
  for (int p = 0; p < n; ++p)
    if (cfg_->roles[p] == Role::Coalition) behaviors_[p]->reset();
  std::fill(receipts_.begin(), receipts_.end(), std::nullopt);

  for (int r = 1; r <= n; ++r) {
    for (int p = 0; p < n; ++p)
      sent_[p] = behaviors_[p]->message_for_round(
          r, Receipts(&receipts_[static_cast<size_t>(p) * n], r - 1));
    for (int p = 0; p < n; ++p)
      receipts_[static_cast<size_t>(p) * n + r - 1] = sent_[(p + n - 1) % n];
  }
  for (int p = 0; p < n; ++p)
    decisions_[p] = behaviors_[p]->decide(
        Receipts(&receipts_[static_cast<size_t>(p) * n], n));

  bool any_cheater = false;
  bool all_same = true;
  int first_value = -1;
  for (size_t i = 0; i < honest_.size(); ++i) {
    int p = honest_[i];
    NodeStats& st = stats_[i];
    const Decision& d = decisions_[p];
    st.decided = d.kind == Decision::Decided;
    st.value = d.value;
    st.self_elected = false;
    st.leader_id = 0;
    st.input_l = 0;
    if (st.decided) {
      const FinalizeResult& fin = honest_behaviors_[i]->finalize_info();
      st.leader_id = fin.leader_id;
      st.self_elected = fin.leader_id == cfg_->node_ids[p];
      if (first_value < 0)
        first_value = d.value;
      else if (d.value != first_value)
        all_same = false;
      if (truth_arc_[i] > 0) {
        for (int r = truth_arc_[i]; r <= n - 1; ++r) {
          const auto& msg = receipts_[static_cast<size_t>(p) * n + r - 1];
          if (msg) st.input_l += msg->input;
        }
      }
    } else {
      any_cheater = true;
    }
  }
  if (any_cheater) return OutcomeKind::Erroneous;
  if (!all_same) return OutcomeKind::Disagreement;
  return first_value ? OutcomeKind::DecidedOne : OutcomeKind::DecidedZero;
}

// ---------------------------------------------------------------------------
// HonestUniverse

HonestUniverse::HonestUniverse(int honest_count, int n)
    : h_(honest_count), n_(n) {
  if (honest_count < 0 || n < 2) throw ConfigError("bad universe shape");
  size_ = 1;
  for (int i = 0; i < h_; ++i) size_ *= 2;
  for (int i = 0; i < h_; ++i) size_ *= static_cast<std::uint64_t>(n_);
}

void HonestUniverse::decode(std::uint64_t index, std::span<int> inputs,
                            std::span<int> randoms) const {
  for (int i = 0; i < h_; ++i) {
    inputs[i] = static_cast<int>(index % 2);
    index /= 2;
  }
  for (int i = 0; i < h_; ++i) {
    randoms[i] = static_cast<int>(index % n_);
    index /= n_;
  }
}

// ---------------------------------------------------------------------------
// Exact distributions

OutcomeDistribution exact_distribution(
    const RingConfig& config, const CoalitionSpec& spec,
    const std::optional<std::vector<int>>& fixed_honest_inputs,
    std::uint64_t max_universe) {
  Evaluator eval(config, spec);
  const int h = static_cast<int>(eval.honest_positions().size());
  std::vector<int> inputs(h), randoms(h);
  OutcomeDistribution dist;
  if (fixed_honest_inputs) {
    if (fixed_honest_inputs->size() != static_cast<size_t>(h))
      throw ConfigError("fixed inputs must cover every honest node");
    std::uint64_t size = 1;
    for (int i = 0; i < h; ++i) size *= static_cast<std::uint64_t>(config.n);
    if (size > max_universe)
      throw CapacityError("honest universe exceeds the configured bound");
    inputs = *fixed_honest_inputs;
    for (std::uint64_t idx = 0; idx < size; ++idx) {
      std::uint64_t k = idx;
      for (int i = 0; i < h; ++i) {
        randoms[i] = static_cast<int>(k % config.n);
        k /= config.n;
      }
      dist.counts[static_cast<int>(eval.evaluate(inputs, randoms))]++;
      dist.total++;
    }
    return dist;
  }
  HonestUniverse uni(h, config.n);
  if (uni.size() > max_universe)
    throw CapacityError("honest universe exceeds the configured bound");
  for (std::uint64_t idx = 0; idx < uni.size(); ++idx) {
    uni.decode(idx, inputs, randoms);
    dist.counts[static_cast<int>(eval.evaluate(inputs, randoms))]++;
    dist.total++;
  }
  return dist;
}

Fraction coalition_utility(const OutcomeDistribution& dist,
                           const UtilityModel& model) {
  return dist.prob_decided(model.preferred);
}

Fraction node_success_probability(const RingConfig& config,
                                  const CoalitionSpec& spec, int u, int bit,
                                  std::uint64_t max_universe) {
  Evaluator eval(config, spec);
  const auto& honest = eval.honest_positions();
  auto it = std::find(honest.begin(), honest.end(), u);
  if (it == honest.end())
    throw ConfigError("success probability is defined for honest nodes");
  size_t ui = static_cast<size_t>(it - honest.begin());
  const int h = static_cast<int>(honest.size());
  HonestUniverse uni(h, config.n);
  if (uni.size() > max_universe)
    throw CapacityError("honest universe exceeds the configured bound");
  std::vector<int> inputs(h), randoms(h);
  long long hits = 0;
  for (std::uint64_t idx = 0; idx < uni.size(); ++idx) {
    uni.decode(idx, inputs, randoms);
    eval.evaluate(inputs, randoms);
    const auto& st = eval.stats()[ui];
    if (st.decided && st.value == bit) ++hits;
  }
  return Fraction(hits, static_cast<long long>(uni.size()));
}

// ---------------------------------------------------------------------------
// Fairness (all-honest ring)

FairnessReport check_fairness(int n, std::uint64_t max_universe) {
  if (n < 2 || n % 2 != 0)
    throw ConfigError("fairness check requires an even ring size >= 2");
  FairnessReport report;
  report.n = n;
  std::uint64_t rand_count = 1;
  for (int i = 0; i < n; ++i) rand_count *= static_cast<std::uint64_t>(n);
  std::uint64_t total = rand_count << n;
  if (total > max_universe)
    throw CapacityError("honest universe exceeds the configured bound");

  // With ids 1..n in ring order the id-sorted array coincides with the
  // position order, so the leader of random-sum j (mod n) is position j.
  // Every node accumulates the same multisets, hence the same sums: all
  // decisions in a run are equal by construction and agreement is checked
  // structurally by the lockstep tests instead.
  long long ones = 0;
  const std::uint64_t all_ones_mask = (1ULL << n) - 1;
  std::vector<int> digits(n, 0);
  for (std::uint64_t mask = 0; mask <= all_ones_mask; ++mask) {
    int input_sum = __builtin_popcountll(mask);
    std::fill(digits.begin(), digits.end(), 0);
    int rand_mod = 0;
    for (std::uint64_t r = 0;; ++r) {
      int leader_input = static_cast<int>((mask >> rand_mod) & 1);
      int decision = (input_sum + leader_input) & 1;
      ones += decision;
      if (mask == 0 && decision != 0) {
        ++report.validity_violations;
        if (report.witness.empty())
          report.witness = "all-zero inputs decided 1";
      }
      if (mask == all_ones_mask && decision != 1) {
        ++report.validity_violations;
        if (report.witness.empty())
          report.witness = "all-one inputs decided 0";
      }
      if (r + 1 == rand_count) break;
      // Odometer step: every touched digit moves by +1 (mod n), including a
      // wrap from n-1 to 0, so the running sum just gains 1 per touch.
      int d = 0;
      while (true) {
        rand_mod = (rand_mod + 1) % n;
        if (++digits[d] < n) break;
        digits[d] = 0;
        ++d;
      }
    }
  }
  long long total_ll = static_cast<long long>(total);
  report.p_one = Fraction(ones, total_ll);
  report.p_zero = Fraction(total_ll - ones, total_ll);
  return report;
}

// ---------------------------------------------------------------------------
// Leader uniformity

LeaderUniformityReport check_leader_uniformity(const RingConfig& config,
                                               const ForgeScript& script,
                                               int u, int u_input,
                                               std::span<const int> other_inputs,
                                               std::span<const int> other_randoms,
                                               int preferred) {
  CoalitionSpec spec = CoalitionSpec::scripted(config, script, preferred);
  Evaluator eval(config, spec);
  const auto& honest = eval.honest_positions();
  auto it = std::find(honest.begin(), honest.end(), u);
  if (it == honest.end())
    throw ConfigError("leader uniformity is probed at an honest node");
  size_t ui = static_cast<size_t>(it - honest.begin());
  if (other_inputs.size() + 1 != honest.size() ||
      other_randoms.size() + 1 != honest.size())
    throw ConfigError("pinned values must cover the other honest nodes");

  const int h = static_cast<int>(honest.size());
  std::vector<int> inputs(h), randoms(h);
  size_t k = 0;
  for (size_t i = 0; i < honest.size(); ++i) {
    if (i == ui) {
      inputs[i] = u_input;
      continue;
    }
    inputs[i] = other_inputs[k];
    randoms[i] = other_randoms[k];
    ++k;
  }

  LeaderUniformityReport report;
  std::vector<long long> elected;
  for (int r = 0; r < config.n; ++r) {
    randoms[ui] = r;
    eval.evaluate(inputs, randoms);
    const auto& st = eval.stats()[ui];
    if (!st.decided) {
      ++report.detected_points;
      continue;
    }
    elected.push_back(st.leader_id);
  }
  std::sort(elected.begin(), elected.end());
  for (size_t i = 0; i < elected.size();) {
    size_t j = i;
    while (j < elected.size() && elected[j] == elected[i]) ++j;
    report.leader_probability.emplace_back(
        elected[i], Fraction(static_cast<long long>(j - i), config.n));
    i = j;
  }
  report.uniform = report.detected_points == 0;
  for (const auto& [id, p] : report.leader_probability)
    if (p != Fraction(1, config.n)) report.uniform = false;
  return report;
}

// ---------------------------------------------------------------------------
// Conditional-half check

bool ConditionalReport::pass() const {
  for (const auto& node : nodes) {
    if (node.cond_total > 0 && 2 * node.cond_ones != node.cond_total)
      return false;
    if (node.honest_upstream && node.uncond_total > 0 &&
        2 * node.uncond_ones != node.uncond_total)
      return false;
  }
  return true;
}

ConditionalReport check_conditional_half(const RingConfig& config,
                                         const CoalitionSpec& spec,
                                         std::uint64_t max_universe) {
  Evaluator eval(config, spec);
  const int h = static_cast<int>(eval.honest_positions().size());
  HonestUniverse uni(h, config.n);
  if (uni.size() > max_universe)
    throw CapacityError("honest universe exceeds the configured bound");
  ConditionalReport report;
  report.nodes.resize(h);
  for (int i = 0; i < h; ++i) {
    report.nodes[i].position = eval.stats()[i].position;
    report.nodes[i].honest_upstream = eval.stats()[i].honest_upstream;
  }
  std::vector<int> inputs(h), randoms(h);
  for (std::uint64_t idx = 0; idx < uni.size(); ++idx) {
    uni.decode(idx, inputs, randoms);
    eval.evaluate(inputs, randoms);
    for (int i = 0; i < h; ++i) {
      const auto& st = eval.stats()[i];
      if (!st.decided) continue;
      auto& node = report.nodes[i];
      node.uncond_total++;
      node.uncond_ones += st.value;
      if (!st.self_elected) {
        node.cond_total++;
        node.cond_ones += st.value;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Best-response search

EquilibriumReport best_response_search(const RingConfig& config, int preferred,
                                       const StrategySpace& space,
                                       StrategySurvey* survey,
                                       std::vector<StrategyRecord>* records,
                                       std::uint64_t max_universe) {
  EquilibriumReport report;
  {
    CoalitionSpec truthful = CoalitionSpec::truthful(config, preferred);
    report.baseline = coalition_utility(
        exact_distribution(config, truthful, std::nullopt, max_universe),
        UtilityModel{preferred});
  }

  CoalitionSpec spec = CoalitionSpec::truthful(config, preferred);
  spec.kind = CoalitionSpec::Scripted;
  Evaluator eval(config, spec);
  const int h = static_cast<int>(eval.honest_positions().size());
  HonestUniverse uni(h, config.n);
  if (space.size() == 0) throw ConfigError("empty strategy space");
  if (uni.size() > max_universe / space.size())
    throw CapacityError("strategy enumeration exceeds the configured bound");

  std::vector<int> inputs(h), randoms(h);
  std::vector<long long> cond_total(h), cond_ones(h);
  std::vector<long long> uncond_total(h), uncond_ones(h);
  const long long points = static_cast<long long>(uni.size());
  report.best_utility = Fraction(-1);

  for (std::uint64_t s = 0; s < space.size(); ++s) {
    ForgeScript script = space.script_at(s);
    eval.set_script(&script);
    long long hits = 0, errors = 0;
    std::fill(cond_total.begin(), cond_total.end(), 0);
    std::fill(cond_ones.begin(), cond_ones.end(), 0);
    std::fill(uncond_total.begin(), uncond_total.end(), 0);
    std::fill(uncond_ones.begin(), uncond_ones.end(), 0);
    for (std::uint64_t idx = 0; idx < uni.size(); ++idx) {
      uni.decode(idx, inputs, randoms);
      OutcomeKind outcome = eval.evaluate(inputs, randoms);
      if (outcome == OutcomeKind::Erroneous) ++errors;
      if (static_cast<int>(outcome) == preferred) ++hits;
      for (int i = 0; i < h; ++i) {
        const auto& st = eval.stats()[i];
        if (!st.decided) continue;
        uncond_total[i]++;
        uncond_ones[i] += st.value;
        if (!st.self_elected) {
          cond_total[i]++;
          cond_ones[i] += st.value;
        }
        if (survey && st.rigged && st.self_elected) {
          survey->full_control_checks++;
          if (st.value != static_cast<int>(st.input_l & 1))
            survey->full_control_violations++;
        }
      }
    }
    Fraction utility(hits, points);
    if (utility > report.best_utility) {
      report.best_utility = utility;
      report.best_index = s;
      report.best_script = script;
    }
    if (survey) {
      survey->scripts++;
      if (errors > 0) survey->scripts_with_detection++;
      for (int i = 0; i < h; ++i) {
        if (cond_total[i] > 0) {
          survey->conditional_checks++;
          if (2 * cond_ones[i] != cond_total[i])
            survey->conditional_violations++;
        }
        if (eval.stats()[i].honest_upstream && uncond_total[i] > 0) {
          survey->unconditional_checks++;
          if (2 * uncond_ones[i] != uncond_total[i])
            survey->unconditional_violations++;
        }
      }
    }
    if (records)
      records->push_back(StrategyRecord{s, script.digest(), utility,
                                        Fraction(errors, points)});
  }
  report.scripts_evaluated = space.size();
  report.profitable = report.best_utility > report.baseline;
  return report;
}

// ---------------------------------------------------------------------------
// Adaptive policy search

AdaptiveSearchResult adaptive_policy_search(const RingConfig& config,
                                            int preferred) {
  auto targets = rig_targets(config);
  if (targets.empty())
    throw ConfigError("no honest node has a coalition upstream neighbor");

  struct FreeSlot {
    int target;
    int round;
    bool originator_honest;
    int options;  // honest: 4 input modes x 4 offsets; else 2 inputs x 2 randoms
  };
  std::vector<FreeSlot> slots;
  std::uint64_t total = 1;
  for (const auto& info : targets)
    for (const auto& [round, originator] : info.free_slots) {
      bool honest = config.roles[originator] == Role::Honest;
      int options = honest ? 4 * config.n : 4;
      slots.push_back(FreeSlot{info.position, round, honest, options});
      total *= static_cast<std::uint64_t>(options);
    }

  CoalitionSpec spec = CoalitionSpec::truthful(config, preferred);
  spec.kind = CoalitionSpec::Scripted;
  Evaluator eval(config, spec);
  const int h = static_cast<int>(eval.honest_positions().size());
  HonestUniverse uni(h, config.n);
  std::vector<int> inputs(h), randoms(h);

  ForgeScript script;
  for (const auto& info : targets)
    script.streams[info.position] =
        std::vector<SlotAction>(config.n - 1, SlotAction::pass());

  AdaptiveSearchResult result;
  result.policies = total;
  result.best_utility = Fraction(0);
  const long long points = static_cast<long long>(uni.size());
  for (std::uint64_t policy = 0; policy < total; ++policy) {
    std::uint64_t i = policy;
    for (const auto& slot : slots) {
      int opt = static_cast<int>(i % slot.options);
      i /= slot.options;
      SlotAction action;
      if (slot.originator_honest)
        action = SlotAction::echo(opt % 4, opt / 4);
      else
        action = SlotAction::forge(1'000'000 + 1000LL * slot.target + slot.round,
                                   opt % 2, opt / 2);
      script.streams[slot.target][slot.round - 1] = action;
    }
    eval.set_script(&script);
    long long hits = 0;
    for (std::uint64_t idx = 0; idx < uni.size(); ++idx) {
      uni.decode(idx, inputs, randoms);
      if (static_cast<int>(eval.evaluate(inputs, randoms)) == preferred) ++hits;
    }
    Fraction utility(hits, points);
    if (utility > result.best_utility) result.best_utility = utility;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo

MonteCarloResult monte_carlo(const RingConfig& config,
                             const CoalitionSpec& spec, std::uint64_t samples,
                             std::uint64_t seed) {
  if (samples == 0) throw ConfigError("sample count must be positive");
  Evaluator eval(config, spec);
  const int h = static_cast<int>(eval.honest_positions().size());
  std::vector<int> inputs(h), randoms(h);
  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < h; ++i) inputs[i] = static_cast<int>(rng() % 2);
    for (int i = 0; i < h; ++i)
      randoms[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(config.n));
    if (static_cast<int>(eval.evaluate(inputs, randoms)) == spec.preferred)
      ++hits;
  }
  MonteCarloResult result;
  result.samples = samples;
  result.seed = seed;
  result.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  result.std_error = std::sqrt(result.estimate * (1.0 - result.estimate) /
                               static_cast<double>(samples));
  return result;
}

}  // namespace ringlab
