#include "ringlab/ring_sim.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace ringlab {

RingConfig RingConfig::honest_ring(int n) {
  RingConfig c;
  c.n = n;
  for (int p = 0; p < n; ++p) c.node_ids.push_back(p + 1);
  c.roles.assign(n, Role::Honest);
  c.validate();
  return c;
}

RingConfig RingConfig::two_honest(int n, bool adjacent) {
  if (n < 4 || n % 2 != 0)
    throw ConfigError("two_honest requires even n >= 4");
  RingConfig c;
  c.n = n;
  for (int p = 0; p < n; ++p) c.node_ids.push_back(p + 1);
  c.roles.assign(n, Role::Coalition);
  if (adjacent) {
    c.roles[n - 2] = Role::Honest;
    c.roles[n - 1] = Role::Honest;
  } else {
    c.roles[1] = Role::Honest;
    c.roles[1 + n / 2] = Role::Honest;
  }
  c.validate();
  return c;
}

void RingConfig::validate() const {
  if (n < 2) throw ConfigError("ring size must be >= 2");
  if (node_ids.size() != static_cast<size_t>(n) ||
      roles.size() != static_cast<size_t>(n))
    throw ConfigError("config arrays must have length n");
  std::set<long long> seen(node_ids.begin(), node_ids.end());
  if (seen.size() != node_ids.size())
    throw ConfigError("node ids must be pairwise distinct");
}

int RingConfig::honest_count() const {
  return static_cast<int>(
      std::count(roles.begin(), roles.end(), Role::Honest));
}

std::vector<int> RingConfig::honest_positions() const {
  std::vector<int> out;
  for (int p = 0; p < n; ++p)
    if (roles[p] == Role::Honest) out.push_back(p);
  return out;
}

bool RingConfig::has_coalition() const {
  return std::find(roles.begin(), roles.end(), Role::Coalition) != roles.end();
}

int RingConfig::truth_arc_length(int u) const {
  if (!has_coalition())
    throw ConfigError("truth arc undefined without a coalition");
  for (int m = 1; m < n; ++m)
    if (roles[(u - m + n * n) % n] == Role::Coalition) return m;
  throw ConfigError("unreachable");
}

HonestBehavior::HonestBehavior(long long id, int n, int input, int rand_value)
    : id_(id), n_(n), input_(input), rand_(rand_value) {
  reset();
}

void HonestBehavior::reset() {
  state_ = init_node(id_, input_, rand_, n_).first;
  detected_ = false;
  finalize_ = FinalizeResult{};
}

void HonestBehavior::reset(int input, int rand_value) {
  input_ = input;
  rand_ = rand_value;
  reset();
}

std::optional<Triplet> HonestBehavior::message_for_round(int round,
                                                         Receipts receipts) {
  if (detected_) return std::nullopt;  // REPORT CHEATER: the node goes silent
  if (round == 1) return state_.own_triplet();
  const auto& incoming = receipts[round - 2];
  if (relay_step(state_, incoming) == StepResult::CheaterDetected) {
    detected_ = true;
    return std::nullopt;
  }
  return incoming;
}

Decision HonestBehavior::decide(Receipts receipts) {
  if (detected_) return Decision::cheater();
  if (verify_own_return(state_, receipts[n_ - 1]) ==
      StepResult::CheaterDetected) {
    detected_ = true;
    return Decision::cheater();
  }
  finalize_ = finalize(state_);
  if (finalize_.decision.kind == Decision::CheaterDetected) detected_ = true;
  return finalize_.decision;
}

namespace {

template <typename PerRound, typename PerDecision>
void run_lockstep(const RingConfig& config,
                  std::span<Behavior* const> behaviors, PerRound&& per_round,
                  PerDecision&& per_decision) {
  const int n = config.n;
  if (behaviors.size() != static_cast<size_t>(n))
    throw ConfigError("need one behavior per position");
  for (auto* b : behaviors) b->reset();

  std::vector<std::optional<Triplet>> receipts(
      static_cast<size_t>(n) * n);  // [p*n + r-1]
  std::vector<std::optional<Triplet>> sent(n);
  for (int r = 1; r <= n; ++r) {
    for (int p = 0; p < n; ++p)
      sent[p] = behaviors[p]->message_for_round(
          r, Receipts(&receipts[static_cast<size_t>(p) * n], r - 1));
    for (int p = 0; p < n; ++p)
      receipts[static_cast<size_t>(p) * n + r - 1] = sent[(p + n - 1) % n];
    per_round(r, sent, receipts);
  }
  for (int p = 0; p < n; ++p)
    per_decision(p, behaviors[p]->decide(Receipts(
                        &receipts[static_cast<size_t>(p) * n], n)));
}

}  // namespace

Trace run_ring(const RingConfig& config, std::span<Behavior* const> behaviors) {
  Trace trace;
  trace.n = config.n;
  trace.nodes.resize(config.n);
  for (auto& node : trace.nodes) {
    node.sent.resize(config.n);
    node.received.resize(config.n);
  }
  run_lockstep(
      config, behaviors,
      [&](int r, const std::vector<std::optional<Triplet>>& sent,
          const std::vector<std::optional<Triplet>>& receipts) {
        for (int p = 0; p < config.n; ++p) {
          trace.nodes[p].sent[r - 1] = sent[p];
          trace.nodes[p].received[r - 1] =
              receipts[static_cast<size_t>(p) * config.n + r - 1];
        }
      },
      [&](int p, Decision d) {
        trace.nodes[p].decision = d;
        trace.nodes[p].cheater_reported = (d.kind == Decision::CheaterDetected);
        if (config.roles[p] == Role::Honest && d.kind == Decision::Decided) {
          if (auto* h = dynamic_cast<HonestBehavior*>(behaviors[p]))
            trace.nodes[p].finalize = h->finalize_info();
        }
      });
  return trace;
}

void run_decisions(const RingConfig& config,
                   std::span<Behavior* const> behaviors,
                   std::span<Decision> out) {
  run_lockstep(
      config, behaviors, [](int, const auto&, const auto&) {},
      [&](int p, Decision d) { out[p] = d; });
}

namespace {

nlohmann::json triplet_json(const std::optional<Triplet>& t) {
  if (!t) return nullptr;
  return {{"id", t->id}, {"input", t->input}, {"random", t->random}};
}

}  // namespace

std::string Trace::to_json(const RingConfig& config) const {
  nlohmann::json rounds = nlohmann::json::array();
  for (int r = 1; r <= n; ++r)
    for (int p = 0; p < n; ++p)
      rounds.push_back({{"round", r},
                        {"position", p},
                        {"sent", triplet_json(nodes[p].sent[r - 1])},
                        {"received", triplet_json(nodes[p].received[r - 1])}});
  nlohmann::json decisions = nlohmann::json::array();
  for (int p = 0; p < n; ++p) {
    nlohmann::json d;
    d["position"] = p;
    d["role"] = config.roles[p] == Role::Honest ? "honest" : "coalition";
    if (nodes[p].decision.kind == Decision::Decided)
      d["decision"] = nodes[p].decision.value;
    else
      d["decision"] = "cheater_detected";
    decisions.push_back(d);
  }
  nlohmann::json doc;
  doc["n"] = n;
  doc["rounds"] = rounds;
  doc["decisions"] = decisions;
  return doc.dump(2);
}

}  // namespace ringlab
