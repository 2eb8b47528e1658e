#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringlab/protocol.hpp"

namespace ringlab {

// Data a coalition member smuggles alongside a message (think: spare bits of
// an unbounded forged id). Honest relays forward messages verbatim, so the
// payload travels the ring at one hop per round; that is exactly the timing
// the protocol's own messages obey.
struct SideBand {
  std::vector<std::pair<int, Triplet>> known;  // position -> initial triplet
};

enum class Role { Honest, Coalition };

struct RingConfig {
  int n = 0;
  std::vector<long long> node_ids;  // by ring position; position p sends to p+1 mod n
  std::vector<Role> roles;

  static RingConfig honest_ring(int n);
  // Two honest nodes among an n-2 coalition. adjacent=false places them
  // opposite (positions 1 and 1+n/2), adjacent=true at the last two positions.
  static RingConfig two_honest(int n, bool adjacent);

  void validate() const;  // throws ConfigError
  int honest_count() const;
  std::vector<int> honest_positions() const;
  bool has_coalition() const;
  // Ring distance m from u back to the closest upstream coalition member
  // (|R(v,u)| including u itself). Throws if the coalition is empty.
  int truth_arc_length(int u) const;
};

using Receipts = std::span<const std::optional<Triplet>>;

// A node's message policy. The round-r message may depend only on messages
// received strictly before round r.
class Behavior {
 public:
  virtual ~Behavior() = default;
  // round in [1, n]; receipts holds the messages of rounds 1..round-1.
  virtual std::optional<Triplet> message_for_round(int round,
                                                   Receipts receipts) = 0;
  // Called once after round n with all n receipts.
  virtual Decision decide(Receipts receipts) = 0;
  virtual void reset() = 0;
};

class HonestBehavior final : public Behavior {
 public:
  HonestBehavior(long long id, int n, int input, int rand_value);

  std::optional<Triplet> message_for_round(int round, Receipts receipts) override;
  Decision decide(Receipts receipts) override;
  void reset() override;
  void reset(int input, int rand_value);

  bool detected_cheater() const { return detected_; }
  // Valid after decide() returned a Decided value.
  const FinalizeResult& finalize_info() const { return finalize_; }
  const NodeState& state() const { return state_; }

 private:
  long long id_;
  int n_;
  int input_;
  int rand_;
  NodeState state_;
  bool detected_ = false;
  FinalizeResult finalize_{};
};

struct Trace {
  struct PerNode {
    std::vector<std::optional<Triplet>> sent;      // index r-1 -> round r
    std::vector<std::optional<Triplet>> received;  // index r-1 -> round r
    Decision decision;
    bool cheater_reported = false;
    std::optional<FinalizeResult> finalize;  // honest nodes that decided
  };
  int n = 0;
  std::vector<PerNode> nodes;

  std::string to_json(const RingConfig& config) const;
};

// Synchronous lockstep execution: n rounds of simultaneous send-then-receive.
// Pure in (config, behaviors); behaviors are reset() before round 1.
Trace run_ring(const RingConfig& config,
               std::span<Behavior* const> behaviors);

// Same schedule without trace bookkeeping; decisions land in `out` (size n).
// Honest finalize info is retrievable from the behaviors afterwards.
void run_decisions(const RingConfig& config,
                   std::span<Behavior* const> behaviors,
                   std::span<Decision> out);

}  // namespace ringlab
