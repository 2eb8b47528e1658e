#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ringlab/ring_sim.hpp"

namespace ringlab {

// What the coalition feeds into one receive slot of one honest target.
struct SlotAction {
  enum Kind {
    Forge,        // substitute a pre-scripted triplet
    PassThrough,  // deliver the originator's true triplet
    Echo,         // originator's true id, transformed input/random
  };
  enum EchoInput { Const0 = 0, Const1 = 1, Keep = 2, Flip = 3 };

  Kind kind = PassThrough;
  Triplet forged;            // Forge
  int echo_input = Const0;   // Echo
  int echo_random_offset = 0;

  static SlotAction forge(long long id, int input, int random) {
    SlotAction a;
    a.kind = Forge;
    a.forged = Triplet{id, input, random, nullptr};
    return a;
  }
  static SlotAction pass() { return SlotAction{}; }
  static SlotAction echo(int input_mode, int random_offset) {
    SlotAction a;
    a.kind = Echo;
    a.echo_input = input_mode;
    a.echo_random_offset = random_offset;
    return a;
  }
};

// Per honest target (keyed by ring position): one action per receive round
// 1..n-1. The target's round-n own-return is always delivered correctly;
// corrupting it guarantees detection and zero utility.
struct ForgeScript {
  std::map<int, std::vector<SlotAction>> streams;

  std::string to_json() const;
  static ForgeScript from_json(const std::string& text);
  std::uint64_t digest() const;
};

// True inputs/randoms by ring position; coalition entries are what the
// members would send if they played honestly (used for pass-through slots
// and for the truthful baseline).
struct CoalitionAssignment {
  std::vector<int> inputs;
  std::vector<int> randoms;
};

// Coalition member executing a ForgeScript. Knowledge of honest initial
// triplets is acquired strictly through the ring: either an untampered
// receipt whose upstream path is all honest, or a side-band attached by an
// upstream coalition member (one hop per round either way).
class CoalitionMember final : public Behavior {
 public:
  CoalitionMember(const RingConfig& config, int position,
                  const CoalitionAssignment& assignment, int preferred);

  void set_script(const ForgeScript* script) { script_ = script; }

  std::optional<Triplet> message_for_round(int round, Receipts receipts) override;
  Decision decide(Receipts receipts) override;
  void reset() override;

 private:
  void absorb(int upto_round, Receipts receipts);
  std::optional<Triplet> content_for_slot(const SlotAction& action,
                                          int originator) const;

  const RingConfig* cfg_;
  int pos_;
  const CoalitionAssignment* assign_;
  int preferred_;
  const ForgeScript* script_ = nullptr;
  std::vector<bool> authentic_at_dist_;  // receipt of round k is the true
                                         // triplet of its honest originator
  std::vector<std::optional<Triplet>> knowledge_;  // by position
  std::shared_ptr<const SideBand> snapshot_;
  bool snapshot_dirty_ = false;
  int processed_ = 0;
};

// Definition-4 deviation: protocol-compliant except for the declared input.
HonestBehavior make_input_cheater(const RingConfig& config, int position,
                                  int declared, int rand_value);

// The Lie/Truth split of an honest node's view.
struct ViewPartition {
  int m = 0;  // |R(v,u)|, u included
  std::vector<Triplet> truth_set;  // honest-arc receipts plus u's own triplet
  std::vector<Triplet> lie_set;    // coalition-controlled receipts
  long long input_t = 0, input_l = 0;
  long long random_t = 0, random_l = 0;
};

ViewPartition compute_view_partition(const Trace& trace,
                                     const RingConfig& config, int u);
ViewPartition compute_view_partition(Receipts receipts, const Triplet& own,
                                     const RingConfig& config, int u);

enum class StreamStyle {
  Case1Fresh,     // per-target fresh ids, decisions decoupled
  Case2Mirrored,  // echo true honest ids/randoms, mirror coalition slots
};

// Scripts whose forged Lie inputs have the preferred parity, so a rigged
// target that elects itself decides the preferred bit.
ForgeScript parity_rigger(const RingConfig& config, int preferred,
                          StreamStyle style = StreamStyle::Case1Fresh);

enum class IdPattern { FreshDistinct, Mirrored, EchoTrueIds };

// An honest node whose upstream neighbor is a coalition member, together
// with the structure of its receive slots. forced_rounds are slots whose
// content a downstream honest node will later consume as its own-return;
// they are pinned to pass-through. free_slots are (round, originator) pairs
// the coalition may fill at will.
struct RigTarget {
  int position = 0;
  std::vector<int> forced_rounds;
  std::vector<std::pair<int, int>> free_slots;
};

std::vector<RigTarget> rig_targets(const RingConfig& config);

// Index-addressable space of fixed coalition strategies: every combination
// of forged input bits and forged randoms over the free Lie slots, under
// each requested id pattern. Slots that a downstream honest node will later
// consume as its own-return are pinned to pass-through.
class StrategySpace {
 public:
  StrategySpace(const RingConfig& config,
                std::vector<IdPattern> patterns = {IdPattern::FreshDistinct,
                                                  IdPattern::Mirrored,
                                                  IdPattern::EchoTrueIds});

  std::uint64_t size() const { return total_; }
  ForgeScript script_at(std::uint64_t index) const;
  const RingConfig& config() const { return *cfg_; }
  const std::vector<int>& targets() const { return targets_; }

 private:
  struct Slot {
    int target;
    int round;       // receive round at the target
    int originator;  // ring position the slot nominally comes from
    bool originator_honest;
  };
  struct Sub {
    IdPattern pattern;
    std::uint64_t size = 0;
  };

  ForgeScript base_script() const;  // forced pass-through slots only

  const RingConfig* cfg_;
  std::vector<int> targets_;
  std::vector<std::vector<Slot>> free_slots_;    // per target
  std::vector<std::vector<int>> forced_rounds_;  // per target
  std::vector<Sub> subs_;
  std::uint64_t total_ = 0;
};

}  // namespace ringlab
