#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ringlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SideBand;  // coalition side-channel riding on relayed messages; the
                  // protocol itself never reads it

// The <id, input, random> record circulated on the ring. Honest nodes
// initialize input in {0,1} and random in [0,n); forged triplets may carry
// an out-of-range input, which the relay check must catch.
struct Triplet {
  long long id = 0;
  int input = 0;
  int random = 0;
  std::shared_ptr<const SideBand> sideband;

  bool operator==(const Triplet& o) const {
    return id == o.id && input == o.input && random == o.random;
  }
  bool operator!=(const Triplet& o) const { return !(*this == o); }
};

struct Decision {
  enum Kind { Decided, CheaterDetected };
  Kind kind = CheaterDetected;
  int value = 0;  // meaningful only when kind == Decided

  static Decision decided(int bit) { return {Decided, bit}; }
  static Decision cheater() { return {CheaterDetected, 0}; }

  bool operator==(const Decision& o) const {
    return kind == o.kind && (kind == CheaterDetected || value == o.value);
  }
  bool operator!=(const Decision& o) const { return !(*this == o); }
};

// Per-node protocol state. Sums are kept as plain integers without modular
// reduction; only finalize() reduces them.
struct NodeState {
  int n = 0;
  long long id = 0;
  int input = 0;
  int my_rand = 0;
  std::vector<std::pair<long long, int>> ids_array;  // (id, input), arrival order
  long long rand_sum = 0;
  long long input_sum = 0;
  int round = 0;

  Triplet own_triplet() const { return Triplet{id, input, my_rand, nullptr}; }
};

enum class StepResult { Ok, CheaterDetected };

struct FinalizeResult {
  Decision decision;
  long long leader_id = 0;
  int leader_input = 0;
  int leader_index = 0;  // index into the id-sorted array
};

// Lines 1-5: seed state and produce the round-1 outgoing triplet.
// Throws ConfigError on input outside {0,1} or rand_value outside [0,n).
std::pair<NodeState, Triplet> init_node(long long id, int input, int rand_value,
                                        int n);

// Lines 6-14: one relay. On Ok the incoming triplet is recorded and must be
// forwarded unchanged by the caller. CheaterDetected iff the message is
// absent or its input is not a bit.
StepResult relay_step(NodeState& state, const std::optional<Triplet>& incoming);

// Lines 15-17: the node's own triplet must come back componentwise intact.
StepResult verify_own_return(NodeState& state,
                             const std::optional<Triplet>& incoming);

// Lines 18-26: sort by id, reject duplicates, elect ids_array[rand_sum % n]
// and add the leader's input a second time before taking the parity.
FinalizeResult finalize(const NodeState& state);

}  // namespace ringlab
