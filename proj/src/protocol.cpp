#include "ringlab/protocol.hpp"

#include <algorithm>

namespace ringlab {

std::pair<NodeState, Triplet> init_node(long long id, int input, int rand_value,
                                        int n) {
  if (n < 2) throw ConfigError("ring size must be >= 2");
  if (input != 0 && input != 1)
    throw ConfigError("honest input must be 0 or 1");
  if (rand_value < 0 || rand_value >= n)
    throw ConfigError("rand_value must lie in [0, n)");
  NodeState state;
  state.n = n;
  state.id = id;
  state.input = input;
  state.my_rand = rand_value;
  state.ids_array.reserve(n);
  state.ids_array.emplace_back(id, input);
  state.rand_sum = rand_value;
  state.input_sum = input;
  state.round = 0;
  return {std::move(state), Triplet{id, input, rand_value, nullptr}};
}

StepResult relay_step(NodeState& state, const std::optional<Triplet>& incoming) {
  if (state.round >= state.n - 1)
    throw std::logic_error("relay_step called after all relays done");
  if (!incoming || (incoming->input != 0 && incoming->input != 1))
    return StepResult::CheaterDetected;
  state.ids_array.emplace_back(incoming->id, incoming->input);
  state.rand_sum += incoming->random;
  state.input_sum += incoming->input;
  state.round += 1;
  return StepResult::Ok;
}

StepResult verify_own_return(NodeState& state,
                             const std::optional<Triplet>& incoming) {
  if (state.round != state.n - 1)
    throw std::logic_error("verify_own_return before all relays done");
  if (!incoming || incoming->input != state.input ||
      incoming->id != state.id || incoming->random != state.my_rand)
    return StepResult::CheaterDetected;
  state.round = state.n;
  return StepResult::Ok;
}

FinalizeResult finalize(const NodeState& state) {
  if (state.round != state.n ||
      state.ids_array.size() != static_cast<size_t>(state.n))
    throw std::logic_error("finalize on incomplete state");
  auto sorted = state.ids_array;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].first == sorted[i - 1].first)
      return FinalizeResult{Decision::cheater()};
  int index = static_cast<int>(state.rand_sum % state.n);
  const auto& leader = sorted[index];
  long long total = state.input_sum + leader.second;
  FinalizeResult result;
  result.decision = Decision::decided(static_cast<int>(total % 2));
  result.leader_id = leader.first;
  result.leader_input = leader.second;
  result.leader_index = index;
  return result;
}

}  // namespace ringlab
