#include <doctest.h>

#include <memory>
#include <set>

#include "ringlab/adversary.hpp"
#include "ringlab/analysis.hpp"

using namespace ringlab;

namespace {

// Run a scripted coalition configuration once with the given honest values.
Trace scripted_trace(const RingConfig& config, const ForgeScript& script,
                     const std::vector<int>& honest_inputs,
                     const std::vector<int>& honest_randoms, int preferred = 1) {
  CoalitionAssignment assignment;
  assignment.inputs.assign(config.n, 0);
  assignment.randoms.assign(config.n, 0);
  std::vector<std::unique_ptr<Behavior>> owned;
  std::vector<Behavior*> behaviors;
  size_t h = 0;
  for (int p = 0; p < config.n; ++p) {
    if (config.roles[p] == Role::Honest) {
      owned.push_back(std::make_unique<HonestBehavior>(
          config.node_ids[p], config.n, honest_inputs[h], honest_randoms[h]));
      ++h;
    } else {
      auto m = std::make_unique<CoalitionMember>(config, p, assignment,
                                                 preferred);
      m->set_script(&script);
      owned.push_back(std::move(m));
    }
    behaviors.push_back(owned.back().get());
  }
  return run_ring(config, behaviors);
}

ForgeScript all_pass_script(const RingConfig& config) {
  ForgeScript script;
  for (const auto& info : rig_targets(config))
    script.streams[info.position] =
        std::vector<SlotAction>(config.n - 1, SlotAction::pass());
  return script;
}

}  // namespace

TEST_CASE("input cheater declares a fabricated bit but plays the protocol") {
  auto config = RingConfig::honest_ring(4);
  config.roles[0] = Role::Coalition;
  auto cheater = make_input_cheater(config, 0, 1, 2);
  cheater.reset();
  auto msg = cheater.message_for_round(1, Receipts{});
  REQUIRE(msg.has_value());
  CHECK(msg->input == 1);  // declared, not the true input
  CHECK(msg->id == config.node_ids[0]);
}

TEST_CASE("truthful declaration is indistinguishable from honest play") {
  auto config = RingConfig::honest_ring(4);
  std::vector<int> inputs{1, 0, 1, 0}, randoms{0, 1, 2, 3};
  std::vector<std::unique_ptr<Behavior>> owned;
  std::vector<Behavior*> behaviors;
  for (int p = 0; p < 4; ++p) {
    owned.push_back(std::make_unique<HonestBehavior>(config.node_ids[p], 4,
                                                     inputs[p], randoms[p]));
    behaviors.push_back(owned.back().get());
  }
  std::string honest = run_ring(config, behaviors).to_json(config);

  auto declared = make_input_cheater(config, 0, inputs[0], randoms[0]);
  behaviors[0] = &declared;
  std::string cheating = run_ring(config, behaviors).to_json(config);
  CHECK(honest == cheating);
}

TEST_CASE("n-1 cheaters declaring 1 against input 1 force Decided(1)") {
  auto config = RingConfig::honest_ring(4);
  for (int p = 0; p < 3; ++p) config.roles[p] = Role::Coalition;
  CoalitionSpec spec =
      CoalitionSpec::input_cheaters(config, {1, 1, 1, 0}, 1);
  auto dist = exact_distribution(config, spec, std::vector<int>{1});
  // Honest inputs fixed to 1: every point decides 1.
  CHECK(dist.prob_decided(1) == Fraction(1));
}

TEST_CASE("view partition on the alternating arrangement") {
  auto config = RingConfig::two_honest(4, false);  // (c, u1, c, u2)
  auto script = all_pass_script(config);
  Trace trace = scripted_trace(config, script, {0, 1}, {0, 0});
  auto part = compute_view_partition(trace, config, 1);
  CHECK(part.m == 1);
  CHECK(part.truth_set.size() == 1);
  CHECK(part.lie_set.size() == 3);
}

TEST_CASE("view partition on the adjacent arrangement") {
  auto config = RingConfig::two_honest(4, true);  // (c, c, u1, u2)
  auto script = all_pass_script(config);
  Trace trace = scripted_trace(config, script, {1, 0}, {2, 1});
  auto part = compute_view_partition(trace, config, 3);  // u2
  CHECK(part.m == 2);
  CHECK(part.truth_set.size() == 2);
  CHECK(part.lie_set.size() == 2);
  // truth set carries u1's true triplet plus u2's own
  std::set<long long> ids;
  for (const auto& t : part.truth_set) ids.insert(t.id);
  CHECK(ids == std::set<long long>{config.node_ids[2], config.node_ids[3]});
  CHECK_THROWS_AS(compute_view_partition(trace, config, 0), ConfigError);
}

TEST_CASE("view partition is undefined without a coalition") {
  auto config = RingConfig::honest_ring(4);
  CHECK_THROWS_AS(config.truth_arc_length(0), ConfigError);
}

TEST_CASE("forged lie-slot inputs land in input_l") {
  auto config = RingConfig::two_honest(4, false);
  ForgeScript script = all_pass_script(config);
  // u1 (position 1) receives rounds 1..3; forge rounds 2 and 3 with inputs
  // (1,1); round 1 passes through the upstream member's truthful 0.
  script.streams[1][1] = SlotAction::forge(1001, 1, 0);
  script.streams[1][2] = SlotAction::forge(1002, 1, 2);
  Trace trace = scripted_trace(config, script, {0, 0}, {0, 0});
  auto part = compute_view_partition(trace, config, 1);
  CHECK(part.input_l == 2);
  CHECK(part.lie_set.size() == 3);
}

TEST_CASE("a script reusing the target's own id is detected") {
  auto config = RingConfig::two_honest(4, false);
  ForgeScript script = all_pass_script(config);
  script.streams[1][1] = SlotAction::forge(config.node_ids[1], 1, 0);
  CoalitionSpec spec = CoalitionSpec::scripted(config, script, 1);
  auto dist = exact_distribution(config, spec);
  CHECK(dist.prob(OutcomeKind::Erroneous) == Fraction(1));
}

TEST_CASE("parity rigger controls self-elected targets exactly") {
  for (int preferred = 0; preferred <= 1; ++preferred) {
    auto config = RingConfig::two_honest(4, false);
    ForgeScript script = parity_rigger(config, preferred);
    CoalitionSpec spec = CoalitionSpec::scripted(config, script, preferred);
    Evaluator eval(config, spec);
    HonestUniverse uni(2, 4);
    std::vector<int> inputs(2), randoms(2);
    int self_elections = 0;
    for (std::uint64_t idx = 0; idx < uni.size(); ++idx) {
      uni.decode(idx, inputs, randoms);
      eval.evaluate(inputs, randoms);
      for (const auto& st : eval.stats()) {
        REQUIRE(st.decided);
        if (st.self_elected) {
          ++self_elections;
          CHECK(st.value == preferred);
          CHECK(st.value == static_cast<int>(st.input_l & 1));
        }
      }
    }
    CHECK(self_elections > 0);
  }
}

TEST_CASE("parity rigger needs a riggable target") {
  auto config = RingConfig::honest_ring(4);
  CHECK_THROWS_AS(parity_rigger(config, 1), ConfigError);
}

TEST_CASE("forge script json round trip preserves semantics") {
  auto config = RingConfig::two_honest(4, false);
  ForgeScript script = parity_rigger(config, 1, StreamStyle::Case2Mirrored);
  ForgeScript back = ForgeScript::from_json(script.to_json());
  CHECK(script.digest() == back.digest());
  Trace a = scripted_trace(config, script, {1, 0}, {2, 3});
  Trace b = scripted_trace(config, back, {1, 0}, {2, 3});
  CHECK(a.to_json(config) == b.to_json(config));
}

TEST_CASE("rig target structure") {
  auto nonadj = rig_targets(RingConfig::two_honest(4, false));
  REQUIRE(nonadj.size() == 2);
  for (const auto& info : nonadj) {
    CHECK(info.forced_rounds.empty());
    CHECK(info.free_slots.size() == 3);
  }
  auto adj = rig_targets(RingConfig::two_honest(4, true));
  REQUIRE(adj.size() == 1);
  CHECK(adj[0].position == 2);
  // Round 3 content becomes the adjacent honest successor's own-return.
  CHECK(adj[0].forced_rounds == std::vector<int>{3});
  CHECK(adj[0].free_slots.size() == 2);
}

TEST_CASE("strategy space sizes match the independent product formula") {
  auto nonadj = RingConfig::two_honest(4, false);
  // Per target: 3 free slots (one honest-originated, two coalition-originated).
  // Fresh ids: (2*4)^6; mirrored: 4^3 shared randoms * 2^(3*2) inputs;
  // echo-true-ids: (2^1 * 8^2)^2.
  StrategySpace all(nonadj);
  CHECK(all.size() == 262144u + 4096u + 16384u);
  StrategySpace fresh(nonadj, {IdPattern::FreshDistinct});
  CHECK(fresh.size() == 262144u);
  StrategySpace mirrored(nonadj, {IdPattern::Mirrored});
  CHECK(mirrored.size() == 4096u);
  StrategySpace echo(nonadj, {IdPattern::EchoTrueIds});
  CHECK(echo.size() == 16384u);

  auto adj = RingConfig::two_honest(4, true);
  StrategySpace adj_all(adj);
  CHECK(adj_all.size() == 64u + 64u + 64u);
}

TEST_CASE("strategy space indexing is total and in range") {
  auto config = RingConfig::two_honest(4, true);
  StrategySpace space(config);
  std::set<std::uint64_t> digests;
  for (std::uint64_t i = 0; i < space.size(); ++i)
    digests.insert(space.script_at(i).digest());
  CHECK(digests.size() == space.size());  // every index a distinct script
  CHECK_THROWS_AS(space.script_at(space.size()), std::out_of_range);
}

TEST_CASE("echo slots reproduce the honest originator's true id") {
  auto config = RingConfig::two_honest(4, false);
  StrategySpace echo(config, {IdPattern::EchoTrueIds});
  ForgeScript script = echo.script_at(0);
  Trace trace = scripted_trace(config, script, {1, 0}, {2, 3});
  // u1's round-2 receipt nominally originates at honest u2 (position 3);
  // the echo carries u2's true id and random, with the scripted input.
  const auto& received = trace.nodes[1].received[1];
  REQUIRE(received.has_value());
  CHECK(received->id == config.node_ids[3]);
  CHECK(received->random == 3);
  CHECK(received->input == 0);
  for (int p : config.honest_positions())
    CHECK(trace.nodes[p].decision.kind == Decision::Decided);
}

TEST_CASE("mirrored streams present identical lie sets to both targets") {
  auto config = RingConfig::two_honest(4, false);
  StrategySpace mirrored(config, {IdPattern::Mirrored});
  ForgeScript script = mirrored.script_at(7);
  // Mirrored honest values complete the Case-3 symmetry.
  Trace trace = scripted_trace(config, script, {1, 1}, {2, 2});
  auto p1 = compute_view_partition(trace, config, 1);
  auto p2 = compute_view_partition(trace, config, 3);
  REQUIRE(p1.lie_set.size() == p2.lie_set.size());
  std::multiset<long long> ids1, ids2;
  for (const auto& t : p1.lie_set) ids1.insert(t.id);
  for (const auto& t : p2.lie_set) ids2.insert(t.id);
  CHECK(ids1 == ids2);
  CHECK(p1.random_l == p2.random_l);
}

TEST_CASE("echo on a coalition-originated slot is rejected") {
  auto config = RingConfig::two_honest(4, false);
  ForgeScript script = all_pass_script(config);
  // u1's round-1 slot nominally originates at coalition position 0; there is
  // no honest triplet to echo there.
  script.streams[1][0] = SlotAction::echo(SlotAction::Keep, 0);
  CHECK_THROWS_AS(scripted_trace(config, script, {0, 0}, {0, 0}),
                  std::logic_error);
}
