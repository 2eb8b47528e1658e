#include "ringlab/adversary.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace ringlab {

namespace {

long long fresh_id(int target, int round) {
  return 1'000'000 + 1000LL * target + round;
}
long long mirror_id(int slot_index) { return 2'000'000 + slot_index; }

}  // namespace

// ---------------------------------------------------------------------------
// ForgeScript serialization

std::string ForgeScript::to_json() const {
  nlohmann::json doc;
  for (const auto& [target, actions] : streams) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& a : actions) {
      switch (a.kind) {
        case SlotAction::Forge:
          list.push_back({{"kind", "forge"},
                          {"id", a.forged.id},
                          {"input", a.forged.input},
                          {"random", a.forged.random}});
          break;
        case SlotAction::PassThrough:
          list.push_back({{"kind", "pass"}});
          break;
        case SlotAction::Echo:
          list.push_back({{"kind", "echo"},
                          {"input_mode", a.echo_input},
                          {"random_offset", a.echo_random_offset}});
          break;
      }
    }
    doc[std::to_string(target)] = list;
  }
  return doc.dump();
}

ForgeScript ForgeScript::from_json(const std::string& text) {
  ForgeScript script;
  auto doc = nlohmann::json::parse(text);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    int target = std::stoi(it.key());
    std::vector<SlotAction> actions;
    for (const auto& entry : it.value()) {
      std::string kind = entry.at("kind");
      if (kind == "forge")
        actions.push_back(SlotAction::forge(entry.at("id"), entry.at("input"),
                                            entry.at("random")));
      else if (kind == "pass")
        actions.push_back(SlotAction::pass());
      else if (kind == "echo")
        actions.push_back(
            SlotAction::echo(entry.at("input_mode"), entry.at("random_offset")));
      else
        throw ConfigError("unknown slot action kind: " + kind);
    }
    script.streams[target] = std::move(actions);
  }
  return script;
}

std::uint64_t ForgeScript::digest() const {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (char c : to_json()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// CoalitionMember

CoalitionMember::CoalitionMember(const RingConfig& config, int position,
                                 const CoalitionAssignment& assignment,
                                 int preferred)
    : cfg_(&config),
      pos_(position),
      assign_(&assignment),
      preferred_(preferred) {
  if (config.roles[position] != Role::Coalition)
    throw ConfigError("CoalitionMember placed on an honest position");
  const int n = cfg_->n;
  authentic_at_dist_.assign(n, false);
  for (int k = 1; k < n; ++k) {
    int originator = (pos_ - k % n + n) % n;
    if (cfg_->roles[originator] != Role::Honest) continue;
    bool clean = true;
    for (int j = 1; j < k; ++j)
      if (cfg_->roles[(pos_ - j + n) % n] == Role::Coalition) clean = false;
    authentic_at_dist_[k] = clean;
  }
  knowledge_.resize(n);
}

void CoalitionMember::reset() {
  std::fill(knowledge_.begin(), knowledge_.end(), std::nullopt);
  snapshot_.reset();
  snapshot_dirty_ = false;
  processed_ = 0;
}

void CoalitionMember::absorb(int upto_round, Receipts receipts) {
  const int n = cfg_->n;
  for (int k = processed_ + 1; k <= upto_round; ++k) {
    const auto& msg = receipts[k - 1];
    if (!msg) continue;
    if (msg->sideband) {
      for (const auto& [p, t] : msg->sideband->known)
        if (!knowledge_[p]) {
          knowledge_[p] = t;
          snapshot_dirty_ = true;
        }
    }
    if (authentic_at_dist_[k]) {
      int originator = (pos_ - k + n) % n;
      if (!knowledge_[originator]) {
        knowledge_[originator] = Triplet{msg->id, msg->input, msg->random, nullptr};
        snapshot_dirty_ = true;
      }
    }
  }
  processed_ = std::max(processed_, upto_round);
}

std::optional<Triplet> CoalitionMember::content_for_slot(
    const SlotAction& action, int originator) const {
  switch (action.kind) {
    case SlotAction::Forge:
      return action.forged;
    case SlotAction::PassThrough:
      if (cfg_->roles[originator] == Role::Coalition)
        return Triplet{cfg_->node_ids[originator], assign_->inputs[originator],
                       assign_->randoms[originator], nullptr};
      return knowledge_[originator];
    case SlotAction::Echo: {
      if (cfg_->roles[originator] != Role::Honest)
        throw std::logic_error("echo slot needs an honest originator");
      const auto& base = knowledge_[originator];
      if (!base) return std::nullopt;
      int input = 0;
      switch (action.echo_input) {
        case SlotAction::Const0: input = 0; break;
        case SlotAction::Const1: input = 1; break;
        case SlotAction::Keep: input = base->input; break;
        case SlotAction::Flip: input = 1 - base->input; break;
      }
      return Triplet{base->id, input,
                     (base->random + action.echo_random_offset) % cfg_->n,
                     nullptr};
    }
  }
  return std::nullopt;
}

std::optional<Triplet> CoalitionMember::message_for_round(int round,
                                                          Receipts receipts) {
  const int n = cfg_->n;
  absorb(round - 1, receipts);

  std::optional<Triplet> msg;
  int downstream = (pos_ + 1) % n;
  if (cfg_->roles[downstream] == Role::Honest) {
    int target = downstream;
    if (round <= n - 1) {
      const std::vector<SlotAction>* stream = nullptr;
      if (script_) {
        auto it = script_->streams.find(target);
        if (it != script_->streams.end()) stream = &it->second;
      }
      SlotAction action =
          stream ? (*stream)[round - 1] : SlotAction::pass();
      int originator = (target - round + 2 * n) % n;
      msg = content_for_slot(action, originator);
    } else {
      msg = knowledge_[target];  // the target's own-return, always correct
    }
  } else {
    // Feeding a fellow coalition member: content is irrelevant, the message
    // only exists as a side-band carrier.
    msg = Triplet{cfg_->node_ids[pos_], assign_->inputs[pos_],
                  assign_->randoms[pos_], nullptr};
  }

  if (msg) {
    bool any = false;
    for (const auto& k : knowledge_)
      if (k) any = true;
    if (any) {
      if (snapshot_dirty_ || !snapshot_) {
        auto s = std::make_shared<SideBand>();
        for (int p = 0; p < n; ++p)
          if (knowledge_[p]) s->known.emplace_back(p, *knowledge_[p]);
        snapshot_ = std::move(s);
        snapshot_dirty_ = false;
      }
      msg->sideband = snapshot_;
    }
  }
  return msg;
}

Decision CoalitionMember::decide(Receipts) {
  return Decision::decided(preferred_);
}

HonestBehavior make_input_cheater(const RingConfig& config, int position,
                                  int declared, int rand_value) {
  return HonestBehavior(config.node_ids[position], config.n, declared,
                        rand_value);
}

// ---------------------------------------------------------------------------
// View partition

ViewPartition compute_view_partition(Receipts receipts, const Triplet& own,
                                     const RingConfig& config, int u) {
  if (!config.has_coalition())
    throw ConfigError("view partition undefined without a coalition");
  ViewPartition part;
  part.m = config.truth_arc_length(u);
  part.truth_set.push_back(own);
  part.input_t = own.input;
  part.random_t = own.random;
  for (int r = 1; r <= config.n - 1; ++r) {
    const auto& msg = receipts[r - 1];
    if (!msg) continue;
    Triplet t{msg->id, msg->input, msg->random, nullptr};
    if (r <= part.m - 1) {
      part.truth_set.push_back(t);
      part.input_t += t.input;
      part.random_t += t.random;
    } else {
      part.lie_set.push_back(t);
      part.input_l += t.input;
      part.random_l += t.random;
    }
  }
  return part;
}

ViewPartition compute_view_partition(const Trace& trace,
                                     const RingConfig& config, int u) {
  if (config.roles[u] != Role::Honest)
    throw ConfigError("view partition is defined for honest nodes");
  const auto& received = trace.nodes[u].received;
  Triplet own{config.node_ids[u], 0, 0, nullptr};
  if (trace.nodes[u].sent[0]) own = *trace.nodes[u].sent[0];
  return compute_view_partition(
      Receipts(received.data(), config.n), own, config, u);
}

// ---------------------------------------------------------------------------
// Target/slot structure shared by the rigger and the strategy space

std::vector<RigTarget> rig_targets(const RingConfig& config) {
  const int n = config.n;
  std::vector<RigTarget> out;
  for (int u = 0; u < n; ++u) {
    if (config.roles[u] != Role::Honest) continue;
    if (config.roles[(u - 1 + n) % n] != Role::Coalition) continue;
    RigTarget info;
    info.position = u;
    int chain = 1;  // contiguous honest run starting at u
    while (config.roles[(u + chain) % n] == Role::Honest) ++chain;
    std::vector<bool> forced(n, false);
    for (int k = 1; k < chain; ++k) {
      forced[n - k] = true;  // becomes the own-return of the k-th successor
      info.forced_rounds.push_back(n - k);
    }
    for (int r = 1; r <= n - 1; ++r)
      if (!forced[r]) info.free_slots.emplace_back(r, (u - r + 2 * n) % n);
    out.push_back(std::move(info));
  }
  return out;
}

namespace {

std::vector<SlotAction> blank_stream(const RingConfig& config) {
  return std::vector<SlotAction>(config.n - 1, SlotAction::pass());
}

}  // namespace

ForgeScript parity_rigger(const RingConfig& config, int preferred,
                          StreamStyle style) {
  auto targets = rig_targets(config);
  if (targets.empty())
    throw ConfigError("no honest node has a coalition upstream neighbor");
  ForgeScript script;
  for (const auto& info : targets) {
    auto stream = blank_stream(config);
    int mirror_index = 0;
    bool parity_placed = false;
    for (const auto& [round, originator] : info.free_slots) {
      if (style == StreamStyle::Case1Fresh) {
        int input = parity_placed ? 0 : (preferred & 1);
        parity_placed = true;
        stream[round - 1] =
            SlotAction::forge(fresh_id(info.position, round), input, 0);
      } else {
        if (config.roles[originator] == Role::Honest) {
          stream[round - 1] = SlotAction::echo(SlotAction::Const0, 0);
        } else {
          int input = parity_placed ? 0 : (preferred & 1);
          parity_placed = true;
          stream[round - 1] =
              SlotAction::forge(mirror_id(mirror_index), input, 0);
          ++mirror_index;
        }
      }
    }
    script.streams[info.position] = std::move(stream);
  }
  return script;
}

// ---------------------------------------------------------------------------
// StrategySpace

StrategySpace::StrategySpace(const RingConfig& config,
                             std::vector<IdPattern> patterns)
    : cfg_(&config) {
  auto infos = rig_targets(config);
  for (const auto& info : infos) {
    targets_.push_back(info.position);
    forced_rounds_.push_back(info.forced_rounds);
    std::vector<Slot> slots;
    for (const auto& [round, originator] : info.free_slots)
      slots.push_back(Slot{info.position, round, originator,
                           config.roles[originator] == Role::Honest});
    free_slots_.push_back(std::move(slots));
  }

  const std::uint64_t two_n = 2ULL * config.n;
  for (IdPattern pattern : patterns) {
    Sub sub{pattern, 0};
    if (targets_.empty()) {
      subs_.push_back(sub);
      continue;
    }
    switch (pattern) {
      case IdPattern::FreshDistinct: {
        std::uint64_t size = 1;
        for (const auto& slots : free_slots_)
          for (size_t i = 0; i < slots.size(); ++i) size *= two_n;
        sub.size = size;
        break;
      }
      case IdPattern::Mirrored: {
        size_t J = free_slots_[0].size();
        bool aligned = true;
        for (const auto& slots : free_slots_)
          if (slots.size() != J) aligned = false;
        if (aligned) {
          std::uint64_t size = 1;
          for (size_t j = 0; j < J; ++j) size *= config.n;
          for (size_t t = 0; t < targets_.size(); ++t)
            for (size_t j = 0; j < J; ++j) size *= 2;
          sub.size = size;
        }
        break;
      }
      case IdPattern::EchoTrueIds: {
        std::uint64_t size = 1;
        for (const auto& slots : free_slots_)
          for (const auto& slot : slots) size *= slot.originator_honest ? 2 : two_n;
        sub.size = size;
        break;
      }
    }
    subs_.push_back(sub);
    total_ += sub.size;
  }
}

ForgeScript StrategySpace::base_script() const {
  ForgeScript script;
  for (size_t t = 0; t < targets_.size(); ++t)
    script.streams[targets_[t]] =
        std::vector<SlotAction>(cfg_->n - 1, SlotAction::pass());
  return script;
}

ForgeScript StrategySpace::script_at(std::uint64_t index) const {
  if (index >= total_) throw std::out_of_range("strategy index");
  const Sub* sub = nullptr;
  for (const auto& s : subs_) {
    if (index < s.size) {
      sub = &s;
      break;
    }
    index -= s.size;
  }
  const int n = cfg_->n;
  ForgeScript script = base_script();
  std::uint64_t i = index;
  switch (sub->pattern) {
    case IdPattern::FreshDistinct: {
      for (size_t t = 0; t < targets_.size(); ++t)
        for (const auto& slot : free_slots_[t]) {
          int input = static_cast<int>(i % 2);
          i /= 2;
          int random = static_cast<int>(i % n);
          i /= n;
          script.streams[slot.target][slot.round - 1] =
              SlotAction::forge(fresh_id(slot.target, slot.round), input, random);
        }
      break;
    }
    case IdPattern::Mirrored: {
      size_t J = free_slots_[0].size();
      std::vector<int> randoms(J);
      for (size_t j = 0; j < J; ++j) {
        randoms[j] = static_cast<int>(i % n);
        i /= n;
      }
      for (size_t t = 0; t < targets_.size(); ++t)
        for (size_t j = 0; j < J; ++j) {
          int input = static_cast<int>(i % 2);
          i /= 2;
          const auto& slot = free_slots_[t][j];
          script.streams[slot.target][slot.round - 1] = SlotAction::forge(
              mirror_id(static_cast<int>(j)), input, randoms[j]);
        }
      break;
    }
    case IdPattern::EchoTrueIds: {
      for (size_t t = 0; t < targets_.size(); ++t)
        for (const auto& slot : free_slots_[t]) {
          if (slot.originator_honest) {
            int bit = static_cast<int>(i % 2);
            i /= 2;
            script.streams[slot.target][slot.round - 1] = SlotAction::echo(
                bit ? SlotAction::Const1 : SlotAction::Const0, 0);
          } else {
            int input = static_cast<int>(i % 2);
            i /= 2;
            int random = static_cast<int>(i % n);
            i /= n;
            script.streams[slot.target][slot.round - 1] = SlotAction::forge(
                cfg_->node_ids[slot.originator], input, random);
          }
        }
      break;
    }
  }
  return script;
}

}  // namespace ringlab
