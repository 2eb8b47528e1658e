#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ringlab/protocol.hpp"

namespace ringlab {

// A deterministic consensus rule viewed as a boolean function of all n
// declared inputs. table is indexed by the input bitmask (bit i = input of
// position i).
struct ConsensusFunction {
  int n = 0;
  std::vector<int> table;  // size 2^n, entries in {0,1}

  // Outputs are bits, the all-zero profile maps to 0 and the all-one
  // profile maps to 1.
  bool valid() const;

  int operator()(std::uint32_t mask) const { return table[mask]; }
  bool operator==(const ConsensusFunction& o) const {
    return n == o.n && table == o.table;
  }

  // Parity (n-way XOR) of all declared inputs.
  static ConsensusFunction parity(int n);

  // Truth table packed LSB-first as hex, e.g. 3-way XOR -> "96".
  std::string hex() const;
};

// The decision value a lone non-coalition node with input v_input is forced
// into when the n-1 input cheaters declare `ones` ones, assuming the rule is
// an equilibrium. Derived by backward induction on `ones`.
int forced_decision(int v_input, int ones, int n);

// Result of replaying the backward induction for ring size n. forced[o] =
// {decision for v_input=0, decision for v_input=1} at `ones` declared ones.
// Even n: the chain contradicts validity at the all-zero profile. Odd n: the
// constraints are consistent and pin the rule down to the n-way parity.
struct ConstraintReport {
  int n = 0;
  std::vector<std::array<int, 2>> forced;  // by ones(j) in [0, n-1]
  bool consistent = false;
  std::optional<ConsensusFunction> unique;  // odd n only
  int witness_v_input = -1;  // even n: profile clashing with validity
  int witness_ones = -1;
};

ConstraintReport derive_constraints(int n);

// Game-theoretic test: f is immune to input cheaters iff it is valid and, for
// every position v and preference bit b, declaring truthfully maximizes the
// probability (over v's uniform input) that the decision equals b -- for
// every true profile of the other n-1 inputs. Evaluated by definition.
bool is_input_cheater_equilibrium(const ConsensusFunction& f);

// Structural characterization: f is valid and for every position v the map
// y -> f(y with v<-0) + f(y with v<-1) is constant over the other inputs y.
// Must agree with is_input_cheater_equilibrium on every table.
bool constancy_characterization(const ConsensusFunction& f);

// All equilibrium rules among every 2^(2^n) truth table. Throws
// CapacityError for n > 4.
std::vector<ConsensusFunction> equilibrium_functions_bruteforce(int n);

}  // namespace ringlab
