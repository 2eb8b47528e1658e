#include <doctest.h>

#include "ringlab/impossibility.hpp"

using namespace ringlab;

TEST_CASE("forced decisions follow the backward induction") {
  // Even ring: the lone outsider is forced to ¬(input ⊕ parity-of-ones).
  CHECK(forced_decision(1, 3, 4) == 1);  // validity anchor, all ones
  CHECK(forced_decision(0, 3, 4) == 0);
  CHECK(forced_decision(1, 2, 4) == 0);
  CHECK(forced_decision(0, 0, 4) == 1);  // clashes with validity at all-zero
  // Odd ring: input ⊕ parity-of-ones, compatible with validity.
  CHECK(forced_decision(1, 2, 3) == 1);
  CHECK(forced_decision(0, 0, 3) == 0);
  CHECK(forced_decision(0, 1, 3) == 1);
  CHECK_THROWS_AS(forced_decision(2, 0, 4), ConfigError);
  CHECK_THROWS_AS(forced_decision(0, 4, 4), ConfigError);
}

TEST_CASE("constraint derivation: contradiction for even n, parity for odd") {
  for (int n = 2; n <= 12; ++n) {
    auto report = derive_constraints(n);
    if (n % 2 == 0) {
      CHECK_FALSE(report.consistent);
      CHECK(report.witness_v_input == 0);
      CHECK(report.witness_ones == 0);
      CHECK_FALSE(report.unique.has_value());
    } else {
      CHECK(report.consistent);
      REQUIRE(report.unique.has_value());
      CHECK(*report.unique == ConsensusFunction::parity(n));
    }
  }
}

TEST_CASE("parity tables and hex encoding") {
  auto xor3 = ConsensusFunction::parity(3);
  CHECK(xor3.valid());
  CHECK(xor3.hex() == "96");
  CHECK(xor3.table == std::vector<int>{0, 1, 1, 0, 1, 0, 0, 1});
  CHECK(ConsensusFunction::parity(4).valid() == false);  // all-ones -> 0
}

TEST_CASE("brute force: none for n=2 and n=4, exactly XOR for n=3") {
  CHECK(equilibrium_functions_bruteforce(2).empty());
  auto three = equilibrium_functions_bruteforce(3);
  REQUIRE(three.size() == 1);
  CHECK(three.front() == ConsensusFunction::parity(3));
  CHECK(equilibrium_functions_bruteforce(4).empty());
  CHECK_THROWS_AS(equilibrium_functions_bruteforce(5), CapacityError);
}

TEST_CASE("definitional and structural equilibrium tests agree on all tables") {
  for (int n = 1; n <= 3; ++n) {
    const std::uint32_t entries = 1u << n;
    for (std::uint64_t code = 0; code < (1ULL << entries); ++code) {
      ConsensusFunction f;
      f.n = n;
      f.table.resize(entries);
      for (std::uint32_t i = 0; i < entries; ++i)
        f.table[i] = static_cast<int>((code >> i) & 1);
      CHECK(is_input_cheater_equilibrium(f) == constancy_characterization(f));
    }
  }
}

TEST_CASE("sampled n=4 tables keep the two characterizations in step") {
  // The full 2^16 sweep lives in the acceptance run; here a structured sample.
  for (std::uint64_t code = 0; code < 65536; code += 37) {
    ConsensusFunction f;
    f.n = 4;
    f.table.resize(16);
    for (std::uint32_t i = 0; i < 16; ++i)
      f.table[i] = static_cast<int>((code >> i) & 1);
    CHECK(is_input_cheater_equilibrium(f) == constancy_characterization(f));
  }
}

TEST_CASE("validity edge cases") {
  ConsensusFunction f;
  f.n = 2;
  f.table = {0, 1, 1, 1};
  CHECK(f.valid());
  f.table = {1, 1, 1, 1};
  CHECK_FALSE(f.valid());
  f.table = {0, 2, 0, 1};
  CHECK_FALSE(f.valid());
  f.table = {0, 1, 1};
  CHECK_FALSE(f.valid());
}
