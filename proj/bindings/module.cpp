#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <random>

#include "ringlab/analysis.hpp"
#include "ringlab/impossibility.hpp"

namespace py = pybind11;
using namespace ringlab;

namespace {

std::pair<long long, long long> pair_of(const Fraction& f) {
  return {f.num(), f.den()};
}

RingConfig ring_for(int n, const std::string& honest) {
  if (honest.empty() || honest == "all") return RingConfig::honest_ring(n);
  if (honest == "adjacent") return RingConfig::two_honest(n, true);
  if (honest == "nonadjacent") return RingConfig::two_honest(n, false);
  throw ConfigError("honest must be 'all', 'adjacent' or 'nonadjacent'");
}

}  // namespace

PYBIND11_MODULE(_ringlab, m) {
  m.doc() = "Synchronous-ring consensus laboratory (native core)";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<CapacityError>(m, "CapacityError");

  m.def(
      "simulate_json",
      [](int n, std::uint64_t seed) {
        auto config = RingConfig::honest_ring(n);
        std::mt19937_64 rng(seed);
        std::vector<std::unique_ptr<HonestBehavior>> owned;
        std::vector<Behavior*> behaviors;
        for (int p = 0; p < n; ++p) {
          owned.push_back(std::make_unique<HonestBehavior>(
              config.node_ids[p], n, static_cast<int>(rng() % 2),
              static_cast<int>(rng() % n)));
          behaviors.push_back(owned.back().get());
        }
        return run_ring(config, behaviors).to_json(config);
      },
      py::arg("n"), py::arg("seed") = 1,
      "Run one seeded all-honest ring execution and return the JSON trace.");

  m.def(
      "check_fairness",
      [](int n) {
        auto rep = check_fairness(n);
        py::dict out;
        out["pass"] = rep.pass();
        out["p_zero"] = pair_of(rep.p_zero);
        out["p_one"] = pair_of(rep.p_one);
        return out;
      },
      py::arg("n"),
      "Exhaustive agreement/validity/half-half check over an even honest ring.");

  m.def(
      "rigger_utility",
      [](int n, const std::string& honest, bool mirrored, int preferred) {
        auto config = ring_for(n, honest);
        ForgeScript script = parity_rigger(
            config, preferred,
            mirrored ? StreamStyle::Case2Mirrored : StreamStyle::Case1Fresh);
        CoalitionSpec spec = CoalitionSpec::scripted(config, script, preferred);
        return pair_of(coalition_utility(exact_distribution(config, spec),
                                         UtilityModel{preferred}));
      },
      py::arg("n"), py::arg("honest") = "nonadjacent",
      py::arg("mirrored") = false, py::arg("preferred") = 1,
      "Exact coalition utility of the parity-rigging script, as (num, den).");

  m.def(
      "best_response",
      [](int n, const std::string& honest, int preferred) {
        auto config = ring_for(n, honest);
        StrategySpace space(config);
        auto rep = best_response_search(config, preferred, space);
        py::dict out;
        out["baseline"] = pair_of(rep.baseline);
        out["best_utility"] = pair_of(rep.best_utility);
        out["profitable"] = rep.profitable;
        out["scripts_evaluated"] = rep.scripts_evaluated;
        return out;
      },
      py::arg("n"), py::arg("honest") = "adjacent", py::arg("preferred") = 1,
      "Exhaustive fixed-strategy search; exact utilities as (num, den).");

  m.def(
      "monte_carlo",
      [](int n, const std::string& honest, std::uint64_t samples,
         std::uint64_t seed, int preferred) {
        auto config = ring_for(n, honest);
        CoalitionSpec spec = CoalitionSpec::truthful(config, preferred);
        auto mc = monte_carlo(config, spec, samples, seed);
        return py::make_tuple(mc.estimate, mc.std_error);
      },
      py::arg("n"), py::arg("honest") = "all", py::arg("samples") = 100000,
      py::arg("seed") = 1, py::arg("preferred") = 1,
      "Seeded estimate of P(all honest decide the preferred bit).");

  m.def("forced_decision", &forced_decision, py::arg("v_input"),
        py::arg("ones"), py::arg("n"),
        "Backward-induction forced decision of the lone outsider.");

  m.def(
      "derive_constraints",
      [](int n) {
        auto rep = derive_constraints(n);
        py::dict out;
        out["consistent"] = rep.consistent;
        if (rep.unique) out["unique_hex"] = rep.unique->hex();
        if (!rep.consistent)
          out["witness"] =
              py::make_tuple(rep.witness_v_input, rep.witness_ones);
        return out;
      },
      py::arg("n"),
      "Replay the equilibrium backward induction for ring size n.");

  m.def(
      "equilibrium_functions",
      [](int n) {
        std::vector<std::string> out;
        for (const auto& f : equilibrium_functions_bruteforce(n))
          out.push_back(f.hex());
        return out;
      },
      py::arg("n"),
      "Hex truth tables of all input-cheater-proof consensus rules (n <= 4).");
}
