// Command-line front-end: one-shot ring simulations and batch verification
// of the protocol's probabilistic guarantees.
//
// Exit codes: 0 all selected checks pass, 1 a checked claim is violated
// (witness emitted), 2 configuration error, 3 capacity exceeded.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ringlab/analysis.hpp"
#include "ringlab/impossibility.hpp"

namespace {

using namespace ringlab;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;

void write_atomically(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::endl;
    return;
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file: " + tmp);
    out << text << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot move output into place: " + path);
}

json fraction_json(const Fraction& f) {
  return json{{"num", f.num()}, {"den", f.den()}};
}

json config_json(const RingConfig& config) {
  json roles = json::array();
  for (Role r : config.roles)
    roles.push_back(r == Role::Honest ? "honest" : "coalition");
  return json{{"n", config.n}, {"ids", config.node_ids}, {"roles", roles}};
}

struct VerifyOptions {
  std::string check;
  int n = 4;
  std::string honest;  // "", "adjacent", "nonadjacent", or comma positions
  int preferred = 1;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

RingConfig make_ring(int n, const std::string& honest) {
  if (honest.empty() || honest == "all") return RingConfig::honest_ring(n);
  if (honest == "adjacent") return RingConfig::two_honest(n, true);
  if (honest == "nonadjacent") return RingConfig::two_honest(n, false);
  RingConfig config;
  config.n = n;
  for (int p = 0; p < n; ++p) config.node_ids.push_back(p + 1);
  config.roles.assign(n, Role::Coalition);
  std::stringstream ss(honest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    int p = std::stoi(item, &pos);
    if (pos != item.size() || p < 0 || p >= n)
      throw ConfigError("honest position out of range: " + item);
    config.roles[p] = Role::Honest;
  }
  if (config.honest_count() == 0)
    throw ConfigError("at least one honest position is required");
  config.validate();
  return config;
}

// A detection-free random script: every free slot forged with a distinct
// out-of-band id and seeded input/random values.
ForgeScript seeded_script(const RingConfig& config, std::mt19937_64& rng) {
  ForgeScript script;
  for (const auto& info : rig_targets(config)) {
    std::vector<SlotAction> stream(config.n - 1, SlotAction::pass());
    for (const auto& [round, originator] : info.free_slots)
      stream[round - 1] = SlotAction::forge(
          10'000'000 + 1000LL * info.position + round,
          static_cast<int>(rng() % 2), static_cast<int>(rng() % config.n));
    script.streams[info.position] = std::move(stream);
  }
  return script;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  for (const auto& row : rows) {
    out << "\n";
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
  }
  return out.str();
}

int emit(const VerifyOptions& opt, const RingConfig* config, bool pass,
         json rows, const std::vector<std::string>& csv_header,
         const std::vector<std::vector<std::string>>& csv_rows) {
  if (opt.format == "csv") {
    write_atomically(opt.out, csv_table(csv_header, csv_rows));
  } else {
    json doc;
    doc["check"] = opt.check;
    doc["pass"] = pass;
    doc["config"] = json{{"n", opt.n},
                         {"preferred", opt.preferred},
                         {"samples", opt.samples},
                         {"seed", opt.seed}};
    if (!opt.honest.empty()) doc["config"]["honest"] = opt.honest;
    if (config) doc["config"]["ring"] = config_json(*config);
    doc["rows"] = std::move(rows);
    write_atomically(opt.out, doc.dump(2));
  }
  return pass ? kExitPass : kExitViolation;
}

int cmd_verify(const VerifyOptions& opt) {
  if (opt.check == "fairness") {
    FairnessReport report = check_fairness(opt.n);
    bool pass = report.pass();
    json rows = json::array();
    rows.push_back({{"p_zero", fraction_json(report.p_zero)},
                    {"p_one", fraction_json(report.p_one)},
                    {"agreement_violations", report.agreement_violations},
                    {"validity_violations", report.validity_violations}});
    if (!pass && !report.witness.empty())
      rows.push_back({{"witness", report.witness}});
    return emit(opt, nullptr, pass, rows,
                {"p_zero_num", "p_zero_den", "p_one_num", "p_one_den",
                 "agreement_violations", "validity_violations"},
                {{std::to_string(report.p_zero.num()),
                  std::to_string(report.p_zero.den()),
                  std::to_string(report.p_one.num()),
                  std::to_string(report.p_one.den()),
                  std::to_string(report.agreement_violations),
                  std::to_string(report.validity_violations)}});
  }

  if (opt.check == "uniformity") {
    std::string honest = opt.honest.empty() ? "nonadjacent" : opt.honest;
    RingConfig config = make_ring(opt.n, honest);
    std::mt19937_64 rng(opt.seed);
    std::uint64_t scripts =
        std::min<std::uint64_t>(opt.samples == 100000 ? 100 : opt.samples,
                                opt.samples);
    bool pass = true;
    json rows = json::array();
    std::vector<std::vector<std::string>> csv_rows;
    for (std::uint64_t s = 0; s < scripts && pass; ++s) {
      ForgeScript script = seeded_script(config, rng);
      for (const auto& info : rig_targets(config)) {
        int u = info.position;
        std::vector<int> other_inputs, other_randoms;
        for (int p : config.honest_positions())
          if (p != u) {
            other_inputs.push_back(static_cast<int>(rng() % 2));
            other_randoms.push_back(static_cast<int>(rng() % config.n));
          }
        int u_input = static_cast<int>(rng() % 2);
        auto report =
            check_leader_uniformity(config, script, u, u_input, other_inputs,
                                    other_randoms, opt.preferred);
        if (!report.uniform) {
          pass = false;
          json leaders = json::array();
          for (const auto& [id, p] : report.leader_probability)
            leaders.push_back({{"id", id}, {"probability", fraction_json(p)}});
          rows.push_back({{"witness_script", s},
                          {"node", u},
                          {"detected_points", report.detected_points},
                          {"leaders", leaders}});
          csv_rows.push_back({std::to_string(s), std::to_string(u), "violation"});
        }
      }
    }
    if (pass) {
      rows.push_back({{"scripts", scripts},
                      {"leader_probability", fraction_json(Fraction(1, opt.n))}});
      csv_rows.push_back({std::to_string(scripts), "-", "uniform"});
    }
    return emit(opt, &config, pass, rows, {"script", "node", "verdict"},
                csv_rows);
  }

  if (opt.check == "conditional" || opt.check == "full-control") {
    std::string honest = opt.honest.empty() ? "nonadjacent" : opt.honest;
    RingConfig config = make_ring(opt.n, honest);
    StrategySpace space(config);
    StrategySurvey survey;
    EquilibriumReport report =
        best_response_search(config, opt.preferred, space, &survey);
    bool pass = opt.check == "conditional"
                    ? (survey.conditional_violations == 0 &&
                       survey.unconditional_violations == 0)
                    : survey.full_control_violations == 0;
    json rows = json::array();
    rows.push_back({{"scripts", survey.scripts},
                    {"conditional_checks", survey.conditional_checks},
                    {"conditional_violations", survey.conditional_violations},
                    {"unconditional_checks", survey.unconditional_checks},
                    {"unconditional_violations", survey.unconditional_violations},
                    {"full_control_checks", survey.full_control_checks},
                    {"full_control_violations", survey.full_control_violations}});
    return emit(opt, &config, pass, rows,
                {"scripts", "conditional_violations", "unconditional_violations",
                 "full_control_violations"},
                {{std::to_string(survey.scripts),
                  std::to_string(survey.conditional_violations),
                  std::to_string(survey.unconditional_violations),
                  std::to_string(survey.full_control_violations)}});
  }

  if (opt.check == "best-response") {
    std::string honest = opt.honest.empty() ? "nonadjacent" : opt.honest;
    RingConfig config = make_ring(opt.n, honest);
    StrategySpace space(config);
    std::vector<StrategyRecord> records;
    EquilibriumReport report = best_response_search(
        config, opt.preferred, space, nullptr,
        opt.format == "csv" ? &records : nullptr);
    bool pass = !report.profitable;
    json rows = json::array();
    rows.push_back({{"baseline", fraction_json(report.baseline)},
                    {"max_utility", fraction_json(report.best_utility)},
                    {"best_index", report.best_index},
                    {"scripts_evaluated", report.scripts_evaluated},
                    {"verdict", pass ? "NoProfitableDeviation"
                                     : "ProfitableDeviation"}});
    if (!pass)
      rows.push_back({{"witness_script", report.best_script.to_json()}});
    std::vector<std::vector<std::string>> csv_rows;
    csv_rows.reserve(records.size());
    char digest[17];
    for (const auto& r : records) {
      std::snprintf(digest, sizeof digest, "%016llx",
                    static_cast<unsigned long long>(r.digest));
      csv_rows.push_back({digest, std::to_string(r.utility.num()),
                          std::to_string(r.utility.den()),
                          std::to_string(r.detected.num()),
                          std::to_string(r.detected.den())});
    }
    return emit(opt, &config, pass, rows,
                {"digest", "utility_num", "utility_den", "detected_num",
                 "detected_den"},
                csv_rows);
  }

  if (opt.check == "impossibility" || opt.check == "uniqueness") {
    ConstraintReport report = derive_constraints(opt.n);
    bool even = opt.n % 2 == 0;
    bool constraints_ok =
        even ? !report.consistent
             : (report.consistent && report.unique &&
                *report.unique == ConsensusFunction::parity(opt.n));
    std::uint64_t survivors = 0;
    std::string survivor_hex;
    bool brute_ok = true;
    if (opt.n <= 4) {
      auto found = equilibrium_functions_bruteforce(opt.n);
      survivors = found.size();
      if (!found.empty()) survivor_hex = found.front().hex();
      brute_ok = even ? found.empty()
                      : (found.size() == 1 &&
                         found.front() == ConsensusFunction::parity(opt.n));
    }
    bool pass = constraints_ok && brute_ok;
    json rows = json::array();
    json row = {{"n", opt.n},
                {"constraints",
                 report.consistent ? "consistent" : "contradiction"}};
    if (!report.consistent) {
      row["witness_v_input"] = report.witness_v_input;
      row["witness_ones"] = report.witness_ones;
    }
    if (report.unique) {
      row["unique_function"] = report.unique->hex();
      row["name"] = "xor";
    }
    if (opt.n <= 4) {
      row["survivors"] = survivors;
      if (!survivor_hex.empty()) row["survivor"] = survivor_hex;
    }
    rows.push_back(row);
    return emit(opt, nullptr, pass, rows,
                {"n", "constraints", "survivors"},
                {{std::to_string(opt.n),
                  report.consistent ? "consistent" : "contradiction",
                  opt.n <= 4 ? std::to_string(survivors) : "-"}});
  }

  if (opt.check == "monte-carlo") {
    RingConfig config = make_ring(opt.n, opt.honest);
    ForgeScript rigger;
    CoalitionSpec spec = CoalitionSpec::truthful(config, opt.preferred);
    if (config.has_coalition()) {
      rigger = parity_rigger(config, opt.preferred);
      spec = CoalitionSpec::scripted(config, rigger, opt.preferred);
    }
    Fraction target =
        config.has_coalition()
            ? coalition_utility(exact_distribution(config, spec),
                                UtilityModel{opt.preferred})
            : Fraction(1, 2);
    MonteCarloResult mc = monte_carlo(config, spec, opt.samples, opt.seed);
    double gap = std::abs(mc.estimate - target.to_double());
    bool pass = mc.std_error == 0.0 ? gap == 0.0 : gap <= 4.0 * mc.std_error;
    json rows = json::array();
    rows.push_back({{"estimate", mc.estimate},
                    {"std_error", mc.std_error},
                    {"samples", mc.samples},
                    {"seed", mc.seed},
                    {"target", fraction_json(target)},
                    {"within_4_sigma", pass}});
    return emit(opt, &config, pass, rows,
                {"estimate", "std_error", "target_num", "target_den",
                 "samples", "seed"},
                {{std::to_string(mc.estimate), std::to_string(mc.std_error),
                  std::to_string(target.num()), std::to_string(target.den()),
                  std::to_string(mc.samples), std::to_string(mc.seed)}});
  }

  throw ConfigError("unknown check: " + opt.check);
}

struct SimulateOptions {
  int n = 4;
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out;
};

int cmd_simulate(const SimulateOptions& opt) {
  RingConfig config;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot read config: " + opt.config_path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config is not valid JSON");
    config.n = doc.at("n").get<int>();
    if (doc.contains("ids"))
      config.node_ids = doc["ids"].get<std::vector<long long>>();
    else
      for (int p = 0; p < config.n; ++p) config.node_ids.push_back(p + 1);
    config.roles.assign(config.n, Role::Honest);
    config.validate();
  } else {
    config = RingConfig::honest_ring(opt.n);
  }

  std::mt19937_64 rng(opt.seed);
  std::vector<std::unique_ptr<HonestBehavior>> owned;
  std::vector<Behavior*> behaviors;
  for (int p = 0; p < config.n; ++p) {
    owned.push_back(std::make_unique<HonestBehavior>(
        config.node_ids[p], config.n, static_cast<int>(rng() % 2),
        static_cast<int>(rng() % config.n)));
    behaviors.push_back(owned.back().get());
  }
  Trace trace = run_ring(config, behaviors);
  json doc = json::parse(trace.to_json(config));
  doc["config"] = config_json(config);
  doc["seed"] = opt.seed;
  write_atomically(opt.out, doc.dump(2));
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronous-ring consensus laboratory"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run one seeded ring execution");
  simulate->add_option("--n", sim.n, "Ring size");
  simulate->add_option("--seed", sim.seed, "RNG seed for inputs and randoms");
  simulate->add_option("--config", sim.config_path, "JSON config file");
  simulate->add_option("--out", sim.out, "Output path (default stdout)");

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "Check a protocol guarantee");
  verify->add_option("--check", ver.check, "Which claim to check")
      ->required()
      ->check(CLI::IsMember({"fairness", "uniformity", "conditional",
                             "full-control", "best-response", "impossibility",
                             "uniqueness", "monte-carlo"}));
  verify->add_option("--n", ver.n, "Ring size");
  verify->add_option("--honest", ver.honest,
                     "adjacent | nonadjacent | comma-separated positions");
  verify->add_option("--preferred", ver.preferred, "Coalition-preferred bit")
      ->check(CLI::Range(0, 1));
  verify->add_option("--samples", ver.samples, "Monte Carlo samples / scripts");
  verify->add_option("--seed", ver.seed, "RNG seed");
  verify->add_option("--out", ver.out, "Output path (default stdout)");
  verify->add_option("--format", ver.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    return cmd_verify(ver);
  } catch (const ringlab::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ringlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
