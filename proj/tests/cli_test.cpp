#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = RINGLAB_CLI_PATH;

struct RunResult {
  int exit_code;
};

RunResult run(const std::string& args) {
  std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp_file(const std::string& name) {
  return fs::temp_directory_path() / ("ringlab_cli_test_" + name);
}

}  // namespace

TEST_CASE("simulate writes an agreeing, reproducible trace") {
  auto out1 = tmp_file("sim1.json");
  auto out2 = tmp_file("sim2.json");
  CHECK(run("simulate --n 4 --seed 1 --out " + out1.string()).exit_code == 0);
  CHECK(run("simulate --n 4 --seed 1 --out " + out2.string()).exit_code == 0);
  std::string text = slurp(out1);
  CHECK(text == slurp(out2));  // byte-identical determinism

  json doc = json::parse(text);
  REQUIRE(doc["decisions"].size() == 4);
  auto first = doc["decisions"][0]["decision"];
  for (const auto& d : doc["decisions"]) CHECK(d["decision"] == first);
  CHECK(doc["config"]["n"] == 4);
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("different seeds give different traces") {
  auto out1 = tmp_file("seed1.json");
  auto out2 = tmp_file("seed2.json");
  CHECK(run("simulate --n 4 --seed 1 --out " + out1.string()).exit_code == 0);
  CHECK(run("simulate --n 4 --seed 2 --out " + out2.string()).exit_code == 0);
  CHECK(slurp(out1) != slurp(out2));
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("simulate rejects duplicate ids with exit 2") {
  auto cfg = tmp_file("dup.json");
  {
    std::ofstream out(cfg);
    out << R"({"n": 4, "ids": [1, 2, 2, 4]})";
  }
  CHECK(run("simulate --config " + cfg.string()).exit_code == 2);
  fs::remove(cfg);
}

TEST_CASE("verify fairness passes with the exact half fraction") {
  auto out = tmp_file("fairness.json");
  CHECK(run("verify --check fairness --n 4 --out " + out.string()).exit_code ==
        0);
  json doc = json::parse(slurp(out));
  CHECK(doc["pass"] == true);
  CHECK(doc["rows"][0]["p_one"]["num"] == 1);
  CHECK(doc["rows"][0]["p_one"]["den"] == 2);
  fs::remove(out);
}

TEST_CASE("verify impossibility reports zero survivors at n=4") {
  auto out = tmp_file("imp.json");
  CHECK(run("verify --check impossibility --n 4 --out " + out.string())
            .exit_code == 0);
  json doc = json::parse(slurp(out));
  CHECK(doc["rows"][0]["constraints"] == "contradiction");
  CHECK(doc["rows"][0]["survivors"] == 0);
  fs::remove(out);
}

TEST_CASE("verify uniqueness confirms the parity rule at n=3") {
  auto out = tmp_file("uniq.json");
  CHECK(run("verify --check uniqueness --n 3 --out " + out.string())
            .exit_code == 0);
  json doc = json::parse(slurp(out));
  CHECK(doc["rows"][0]["unique_function"] == "96");
  CHECK(doc["rows"][0]["name"] == "xor");
  fs::remove(out);
}

TEST_CASE("verify best-response on the adjacent placement") {
  auto out = tmp_file("best.json");
  CHECK(run("verify --check best-response --n 4 --honest adjacent --out " +
            out.string())
            .exit_code == 0);
  json doc = json::parse(slurp(out));
  CHECK(doc["rows"][0]["verdict"] == "NoProfitableDeviation");
  CHECK(doc["rows"][0]["baseline"]["num"] == 1);
  CHECK(doc["rows"][0]["baseline"]["den"] == 2);
  fs::remove(out);
}

TEST_CASE("verify best-response csv has one row per strategy") {
  auto out = tmp_file("best.csv");
  CHECK(run("verify --check best-response --n 4 --honest adjacent "
            "--format csv --out " +
            out.string())
            .exit_code == 0);
  std::string text = slurp(out);
  CHECK(text.rfind("digest,utility_num,utility_den", 0) == 0);
  long long lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 192 + 1);  // header + 192 strategies, trailing newline
  fs::remove(out);
}

TEST_CASE("verify uniformity and conditional on small spaces") {
  CHECK(run("verify --check uniformity --n 4 --samples 5").exit_code == 0);
  CHECK(run("verify --check conditional --n 4 --honest adjacent").exit_code ==
        0);
  CHECK(run("verify --check full-control --n 4 --honest adjacent").exit_code ==
        0);
}

TEST_CASE("verify monte-carlo lands near the exact value") {
  CHECK(run("verify --check monte-carlo --n 4 --samples 20000 --seed 7")
            .exit_code == 0);
}

TEST_CASE("capacity bound surfaces as exit 3") {
  std::string cmd = "RRL_MAX_UNIVERSE=10 " + kCli +
                    " verify --check fairness --n 4 > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 3);
}

TEST_CASE("config errors surface as exit 2") {
  CHECK(run("verify --check nonsense --n 4").exit_code == 2);
  CHECK(run("verify --check fairness --n 3").exit_code == 2);
  CHECK(run("verify --check best-response --n 4 --honest 9").exit_code == 2);
  CHECK(run("bogus-subcommand").exit_code == 2);
}
