// End-to-end exercise of the command-line tool: simulate -> fit ->
// poststratify -> ppc -> diagnose, plus exit-code and determinism contracts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int checks = 0, failures = 0;

void check(bool ok, const std::string& what) {
  ++checks;
  if (!ok) {
    ++failures;
    std::cout << "[FAIL] " << what << "\n";
  } else {
    std::cout << "[ ok ] " << what << "\n";
  }
}

int run_cmd(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const char* cli_env = std::getenv("SPORD_CLI");
  if (cli_env == nullptr) {
    std::cout << "SPORD_CLI not set; cannot locate the binary\n";
    return 1;
  }
  const std::string cli = cli_env;
  const fs::path root = fs::temp_directory_path() / "spord_cli_test";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto p = [&](const std::string& name) { return (root / name).string(); };

  {
    std::ofstream out(p("config.json"));
    out << R"({
  "factors": {
    "sex": ["m", "f"],
    "age": ["a1", "a2", "a3"],
    "dw": ["d1", "d2"]
  },
  "model": {
    "categories": 3,
    "cut_factors": ["sex", "age"],
    "additive_factors": ["dw"],
    "alpha_constraint": "zero_sum",
    "include_spatial": true
  },
  "mcmc": {"chains": 2, "iterations": 600, "burnin": 100, "thin": 5, "seed": 202},
  "monitor": {"patterns": ["kappa[*]", "alpha[*]", "theta[*]", "sigma", "lambda"]},
  "paths": {
    "survey": ")" << p("data/survey.csv") << R"(",
    "adjacency": ")" << p("data/adjacency.txt") << R"(",
    "population": ")" << p("data/population.csv") << R"(",
    "out": ")" << p("fit") << R"("
  },
  "simulate": {
    "grid_rows": 3, "grid_cols": 3, "quota": 12,
    "stratum_factor": "dw",
    "second_stage_factor": "age",
    "second_stage_rates": {"a1": 0.5},
    "quota_override": {"a009": 0}
  }
})";
  }

  const std::string base = cli + " --config " + p("config.json");

  check(run_cmd(cli) == 2, "no subcommand exits 2");
  check(run_cmd(cli + " --help") == 0, "--help exits 0");
  check(run_cmd(cli + " fit --config " + p("nope.json")) == 2, "missing config exits 2");

  // simulate
  check(run_cmd(cli + " simulate --config " + p("config.json") + " --out " + p("data")) == 0,
        "simulate succeeds");
  for (const std::string f : {"survey.csv", "population.csv", "adjacency.txt", "truth.csv"})
    check(fs::exists(root / "data" / f), "simulate wrote " + f);
  check(run_cmd(cli + " simulate --config " + p("config.json") + " --out " + p("data")) == 2,
        "simulate refuses to overwrite without --force");
  check(run_cmd(cli + " simulate --config " + p("config.json") + " --out " + p("data") +
                " --force") == 0,
        "simulate --force overwrites");

  // byte-identical regeneration under the same seed
  check(run_cmd(cli + " simulate --config " + p("config.json") + " --out " + p("data2")) == 0,
        "second simulate succeeds");
  check(slurp(p("data/survey.csv")) == slurp(p("data2/survey.csv")),
        "simulate is byte-deterministic given the seed");

  // fit
  check(run_cmd(base + " fit") == 0, "fit succeeds");
  for (const std::string f : {"chain_1.csv", "chain_2.csv", "manifest.json", "report.csv"})
    check(fs::exists(root / "fit" / f), "fit wrote " + f);
  check(run_cmd(base + " fit") == 2, "fit refuses to overwrite without --force");

  // determinism: a second fit into a fresh directory produces identical draws
  check(run_cmd(base + " fit --out " + p("fit2")) == 0, "fit into a second directory");
  check(slurp(p("fit/chain_1.csv")) == slurp(p("fit2/chain_1.csv")),
        "chain 1 draws byte-identical across reruns");
  check(slurp(p("fit/chain_2.csv")) == slurp(p("fit2/chain_2.csv")),
        "chain 2 draws byte-identical across reruns");
  check(run_cmd(base + " fit --out " + p("fit3") + " --seed 999") == 0, "fit with another seed");
  check(slurp(p("fit/chain_1.csv")) != slurp(p("fit3/chain_1.csv")),
        "different seed changes the draws");

  // poststratify
  check(run_cmd(base + " poststratify") == 0, "poststratify succeeds");
  check(fs::exists(root / "fit" / "area_estimates.csv"), "area_estimates.csv written");
  check(fs::exists(root / "fit" / "relevance.csv"), "relevance.csv written");
  {
    std::ifstream in(p("fit/area_estimates.csv"));
    std::string header;
    std::getline(in, header);
    check(header == "area,category,mean,sd,q2.5,q50,q97.5", "area estimates header");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    check(rows == 9 * 3, "one row per area and category");
  }

  // ppc: includes a zero-respondent area, which is excluded with a warning
  check(run_cmd(base + " ppc --areas a001,a009") == 0, "ppc succeeds");
  {
    std::ifstream in(p("fit/ppc.csv"));
    std::string header;
    std::getline(in, header);
    check(header == "area,category,pred_mean,pred_lo,pred_hi,observed", "ppc header");
    int rows = 0;
    bool has_a009 = false;
    for (std::string line; std::getline(in, line);) {
      ++rows;
      if (line.rfind("a009,", 0) == 0) has_a009 = true;
    }
    check(rows == 3, "ppc rows only for the area with respondents");
    check(!has_a009, "zero-respondent area excluded from ppc");
  }
  check(run_cmd(base + " ppc") == 0, "ppc defaults to the most populated areas");

  // diagnose
  check(run_cmd(base + " diagnose") == 0, "diagnose succeeds");

  // saved draws must match the configured model spec
  std::string other = slurp(p("config.json"));
  other.replace(other.find("\"categories\": 3"), 15, "\"categories\": 4");
  {
    std::ofstream out(p("config_other.json"));
    out << other;
  }
  check(run_cmd(cli + " poststratify --config " + p("config_other.json") + " --draws " +
                p("fit")) == 2,
        "poststratify rejects draws fitted under another model spec");

  // adjacency referencing an unknown area exits 2
  {
    std::ofstream out(p("data/adjacency.txt"), std::ios::app);
    out << "a001,zzz\n";
  }
  check(run_cmd(base + " fit --out " + p("fit5")) == 2, "unknown area in adjacency exits 2");

  std::cout << checks - failures << "/" << checks << " cli checks passed\n";
  return failures == 0 ? 0 : 1;
}
