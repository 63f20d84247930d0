// ocf: batch experiments, acceptance suites and exact oracles.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ocf/oracles.hpp"
#include "ocf/partitioning.hpp"
#include "ocf/tools/acceptance.hpp"
#include "ocf/tools/config.hpp"
#include "ocf/tools/experiment.hpp"

namespace {

using namespace ocf;
using namespace ocf::tools;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
};

int RunCommand(const std::string& path, const GlobalFlags& flags, bool per_trial) {
  Config cfg = Config::Load(path);
  if (flags.seed) cfg.Set("seed", std::to_string(*flags.seed));
  if (flags.trials) cfg.Set("trials", std::to_string(*flags.trials));
  if (flags.out) cfg.Set("out", *flags.out);
  if (flags.jobs) cfg.Set("jobs", std::to_string(*flags.jobs));
  if (per_trial) cfg.Set("per_trial", "true");
  ExperimentConfig exp = ExperimentConfig::FromConfig(cfg);
  RunExperiment(exp, &std::cout);
  std::cout << "wrote " << (std::filesystem::path(exp.out) / "aggregate.csv").string() << '\n';
  return 0;
}

int AcceptCommand(const std::string& suite, const GlobalFlags& flags) {
  AcceptanceOptions opt;
  if (flags.seed) opt.seed = *flags.seed;
  if (flags.jobs) opt.jobs = *flags.jobs;
  opt.trials = flags.trials;
  opt.progress = &std::cout;
  if (flags.out && !std::filesystem::is_directory(*flags.out)) {
    throw ConfigError("output directory '" + *flags.out + "' does not exist");
  }
  std::vector<CriterionResult> results = RunAcceptance(suite, opt);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass();
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  if (flags.out) {
    std::ofstream json(std::filesystem::path(*flags.out) / "acceptance.json");
    json << ResultsJson(results);
  }
  return passed == results.size() ? 0 : 1;
}

std::size_t Arg(const std::vector<std::string>& params, std::size_t k, const std::string& what) {
  if (k >= params.size()) throw ConfigError("missing parameter: " + what);
  const std::string& s = params[k];
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s[0] == '-') {
    throw ConfigError(what + ": expected a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

double RealArg(const std::vector<std::string>& params, std::size_t k, const std::string& what) {
  if (k >= params.size()) throw ConfigError("missing parameter: " + what);
  try {
    std::size_t used = 0;
    double v = std::stod(params[k], &used);
    if (used == params[k].size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(what + ": expected a number, got '" + params[k] + "'");
}

int OracleCommand(const std::string& name, const std::vector<std::string>& params) {
  if (name == "rdet") {
    std::size_t u = Arg(params, 0, "n_users");
    std::size_t i = Arg(params, 1, "n_items");
    Rational rec = RdetRecursion(u, i);
    Rational closed = RdetClosedForm(u, i);
    std::cout << "recursion " << rec.str() << "\nclosed_form " << closed.str() << "\nequal "
              << (rec == closed ? "true" : "false") << '\n';
  } else if (name == "rdet_table") {
    WriteRdetCsv(std::cout, Arg(params, 0, "max_users"), Arg(params, 1, "max_items"));
  } else if (name == "policy_bruteforce") {
    std::size_t u = Arg(params, 0, "n_users");
    std::size_t i = Arg(params, 1, "n_items");
    std::cout << PolicyStateBruteforce(u, i).str() << '\n';
  } else if (name == "redblue") {
    RedBlueResult rb = RedBlueExact(Arg(params, 0, "reds"), Arg(params, 1, "blues"));
    std::cout << "N " << rb.max.str() << " (" << rb.max.convert_to<double>() << ")\nbound "
              << RedBlueBound(rb.reds, rb.blues).str() << "\nargmax_red " << rb.argmax + 1
              << "\narrangements " << rb.arrangements << '\n';
  } else if (name == "redblue_table") {
    WriteRedBlueCsv(std::cout, Arg(params, 0, "max_total"));
  } else if (name == "negative_bound") {
    std::size_t n = Arg(params, 0, "n");
    double exponent = RealArg(params, 1, "exponent");
    if (params.size() < 3 || (params[2] != "private" && params[2] != "shared")) {
      throw ConfigError("placement: expected 'private' or 'shared'");
    }
    HatPlacement placement =
        params[2] == "private" ? HatPlacement::kPrivateItems : HatPlacement::kOneSharedItem;
    NegativeBound nb = NegativeBoundExact(n, exponent, placement);
    std::cout << "expected_total " << nb.expected_total << "\nbound_total " << nb.bound_total
              << "\nexpected_ratio " << nb.expected_ratio() << "\nbound_ratio "
              << nb.bound_ratio() << '\n';
  } else if (name == "semi_matching") {
    if (params.empty()) throw ConfigError("missing parameter: graph spec");
    AccessGraph g = BuildGraph(params[0], params.size() > 1 ? Arg(params, 1, "seed") : 1);
    SemiMatching m = BalancedSemiMatching(g);
    GraphStats stats = ComputeStats(g);
    std::cout << "# makespan " << m.max_load << ", z_max " << stats.z_max << '\n';
    WriteSemiMatching(std::cout, m);
  } else {
    throw ConfigError("unknown oracle '" + name +
                      "'; available: rdet, rdet_table, policy_bruteforce, redblue, "
                      "redblue_table, negative_bound, semi_matching");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online collaborative filtering simulator"};
  app.require_subcommand(1);
  GlobalFlags flags;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string out;
  std::size_t jobs = 0;
  auto* seed_opt = app.add_option("--seed", seed, "master seed")->capture_default_str();
  auto* trials_opt = app.add_option("--trials", trials, "trial count override")
                         ->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "output directory (must exist)");
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads (0 = all cores)");
  app.fallthrough();

  std::string config_path;
  bool per_trial = false;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "key = value config file")->required();
  run->add_flag("--per-trial", per_trial, "also write per-trial CSV files");

  std::string suite;
  auto* accept = app.add_subcommand("accept", "run acceptance suites");
  std::string suites_help;
  for (const auto& s : AcceptanceSuites()) suites_help += (suites_help.empty() ? "" : ", ") + s;
  accept->add_option("suite", suite, "one of: " + suites_help)->required();

  std::string oracle_name;
  std::vector<std::string> oracle_params;
  auto* oracle = app.add_subcommand("oracle", "evaluate an exact oracle");
  oracle->add_option("name", oracle_name,
                     "rdet U I | rdet_table U I | policy_bruteforce U I | redblue R B | "
                     "redblue_table N | negative_bound n exponent private|shared | "
                     "semi_matching GRAPH [seed]")
      ->required();
  oracle->add_option("params", oracle_params, "oracle parameters");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) flags.seed = seed;
  if (*trials_opt) flags.trials = trials;
  if (*out_opt) flags.out = out;
  if (*jobs_opt) flags.jobs = jobs;

  try {
    if (*run) return RunCommand(config_path, flags, per_trial);
    if (*accept) return AcceptCommand(suite, flags);
    if (*oracle) return OracleCommand(oracle_name, oracle_params);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
