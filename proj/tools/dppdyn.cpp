// Command-line driver: check, sample, simulate, verify, bounds.
//
// Exit codes: 0 success, 1 failed check or numerical failure, 2 usage or
// configuration error. DPPDYN_OUTPUT_DIR overrides output.dir and
// DPPDYN_THREADS sets the OpenMP thread count.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "dppdyn/config.hpp"
#include "dppdyn/dpp.hpp"
#include "dppdyn/random.hpp"
#include "dppdyn/rates.hpp"
#include "dppdyn/simulate.hpp"
#include "dppdyn/verify.hpp"

using json = nlohmann::ordered_json;
using namespace dppdyn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

bool usage_error(ErrorCode code) {
  return code == ErrorCode::ParseError || code == ErrorCode::ValidationError ||
         code == ErrorCode::DimensionMismatch || code == ErrorCode::InvalidArgument ||
         code == ErrorCode::NotHermitian || code == ErrorCode::NotPositiveDefinite ||
         code == ErrorCode::DuplicateSites;
}

void report_error(const std::string& code, const std::string& message) {
  json e;
  e["error"] = code;
  e["message"] = message;
  std::cerr << e.dump() << "\n";
}

std::string output_path(const ExperimentConfig& cfg, const std::string& name) {
  if (name.empty() || name == "-") return "";
  std::filesystem::path p(name);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(cfg.output.dir) / p).string();
}

// Writes to the configured file, or stdout when none is set.
void emit(const ExperimentConfig& cfg, const std::string& file, const std::string& text) {
  const std::string path = output_path(cfg, file);
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

json results_json(const std::vector<CheckResult>& results) {
  json checks = json::array();
  for (const auto& r : results) {
    json c;
    c["check_name"] = r.check_name;
    c["status"] = to_string(r.status);
    c["residual"] = r.residual;
    c["tolerance"] = r.tolerance;
    if (!r.note.empty()) c["note"] = r.note;
    checks.push_back(c);
  }
  json report;
  report["status"] = all_passed(results) ? "pass" : "fail";
  report["checks"] = checks;
  return report;
}

SiteList parse_sites(const std::string& text) {
  SiteList sites;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error(ErrorCode::InvalidArgument, "empty site in '" + text + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorCode::InvalidArgument, "bad site '" + item + "'");
    sites.push_back(v);
  }
  return sites;
}

json sites_json(const SiteList& sites) {
  json a = json::array();
  for (int s : sites) a.push_back(s);
  return a;
}

json bounds_json(const LiggettConstants& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["exhaustive"] = c.exhaustive;
  j["c_sup"] = c.c_sup ? json(*c.c_sup) : json(nullptr);
  j["epsilon"] = c.epsilon;
  j["M_exact"] = c.m_exact ? json(*c.m_exact) : json(nullptr);
  j["M1_bound"] = c.m1_bound;
  j["ergodic"] = c.ergodic;
  j["epsilon_bound"] = c.epsilon_bound;
  j["M1_exact"] = c.m1_exact ? json(*c.m1_exact) : json(nullptr);
  j["M1_bound_strict"] = c.m1_bound_strict;
  j["a0"] = c.a0;
  j["lambda"] = c.lambda;
  j["q"] = c.q;
  if (!c.epsilon_by_size.empty()) j["epsilon_by_size"] = c.epsilon_by_size;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinantal point processes and their Glauber/Kawasaki dynamics"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "TOML experiment config (default: the two-site demo kernel)");

  auto* check = app.add_subcommand("check", "Run one module's oracle suite");
  std::string check_target = "all";
  check->add_option("target", check_target, "kernel | papangelou | dpp | rates | exactcheck | simulate | all")
      ->check(CLI::IsMember({"kernel", "papangelou", "dpp", "rates", "exactcheck", "simulate", "all"}));

  auto* sample_cmd = app.add_subcommand("sample", "Exact DPP samples as bit-strings");
  std::uint64_t sample_count = 10;
  std::optional<std::uint64_t> sample_seed;
  sample_cmd->add_option("--count", sample_count, "number of samples");
  sample_cmd->add_option("--seed", sample_seed, "master seed (default: run.seed)");

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the dynamics and estimate correlations");
  std::optional<std::string> mode_flag;
  std::optional<double> horizon_flag, burn_flag, thinning_flag;
  std::optional<int> replicas_flag;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> initial_flag;
  std::vector<std::string> observable_flags;
  std::optional<std::string> events_flag;
  sim_cmd->add_option("--mode", mode_flag, "glauber | kawasaki")->check(CLI::IsMember({"glauber", "kawasaki"}));
  sim_cmd->add_option("--horizon", horizon_flag, "simulated time");
  sim_cmd->add_option("--burn-in", burn_flag, "time discarded before averaging");
  sim_cmd->add_option("--thinning", thinning_flag, "grid spacing for observable sampling (0: exact time averages)");
  sim_cmd->add_option("--replicas", replicas_flag, "independent replicas");
  sim_cmd->add_option("--seed", seed_flag, "master seed");
  sim_cmd->add_option("--initial", initial_flag, "empty | full | dpp-sample | explicit")
      ->check(CLI::IsMember({"empty", "full", "dpp-sample", "explicit"}));
  sim_cmd->add_option("--observables", observable_flags, "site tuple as a comma list, e.g. 0,1 (repeatable)");
  sim_cmd->add_option("--events", events_flag, "CSV event log of replica 0");

  auto* verify_cmd = app.add_subcommand("verify", "Run the configured oracle suites");
  auto* bounds_cmd = app.add_subcommand("bounds", "Existence and ergodicity constants");
  std::optional<std::string> bounds_mode;
  bool bounds_analytic = false;
  bounds_cmd->add_option("--mode", bounds_mode, "glauber | kawasaki")->check(CLI::IsMember({"glauber", "kawasaki"}));
  bounds_cmd->add_flag("--analytic", bounds_analytic, "analytic bounds only, no enumeration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (const char* threads = std::getenv("DPPDYN_THREADS")) {
      const int t = std::atoi(threads);
      if (t < 1) throw Error(ErrorCode::InvalidArgument, "DPPDYN_THREADS must be a positive integer");
      omp_set_num_threads(t);
    }
    ExperimentConfig cfg = config_path.empty() ? demo_config() : parse_config(config_path);
    if (const char* dir = std::getenv("DPPDYN_OUTPUT_DIR")) cfg.output.dir = dir;

    if (check->parsed() || verify_cmd->parsed()) {
      std::vector<CheckResult> results;
      if (verify_cmd->parsed()) {
        results = run_verify(cfg);
      } else if (check_target == "all") {
        for (const char* suite : {"kernel", "papangelou", "dpp", "rates", "exactcheck"}) {
          auto part = run_suite(cfg, suite);
          results.insert(results.end(), part.begin(), part.end());
        }
      } else {
        results = run_suite(cfg, check_target);
      }
      emit(cfg, cfg.output.report, results_json(results).dump(2) + "\n");
      return all_passed(results) ? kExitOk : kExitCheckFailed;
    }

    const Kernel k = build_kernel(cfg);

    if (sample_cmd->parsed()) {
      const DppMeasure m(k);
      const std::uint64_t seed = sample_seed.value_or(cfg.run.sim.seed);
      std::string text;
      for (std::uint64_t i = 0; i < sample_count; ++i) text += sample(m, derive_seed(seed, i)).bitstring() + "\n";
      emit(cfg, "", text);
      return kExitOk;
    }

    if (bounds_cmd->parsed()) {
      const Dynamics mode = bounds_mode ? parse_dynamics(*bounds_mode) : cfg.run.sim.mode;
      const bool exhaustive = !bounds_analytic && k.n() <= kMaxExhaustiveSites;
      const LiggettConstants c = liggett_constants(k, build_rate_spec(cfg), mode, exhaustive);
      emit(cfg, "", bounds_json(c).dump() + "\n");
      return kExitOk;
    }

    if (sim_cmd->parsed()) {
      SimConfig& sim = cfg.run.sim;
      if (mode_flag) sim.mode = parse_dynamics(*mode_flag);
      if (horizon_flag) sim.horizon = *horizon_flag;
      if (burn_flag) sim.burn_in = *burn_flag;
      if (thinning_flag) sim.thinning = *thinning_flag;
      if (seed_flag) sim.seed = *seed_flag;
      if (initial_flag) sim.initial = parse_initial_state(*initial_flag);
      if (replicas_flag) cfg.run.replicas = *replicas_flag;
      if (!observable_flags.empty()) {
        cfg.run.observables.clear();
        for (const auto& text : observable_flags) cfg.run.observables.push_back(parse_sites(text));
      }
      if (events_flag) cfg.output.events = *events_flag;
      if (cfg.run.observables.empty())
        for (int x = 0; x < k.n(); ++x) cfg.run.observables.push_back({x});
      validate_config(cfg);
      if (!check_assumption_a(k).holds)
        report_error("Warning", "Assumption (A) fails; existence constants are unverified");

      const RateSpec spec = build_rate_spec(cfg);
      std::vector<Observable> observables;
      for (const auto& sites : cfg.run.observables) observables.push_back(indicator_product(sites));
      const ReplicaSummary summary = run_replicas(k, spec, sim, cfg.run.replicas, observables);
      const DppMeasure m(k);
      std::string text;
      for (size_t i = 0; i < observables.size(); ++i) {
        json rec;
        rec["sites"] = sites_json(cfg.run.observables[i]);
        rec["estimate"] = summary.estimates[i].mean;
        rec["stderr"] = summary.estimates[i].standard_error;
        rec["target"] = correlation(m, cfg.run.observables[i]);
        text += rec.dump() + "\n";
      }
      emit(cfg, cfg.output.report, text);
      if (!cfg.output.events.empty()) {
        SimConfig first = sim;
        first.seed = derive_seed(sim.seed, 0);
        std::ostringstream log;
        write_event_log(log, run(k, spec, first));
        emit(cfg, cfg.output.events, log.str());
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    report_error(to_string(e.code()), e.what());
    return usage_error(e.code()) ? kExitUsage : kExitCheckFailed;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return kExitCheckFailed;
  }
  return kExitOk;
}
