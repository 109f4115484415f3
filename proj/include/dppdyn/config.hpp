#ifndef DPPDYN_CONFIG_HPP
#define DPPDYN_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "dppdyn/common.hpp"
#include "dppdyn/kernel.hpp"
#include "dppdyn/rates.hpp"
#include "dppdyn/simulate.hpp"

namespace dppdyn {

struct RatesSection {
  double t = 0.0;
  WeightKind weight = WeightKind::NearestNeighbor;
  double decay_rate = 1.0;
  RealMatrix weights;  // Explicit only
};

struct RunSection {
  SimConfig sim;
  int replicas = 1;
  std::vector<SiteList> observables;
};

// Absolute tolerances unless noted.
struct VerifySection {
  std::vector<std::string> suites = {"kernel", "papangelou", "dpp", "rates", "exactcheck"};
  double detailed_balance = 1e-12;  // relative to |A|
  double invariance = 1e-11;
  double duality = 1e-8;            // relative
  double difference = 1e-9;         // relative
  double lemma41 = 1e-9;
  double contraction = 1e-9;
  double gap = 1e-9;
  int functions = 20;               // random test functions for the contraction check
  std::vector<double> times = {0.5, 1.0, 2.0, 4.0};
  std::uint64_t seed = 0;
};

struct OutputSection {
  std::string dir = ".";
  std::string report;  // empty: stdout
  std::string events;  // empty: no event log
};

struct ExperimentConfig {
  KernelSpec kernel;
  SiteSpace space = SiteSpace::plain(1);
  RatesSection rates;
  RunSection run;
  VerifySection verify;
  OutputSection output;

  bool operator==(const ExperimentConfig& other) const;
};

/// Strict TOML parsing: unknown keys and sections are rejected. ParseError
/// messages carry the line and column; ValidationError messages start with
/// the offending field path (e.g. "rates.t").
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<string>");

/// TOML text that parses back to an equal config. Explicit matrices are
/// written inline, so a config loaded from a matrix file serializes standalone.
std::string serialize_config(const ExperimentConfig& cfg);

/// Checks referential consistency (dimensions, observable sites) and builds
/// nothing; throws ValidationError or DimensionMismatch.
void validate_config(const ExperimentConfig& cfg);

Kernel build_kernel(const ExperimentConfig& cfg);
RateSpec build_rate_spec(const ExperimentConfig& cfg);

/// The two-site kernel [[2, 0.5], [0.5, 2]] with defaults everywhere else.
ExperimentConfig demo_config();

}  // namespace dppdyn

#endif  // DPPDYN_CONFIG_HPP
