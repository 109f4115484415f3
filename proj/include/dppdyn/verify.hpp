#ifndef DPPDYN_VERIFY_HPP
#define DPPDYN_VERIFY_HPP

#include <string>
#include <vector>

#include "dppdyn/config.hpp"

namespace dppdyn {

enum class CheckStatus { Pass, Fail, Skip };

const char* to_string(CheckStatus status);

struct CheckResult {
  std::string check_name;
  CheckStatus status = CheckStatus::Skip;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;  // reason for a skip, or context for the residual
};

/// Runs the named oracle suite ("kernel", "papangelou", "dpp", "rates",
/// "exactcheck" or "simulate") on the configured kernel. Exhaustive checks
/// are skipped, with a note, when the site set is too large for them.
std::vector<CheckResult> run_suite(const ExperimentConfig& cfg, const std::string& suite, Exec exec = Exec::Parallel);

/// All suites listed in cfg.verify.suites, in order.
std::vector<CheckResult> run_verify(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

bool all_passed(const std::vector<CheckResult>& results);

/// Papangelou exhaustive suites and the contraction check stop at these sizes.
inline constexpr int kMaxExhaustiveCheckSites = 10;
inline constexpr int kMaxContractionCheckSites = 8;

}  // namespace dppdyn

#endif  // DPPDYN_VERIFY_HPP
