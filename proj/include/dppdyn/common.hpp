#ifndef DPPDYN_COMMON_HPP
#define DPPDYN_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dppdyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SiteList = std::vector<int>;

enum class ErrorCode {
  NotHermitian,
  NotPositiveDefinite,
  DimensionMismatch,
  SingularRestriction,
  SiteOccupied,
  SiteEmpty,
  IdenticalSites,
  NumericallySingular,
  RefactorizationFailure,
  DuplicateSites,
  ConfigurationNotInWindow,
  WindowTooLarge,
  EnumerationTooLarge,
  TooManySites,
  NotReversible,
  AssumptionAViolated,
  RateOverflow,
  InsufficientData,
  IllegalEvent,
  InvalidArgument,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Serial loops are the reference implementations; Parallel runs the same
// body under OpenMP and must produce identical results.
enum class Exec { Serial, Parallel };

// |Re z| + |Im z|
inline double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

}  // namespace dppdyn

#endif  // DPPDYN_COMMON_HPP
