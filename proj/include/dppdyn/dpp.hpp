#ifndef DPPDYN_DPP_HPP
#define DPPDYN_DPP_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "dppdyn/common.hpp"
#include "dppdyn/configuration.hpp"
#include "dppdyn/kernel.hpp"

namespace dppdyn {

/// Determinantal point process with marginal kernel K = A (I + A)^{-1}.
///
/// K shares A's eigenvectors, with eigenvalues a_i / (1 + a_i) in [0, 1).
/// Holds a reference to the kernel, which must outlive the measure.
class DppMeasure {
 public:
  explicit DppMeasure(const Kernel& k);

  const Kernel& kernel() const { return *k_; }
  int n() const { return k_->n(); }
  /// Eigenvalues of K (ascending), paired with kernel().eigenvectors().
  const RealVector& k_eigenvalues() const { return k_eigenvalues_; }
  /// log det(I - K) = -sum log(1 + a_i)
  double log_det_complement() const { return log_det_complement_; }
  /// trace K
  double expected_size() const { return k_eigenvalues_.sum(); }

 private:
  const Kernel* k_;
  RealVector k_eigenvalues_;
  double log_det_complement_ = 0.0;
};

/// det (K(x_i, x_j)) over distinct sites.
double correlation(const DppMeasure& m, const SiteList& sites);

/// mu(zeta restricted to window) = det(I_w - K_w) det A_[w](zeta, zeta).
/// `zeta` is a configuration on the full site set contained in the window.
/// The determinant over an empty index set is 1.
double marginal_probability(const DppMeasure& m, const SiteList& window, const Configuration& zeta);

/// mu({xi}) for every state xi, indexed by configuration mask (n <= 24).
std::vector<double> state_probabilities(const DppMeasure& m);

/// Exact draw from the process: each eigenvector of K is kept independently
/// with probability equal to its eigenvalue, then the resulting projection
/// process is sampled site by site.
Configuration sample(const DppMeasure& m, std::uint64_t seed);

using ConfigFunction = std::function<double(const Configuration&)>;

struct DlrResult {
  double residual = 0.0;
  double standard_error = 0.0;  // zero in exact mode
  bool exact = true;
};

/// |E f - E[ Z^{-1} sum_zeta alpha(zeta; xi outside) f(zeta xi outside) ]| for
/// the specification kernel on `window`. Exact enumeration when n <= 12,
/// otherwise a Monte Carlo estimate from `sample_budget` exact samples.
DlrResult dlr_residual(const DppMeasure& m, const SiteList& window, const ConfigFunction& f,
                       std::uint64_t sample_budget = 10000, std::uint64_t seed = 0);

inline constexpr int kMaxDlrWindow = 12;
inline constexpr int kMaxExactDlrSites = 12;

}  // namespace dppdyn

#endif  // DPPDYN_DPP_HPP
