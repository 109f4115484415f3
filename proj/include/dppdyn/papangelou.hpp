#ifndef DPPDYN_PAPANGELOU_HPP
#define DPPDYN_PAPANGELOU_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dppdyn/common.hpp"
#include "dppdyn/configuration.hpp"
#include "dppdyn/kernel.hpp"

namespace dppdyn {

// Schur complements below this fraction of the operator norm are treated as singular.
inline constexpr double kSingularFraction = 1e-12;

/// Papangelou intensity alpha(x; xi) = A(x,x) - A(x,xi) A(xi,xi)^{-1} A(xi,x),
/// computed from a Cholesky factor of A(xi,xi).
double alpha(const Kernel& k, int x, const Configuration& xi);

/// Same quantity as det A(x xi, x xi) / det A(xi, xi), via LU determinants.
double alpha_det_ratio(const Kernel& k, int x, const Configuration& xi);

/// 1 / alpha(x; xi).
double beta(const Kernel& k, int x, const Configuration& xi);

/// min over f in span{e_y : y in xi} of (e_x - f)* A (e_x - f), solved through
/// the normal equations with Gram matrix A(xi,xi).
double alpha_variational(const Kernel& k, int x, const Configuration& xi);

/// min over g in span{e_y : y not in x xi} of (e_x - g)* A^{-1} (e_x - g).
/// Equals 1 / alpha(x; xi) on a finite site set.
double beta_variational(const Kernel& k, int x, const Configuration& xi);

/// alpha(x;xi) - alpha(x;u xi) = |A(x,u) - A(x,xi) A(xi,xi)^{-1} A(xi,u)|^2 / alpha(u;xi).
double alpha_difference(const Kernel& k, int x, int u, const Configuration& xi);

/// Same difference from the 2x2 Schur complement S of A(xi,xi) on {x,u}:
/// S(x,u) S(u,u)^{-1} S(u,x). S is obtained by inverting the {x,u} block of
/// A(xu xi, xu xi)^{-1}, a code path independent of alpha_difference.
double alpha_difference_restricted(const Kernel& k, int x, int u, const Configuration& xi);

/// alpha(z; xi) for every hole z of xi from one factorization; NaN at occupied sites.
std::vector<double> alpha_all(const Kernel& k, const Configuration& xi);

/// All intensities the dynamics need at one state.
struct IntensitySnapshot {
  SiteList occupied;                 // ascending
  SiteList holes;                    // ascending
  std::vector<double> alpha_hole;    // alpha(y; xi) per hole
  std::vector<double> alpha_removed; // alpha(x; xi \ x) per occupied site
  // alpha(y; xi \ x), rows indexed like `occupied`, columns like `holes`.
  // Filled only when pair intensities are requested.
  RealMatrix alpha_pair;
};

/// From-scratch snapshot (fresh factorization of A(xi,xi)).
IntensitySnapshot intensity_snapshot(const Kernel& k, const Configuration& xi, bool with_pairs);

struct AlphaBoundsReport {
  bool exhaustive = false;
  std::uint64_t checked = 0;  // number of (x, xi) pairs tested
  double min_alpha = 0.0;
  double max_alpha = 0.0;
  double lambda = 0.0;
  bool lower_bound_applies = false;  // Assumption (A) holds
  struct Witness {
    int site = -1;
    std::string configuration;
    double value = 0.0;
    std::string bound;  // "lower" or "upper"
  };
  std::optional<Witness> violation;
  bool ok() const { return !violation.has_value(); }
};

/// Checks lambda <= alpha(x;xi) <= A(x,x). Exhaustive for n <= 16, otherwise
/// `samples` random configurations drawn from `seed`.
AlphaBoundsReport alpha_bounds_check(const Kernel& k, Exec exec = Exec::Parallel,
                                     std::uint64_t samples = 4096, std::uint64_t seed = 0);

/// Incrementally maintained Cholesky factor of A(xi, xi).
///
/// Sites are kept in insertion order. `add` appends a row to the factor,
/// `remove` deletes a row and restores triangularity of the trailing block
/// with a rank-one update. The factor is rebuilt from scratch every
/// `refactor_period` updates.
class PapangelouEngine {
 public:
  PapangelouEngine(const Kernel& k, const Configuration& initial, int refactor_period = 256);

  const Configuration& configuration() const { return xi_; }
  const SiteList& order() const { return order_; }

  void add(int x);
  void remove(int x);

  /// alpha(y; xi) for a hole y.
  double alpha(int y) const;
  /// alpha(x; xi \ x) for an occupied x.
  double alpha_without(int x) const;

  IntensitySnapshot snapshot(bool with_pairs) const;

  void refactorize();
  int updates_since_refactor() const { return updates_since_refactor_; }
  /// max |L L* - A(xi,xi)| for the current factor.
  double factorization_error() const;
  /// log det A(xi, xi).
  double log_det() const;

 private:
  void after_update();

  const Kernel* k_;
  Configuration xi_;
  SiteList order_;
  std::vector<int> position_;  // site -> index in order_, or -1
  Matrix chol_;                // lower triangular, chol_ chol_* = A(order_, order_)
  int refactor_period_;
  int updates_since_refactor_ = 0;
};

}  // namespace dppdyn

#endif  // DPPDYN_PAPANGELOU_HPP
