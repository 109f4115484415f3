#ifndef DPPDYN_RATES_HPP
#define DPPDYN_RATES_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dppdyn/common.hpp"
#include "dppdyn/configuration.hpp"
#include "dppdyn/kernel.hpp"

namespace dppdyn {

enum class Dynamics { Glauber, Kawasaki };

const char* to_string(Dynamics mode);
Dynamics parse_dynamics(const std::string& name);

enum class WeightKind { NearestNeighbor, ExponentialDecay, Explicit };

const char* to_string(WeightKind kind);
WeightKind parse_weight_kind(const std::string& name);

/// Kawasaki interpolation exponent t and symmetric jump weight d(x,y).
struct RateSpec {
  double t = 0.0;
  WeightKind weight_kind = WeightKind::NearestNeighbor;
  double decay_rate = 1.0;  // ExponentialDecay only
  RealMatrix weight;        // d(x,y), zero diagonal
  double d1 = 0.0;          // min_x sum_y d(x,y)
  double d2 = 0.0;          // max_x sum_y d(x,y)

  double d(int x, int y) const { return weight(x, y); }
};

/// Nearest-neighbor weights are 1/deg(x) on the distinct distance-1
/// neighbors of x; exponential weights are exp(-rate * dist).
RateSpec make_rate_spec(const SiteSpace& space, double t, WeightKind kind = WeightKind::NearestNeighbor,
                        double decay_rate = 1.0, const RealMatrix& explicit_weight = {});

/// g_t(u, v) = ((1 + u)(1 + v))^{-t}
double g_t(double t, double u, double v);

// Rates as functions of Papangelou intensities.
inline double death_from_alpha(double a) { return 1.0 / (1.0 + a); }
inline double birth_from_alpha(double a) { return 1.0 - death_from_alpha(a); }
/// c(x,y; x xi') from alpha_x = alpha(x;xi'), alpha_y = alpha(y;xi').
inline double jump_from_alpha(double weight, double t, double alpha_x, double alpha_y) {
  return weight * alpha_y * g_t(t, alpha_x, alpha_y);
}

struct GlauberRates {
  double birth = 0.0;  // b(x; xi)
  double death = 0.0;  // d(x; x xi)
};

/// b(x;xi) = alpha/(1+alpha) and d(x;x xi) = beta/(1+beta) for x not in xi.
GlauberRates glauber_rates(const Kernel& k, int x, const Configuration& xi);

/// Birth rate at a hole x of xi.
double birth_rate(const Kernel& k, int x, const Configuration& xi);
/// Death rate of an occupied site x of eta.
double death_rate(const Kernel& k, int x, const Configuration& eta);

/// c(x,y;xi) = d(x,y) alpha(y;xi') g_t(alpha(x;xi'), alpha(y;xi')), xi' = xi \ x,
/// for x in xi and y a hole.
double kawasaki_rate(const Kernel& k, const RateSpec& spec, int x, int y, const Configuration& xi);

/// kawasaki_rate where the move is legal, zero otherwise.
double jump_rate_or_zero(const Kernel& k, const RateSpec& spec, int x, int y, const Configuration& xi);

using BirthFn = std::function<double(int x, const Configuration& xi)>;
using DeathFn = std::function<double(int x, const Configuration& eta)>;
using JumpFn = std::function<double(int x, int y, const Configuration& xi)>;

inline constexpr int kMaxExhaustiveSites = 12;

/// max over x not in xi of |b(x;xi) - alpha(x;xi) d(x;x xi)|, all xi.
double glauber_balance_residual(const Kernel& k, const BirthFn& birth, const DeathFn& death,
                                Exec exec = Exec::Parallel);
/// max over x != y not in xi of |alpha(x;xi) c(x,y;x xi) - alpha(y;xi) c(y,x;y xi)|, all xi.
double kawasaki_balance_residual(const Kernel& k, const JumpFn& jump, Exec exec = Exec::Parallel);

/// Exhaustive detailed-balance residual of the library's own rates (n <= 12).
double detailed_balance_residual(const Kernel& k, const RateSpec& spec, Dynamics mode,
                                 Exec exec = Exec::Parallel);

/// Existence and ergodicity constants of the dynamics.
struct LiggettConstants {
  Dynamics mode = Dynamics::Glauber;
  bool exhaustive = false;

  std::optional<double> c_sup;     // sup of single rates (exhaustive)
  double epsilon = 0.0;            // exact inf in exhaustive mode, else the analytic lower bound
  double epsilon_bound = 0.0;      // 1 (Glauber) or d1 lambda (1+|A|)^{-2t} (Kawasaki)
  std::vector<double> epsilon_by_size;  // Kawasaki: inf restricted to |xi| = s, s = 0..n-1

  std::optional<double> m_exact;   // sup_x sum_u gamma(x,u)
  RealMatrix gamma;                // interdependence matrix (exhaustive)
  std::optional<double> m1_exact;  // intensity-difference form of the interdependence
  double m1_bound = 0.0;           // (q/lambda)(1 + q(lambda+q)/lambda^2), times 2 d2 for Kawasaki
  double m1_bound_strict = 0.0;    // (1/lambda)(q + q^2(lambda+q)/lambda^2)^2, times 2 d2 for Kawasaki
  double a0 = 1.0;                 // M <= a0 M1 (Glauber; Kawasaki adds the exchange term)
  double lambda = 0.0;
  double q = 0.0;
  bool ergodic = false;
};

LiggettConstants liggett_constants(const Kernel& k, const RateSpec& spec, Dynamics mode, bool exhaustive,
                                   Exec exec = Exec::Parallel);

/// Table of alpha(x; xi) for every mask xi and hole x (NaN for occupied x),
/// laid out as [mask * n + x].
std::vector<double> alpha_table(const Kernel& k, Exec exec = Exec::Parallel);

}  // namespace dppdyn

#endif  // DPPDYN_RATES_HPP
