#include "dppdyn/rates.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "dppdyn/papangelou.hpp"
#include "dppdyn/parallel.hpp"

namespace dppdyn {

const char* to_string(Dynamics mode) {
  return mode == Dynamics::Glauber ? "glauber" : "kawasaki";
}

Dynamics parse_dynamics(const std::string& name) {
  if (name == "glauber") return Dynamics::Glauber;
  if (name == "kawasaki") return Dynamics::Kawasaki;
  throw Error(ErrorCode::ValidationError, "mode must be 'glauber' or 'kawasaki', got '" + name + "'");
}

const char* to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::NearestNeighbor: return "nearest-neighbor";
    case WeightKind::ExponentialDecay: return "exponential-decay";
    case WeightKind::Explicit: return "explicit";
  }
  return "unknown";
}

WeightKind parse_weight_kind(const std::string& name) {
  if (name == "nearest-neighbor") return WeightKind::NearestNeighbor;
  if (name == "exponential-decay") return WeightKind::ExponentialDecay;
  if (name == "explicit") return WeightKind::Explicit;
  throw Error(ErrorCode::ValidationError,
              "weight must be nearest-neighbor, exponential-decay or explicit, got '" + name + "'");
}

RateSpec make_rate_spec(const SiteSpace& space, double t, WeightKind kind, double decay_rate,
                        const RealMatrix& explicit_weight) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::ValidationError, "t must lie in [0,1]");
  const int n = space.n_sites();
  RateSpec spec;
  spec.t = t;
  spec.weight_kind = kind;
  spec.decay_rate = decay_rate;
  spec.weight = RealMatrix::Zero(n, n);

  switch (kind) {
    case WeightKind::NearestNeighbor:
      for (int x = 0; x < n; ++x) {
        int degree = 0;
        for (int y = 0; y < n; ++y)
          if (y != x && space.distance(x, y) == 1) ++degree;
        for (int y = 0; y < n; ++y)
          if (y != x && space.distance(x, y) == 1) spec.weight(x, y) = 1.0 / degree;
      }
      break;
    case WeightKind::ExponentialDecay:
      if (!(decay_rate > 0.0)) throw Error(ErrorCode::ValidationError, "decay rate must be positive");
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (y != x) spec.weight(x, y) = std::exp(-decay_rate * space.distance(x, y));
      break;
    case WeightKind::Explicit:
      if (explicit_weight.rows() != n || explicit_weight.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "weight matrix must be n x n");
      spec.weight = explicit_weight;
      break;
  }

  for (int x = 0; x < n; ++x) {
    if (spec.weight(x, x) != 0.0) throw Error(ErrorCode::ValidationError, "weight diagonal must be zero");
    for (int y = 0; y < n; ++y) {
      if (spec.weight(x, y) < 0.0) throw Error(ErrorCode::ValidationError, "weights must be nonnegative");
      if (std::abs(spec.weight(x, y) - spec.weight(y, x)) > 1e-14 * std::max(1.0, std::abs(spec.weight(x, y))))
        throw Error(ErrorCode::ValidationError, "weights must be symmetric");
    }
  }
  // Exact symmetry from here on.
  spec.weight = 0.5 * (spec.weight + spec.weight.transpose()).eval();
  const RealVector row = spec.weight.rowwise().sum();
  spec.d1 = row.minCoeff();
  spec.d2 = row.maxCoeff();
  if (n >= 2 && !(spec.d1 > 0.0))
    throw Error(ErrorCode::ValidationError, "every site needs a positive total jump weight (d1 > 0)");
  return spec;
}

double g_t(double t, double u, double v) {
  if (t == 0.0) return 1.0;
  return std::pow((1.0 + u) * (1.0 + v), -t);
}

GlauberRates glauber_rates(const Kernel& k, int x, const Configuration& xi) {
  const double a = alpha(k, x, xi);
  return {birth_from_alpha(a), death_from_alpha(a)};
}

double birth_rate(const Kernel& k, int x, const Configuration& xi) {
  return birth_from_alpha(alpha(k, x, xi));
}

double death_rate(const Kernel& k, int x, const Configuration& eta) {
  return death_from_alpha(alpha(k, x, eta.without(x)));
}

double kawasaki_rate(const Kernel& k, const RateSpec& spec, int x, int y, const Configuration& xi) {
  if (x == y) throw Error(ErrorCode::IdenticalSites, "jump needs distinct sites");
  if (!xi.contains(x)) throw Error(ErrorCode::SiteEmpty, "jump source " + std::to_string(x) + " is empty");
  if (xi.contains(y)) throw Error(ErrorCode::SiteOccupied, "jump target " + std::to_string(y) + " is occupied");
  const Configuration rest = xi.without(x);
  const double ax = alpha(k, x, rest);
  const double ay = alpha(k, y, rest);
  return jump_from_alpha(spec.d(x, y), spec.t, ax, ay);
}

double jump_rate_or_zero(const Kernel& k, const RateSpec& spec, int x, int y, const Configuration& xi) {
  if (x == y || !xi.contains(x) || xi.contains(y)) return 0.0;
  return kawasaki_rate(k, spec, x, y, xi);
}

namespace {

void require_enumerable(const Kernel& k) {
  if (k.n() > kMaxExhaustiveSites)
    throw Error(ErrorCode::EnumerationTooLarge,
                "exhaustive enumeration needs n <= " + std::to_string(kMaxExhaustiveSites));
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

double glauber_balance_residual(const Kernel& k, const BirthFn& birth, const DeathFn& death, Exec exec) {
  require_enumerable(k);
  const int n = k.n();
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<double> worst(count, 0.0);
  for_each_index(count, exec, [&](std::int64_t mask) {
    const Configuration xi = Configuration::from_mask(n, static_cast<std::uint64_t>(mask));
    double w = 0.0;
    for (int x : xi.holes()) {
      const double r = std::abs(birth(x, xi) - alpha(k, x, xi) * death(x, xi.with(x)));
      w = std::max(w, r);
    }
    worst[mask] = w;
  });
  return max_of(worst);
}

double kawasaki_balance_residual(const Kernel& k, const JumpFn& jump, Exec exec) {
  require_enumerable(k);
  const int n = k.n();
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<double> worst(count, 0.0);
  for_each_index(count, exec, [&](std::int64_t mask) {
    const Configuration xi = Configuration::from_mask(n, static_cast<std::uint64_t>(mask));
    const SiteList holes = xi.holes();
    double w = 0.0;
    for (size_t i = 0; i < holes.size(); ++i) {
      for (size_t j = i + 1; j < holes.size(); ++j) {
        const int x = holes[i];
        const int y = holes[j];
        const double lhs = alpha(k, x, xi) * jump(x, y, xi.with(x));
        const double rhs = alpha(k, y, xi) * jump(y, x, xi.with(y));
        w = std::max(w, std::abs(lhs - rhs));
      }
    }
    worst[mask] = w;
  });
  return max_of(worst);
}

double detailed_balance_residual(const Kernel& k, const RateSpec& spec, Dynamics mode, Exec exec) {
  if (mode == Dynamics::Glauber) {
    return glauber_balance_residual(
        k, [&](int x, const Configuration& xi) { return birth_rate(k, x, xi); },
        [&](int x, const Configuration& eta) { return death_rate(k, x, eta); }, exec);
  }
  return kawasaki_balance_residual(
      k, [&](int x, int y, const Configuration& xi) { return kawasaki_rate(k, spec, x, y, xi); }, exec);
}

std::vector<double> alpha_table(const Kernel& k, Exec exec) {
  require_enumerable(k);
  const int n = k.n();
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<double> table(static_cast<size_t>(count) * n);
  for_each_index(count, exec, [&](std::int64_t mask) {
    const auto values = alpha_all(k, Configuration::from_mask(n, static_cast<std::uint64_t>(mask)));
    std::copy(values.begin(), values.end(), table.begin() + mask * n);
  });
  return table;
}

namespace {

struct Table {
  int n;
  const std::vector<double>& data;
  double operator()(std::uint64_t mask, int x) const { return data[mask * n + x]; }
};

inline bool has(std::uint64_t mask, int s) { return (mask >> s) & 1u; }
inline std::uint64_t bit(int s) { return std::uint64_t{1} << s; }

void glauber_constants(const Kernel& k, const Table& alpha_of, Exec exec, LiggettConstants& out) {
  const int n = k.n();
  const std::uint64_t count = std::uint64_t{1} << n;
  out.gamma = RealMatrix::Zero(n, n);
  std::vector<double> c_row(n, 0.0), eps_row(n, std::numeric_limits<double>::infinity()), m1_row(n, 0.0);

  for_each_index(n, exec, [&](std::int64_t xi_) {
    const int x = static_cast<int>(xi_);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (has(mask, x)) continue;
      const double a = alpha_of(mask, x);
      const double b = birth_from_alpha(a);
      const double d = death_from_alpha(a);
      c_row[x] = std::max(c_row[x], std::max(b, d));
      eps_row[x] = std::min(eps_row[x], b + d);
    }
    for (int u = 0; u < n; ++u) {
      if (u == x) continue;
      double gamma = 0.0;
      double diff = 0.0;
      for (std::uint64_t mask = 0; mask < count; ++mask) {
        if (has(mask, x) || has(mask, u)) continue;
        const double a0 = alpha_of(mask, x);
        const double a1 = alpha_of(mask | bit(u), x);
        const double g = std::abs(birth_from_alpha(a0) - birth_from_alpha(a1)) +
                         std::abs(death_from_alpha(a1) - death_from_alpha(a0));
        gamma = std::max(gamma, g);
        diff = std::max(diff, a0 - a1);
      }
      out.gamma(x, u) = gamma;
      m1_row[x] += diff;
    }
  });

  out.c_sup = *std::max_element(c_row.begin(), c_row.end());
  out.epsilon = *std::min_element(eps_row.begin(), eps_row.end());
  out.m_exact = out.gamma.rowwise().sum().maxCoeff();
  out.m1_exact = *std::max_element(m1_row.begin(), m1_row.end());
}

void kawasaki_constants(const Kernel& k, const RateSpec& spec, const Table& alpha_of, Exec exec,
                        LiggettConstants& out) {
  const int n = k.n();
  const double t = spec.t;
  const std::uint64_t count = std::uint64_t{1} << n;
  out.gamma = RealMatrix::Zero(n, n);
  std::vector<double> c_row(n, 0.0), m1_row(n, 0.0);
  // eps_size[y * n + s]: inf over xi not containing y with |xi| = s
  std::vector<double> eps_size(static_cast<size_t>(n) * n, std::numeric_limits<double>::infinity());

  // c(x,y; x xi) for x, y not in xi
  auto jump = [&](std::uint64_t mask, int x, int y) {
    return jump_from_alpha(spec.d(x, y), t, alpha_of(mask, x), alpha_of(mask, y));
  };

  for_each_index(n, exec, [&](std::int64_t x_) {
    const int x = static_cast<int>(x_);
    // c^K row and epsilon with x playing the role of the fixed site y.
    std::vector<double> pair_sup(n, 0.0);
    for (int y = 0; y < n; ++y) {
      if (y == x) continue;
      double c_xy = 0.0;
      for (std::uint64_t mask = 0; mask < count; ++mask) {
        if (has(mask, x) || has(mask, y)) continue;
        c_xy = std::max(c_xy, std::max(jump(mask, x, y), jump(mask, y, x)));
      }
      pair_sup[y] = c_xy;
      c_row[x] += c_xy;
    }
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (has(mask, x)) continue;
      double total = 0.0;
      for (int z = 0; z < n; ++z) {
        if (z == x) continue;
        if (has(mask, z)) {
          total += jump(mask & ~bit(z), z, x);  // c(z, x; xi)
        } else {
          total += jump(mask, x, z);  // c(x, z; x xi)
        }
      }
      const int s = std::popcount(mask);
      double& slot = eps_size[static_cast<size_t>(x) * n + s];
      slot = std::min(slot, total);
    }
    for (int u = 0; u < n; ++u) {
      if (u == x) continue;
      // The exchange x <-> u itself: one of the two coupled copies can move
      // the discrepancy at u onto x.
      double gamma = pair_sup[u];
      double m1 = 0.0;
      for (int y = 0; y < n; ++y) {
        if (y == x || y == u) continue;
        double sup_c = 0.0;
        double sup_a = 0.0;
        for (std::uint64_t mask = 0; mask < count; ++mask) {
          if (has(mask, x) || has(mask, y) || has(mask, u)) continue;
          const std::uint64_t with_u = mask | bit(u);
          sup_c = std::max(sup_c, std::max(std::abs(jump(mask, x, y) - jump(with_u, x, y)),
                                           std::abs(jump(mask, y, x) - jump(with_u, y, x))));
          sup_a = std::max(sup_a, (alpha_of(mask, x) - alpha_of(with_u, x)) +
                                      (alpha_of(mask, y) - alpha_of(with_u, y)));
        }
        gamma += sup_c;
        m1 += spec.d(x, y) * sup_a;
      }
      out.gamma(x, u) = gamma;
      m1_row[x] += m1;
    }
  });

  out.c_sup = *std::max_element(c_row.begin(), c_row.end());
  out.m_exact = out.gamma.rowwise().sum().maxCoeff();
  out.m1_exact = *std::max_element(m1_row.begin(), m1_row.end());
  out.epsilon_by_size.assign(n, std::numeric_limits<double>::infinity());
  for (int y = 0; y < n; ++y)
    for (int s = 0; s < n; ++s)
      out.epsilon_by_size[s] = std::min(out.epsilon_by_size[s], eps_size[static_cast<size_t>(y) * n + s]);
  out.epsilon = *std::min_element(out.epsilon_by_size.begin(), out.epsilon_by_size.end());
}

}  // namespace

LiggettConstants liggett_constants(const Kernel& k, const RateSpec& spec, Dynamics mode, bool exhaustive,
                                   Exec exec) {
  if (spec.weight.rows() != k.n()) throw Error(ErrorCode::DimensionMismatch, "rate spec and kernel sizes differ");
  LiggettConstants out;
  out.mode = mode;
  out.exhaustive = exhaustive;
  out.lambda = k.lambda_margin();
  out.q = k.q_value();

  const double lam = out.lambda;
  const double q = out.q;
  const double norm = k.op_norm();
  double m1g = std::numeric_limits<double>::infinity();
  double m1g_strict = std::numeric_limits<double>::infinity();
  if (lam > 0.0) {
    m1g = (q / lam) * (1.0 + q * (lam + q) / (lam * lam));
    const double s = q + q * q * (lam + q) / (lam * lam);
    m1g_strict = s * s / lam;
  }
  if (mode == Dynamics::Glauber) {
    out.epsilon_bound = 1.0;
    out.a0 = 2.0;
    out.m1_bound = m1g;
    out.m1_bound_strict = m1g_strict;
  } else {
    out.epsilon_bound = lam > 0.0 ? spec.d1 * lam * std::pow(1.0 + norm, -2.0 * spec.t) : 0.0;
    out.a0 = std::max(1.0, spec.t * norm * std::pow(1.0 + norm, -spec.t));
    out.m1_bound = 2.0 * spec.d2 * m1g;
    out.m1_bound_strict = 2.0 * spec.d2 * m1g_strict;
  }

  if (!exhaustive) {
    out.epsilon = out.epsilon_bound;
    // Exchange dynamics conserve the particle number, so no analytic bound
    // can certify a unique invariant measure.
    out.ergodic = mode == Dynamics::Glauber && out.a0 * out.m1_bound_strict < out.epsilon;
    return out;
  }

  const auto data = alpha_table(k, exec);
  const Table table{k.n(), data};
  if (mode == Dynamics::Glauber) {
    glauber_constants(k, table, exec, out);
  } else {
    kawasaki_constants(k, spec, table, exec, out);
  }
  out.ergodic = *out.m_exact < out.epsilon;
  return out;
}

}  // namespace dppdyn
