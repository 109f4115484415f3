#include "dppdyn/papangelou.hpp"

#include "papangelou_detail.hpp"

#include <cmath>
#include <limits>

#include "dppdyn/parallel.hpp"
#include "dppdyn/random.hpp"

namespace dppdyn {

namespace {

void require_site(const Kernel& k, int x) {
  if (x < 0 || x >= k.n()) throw Error(ErrorCode::InvalidArgument, "site " + std::to_string(x) + " out of range");
}

void require_hole(const Kernel& k, int x, const Configuration& xi) {
  if (xi.n_sites() != k.n())
    throw Error(ErrorCode::DimensionMismatch, "configuration and kernel sizes differ");
  require_site(k, x);
  if (xi.contains(x)) throw Error(ErrorCode::SiteOccupied, "site " + std::to_string(x) + " is occupied");
}

double checked(const Kernel& k, double value, int x) {
  if (!(value > kSingularFraction * k.op_norm()) || !std::isfinite(value))
    throw Error(ErrorCode::NumericallySingular,
                "Schur complement " + std::to_string(value) + " at site " + std::to_string(x));
  return value;
}

Eigen::LLT<Matrix> factor(const Kernel& k, const SiteList& sites) {
  Eigen::LLT<Matrix> llt(principal(k.A(), sites));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NumericallySingular, "A(xi,xi) is not numerically positive definite");
  return llt;
}

double real_det(const Matrix& m) {
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant().real();
}

}  // namespace

double alpha(const Kernel& k, int x, const Configuration& xi) {
  require_hole(k, x, xi);
  if (xi.empty()) return k.diag(x);
  const SiteList sites = xi.sites();
  const auto llt = factor(k, sites);
  const Vector w = llt.matrixL().solve(k.A()(sites, x));
  return checked(k, k.diag(x) - w.squaredNorm(), x);
}

double alpha_det_ratio(const Kernel& k, int x, const Configuration& xi) {
  require_hole(k, x, xi);
  const SiteList sites = xi.sites();
  SiteList extended = sites;
  extended.push_back(x);
  const double num = real_det(principal(k.A(), extended));
  const double den = real_det(principal(k.A(), sites));
  return checked(k, num / den, x);
}

double beta(const Kernel& k, int x, const Configuration& xi) {
  return 1.0 / alpha(k, x, xi);
}

double alpha_variational(const Kernel& k, int x, const Configuration& xi) {
  require_hole(k, x, xi);
  const SiteList sites = xi.sites();
  if (sites.empty()) return k.diag(x);

  // Normal equations A(xi,xi) c = A(xi,x); the minimizer is f = sum c_y e_y.
  const Matrix gram = principal(k.A(), sites);
  const Vector coeffs = gram.colPivHouseholderQr().solve(k.A()(sites, x));

  SiteList support = {x};
  support.insert(support.end(), sites.begin(), sites.end());
  Vector v(static_cast<Eigen::Index>(support.size()));
  v(0) = 1.0;
  v.tail(coeffs.size()) = -coeffs;
  const double value = (v.adjoint() * principal(k.A(), support) * v)(0, 0).real();
  return checked(k, value, x);
}

double beta_variational(const Kernel& k, int x, const Configuration& xi) {
  require_hole(k, x, xi);
  SiteList rest;  // E \ (x xi)
  for (int y = 0; y < k.n(); ++y)
    if (y != x && !xi.contains(y)) rest.push_back(y);

  const Matrix& b = k.A_inverse();
  if (rest.empty()) return b(x, x).real();

  const Matrix gram = principal(b, rest);
  const Vector coeffs = gram.colPivHouseholderQr().solve(b(rest, x));

  SiteList support = {x};
  support.insert(support.end(), rest.begin(), rest.end());
  Vector v(static_cast<Eigen::Index>(support.size()));
  v(0) = 1.0;
  v.tail(coeffs.size()) = -coeffs;
  const double value = (v.adjoint() * principal(b, support) * v)(0, 0).real();
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorCode::NumericallySingular, "dual variational value not positive");
  return value;
}

namespace {

void require_pair(const Kernel& k, int x, int u, const Configuration& xi) {
  require_hole(k, x, xi);
  require_hole(k, u, xi);
  if (x == u) throw Error(ErrorCode::IdenticalSites, "x and u coincide");
}

}  // namespace

double alpha_difference(const Kernel& k, int x, int u, const Configuration& xi) {
  require_pair(k, x, u, xi);
  const SiteList sites = xi.sites();
  Complex s = k.A(x, u);
  double alpha_u = k.diag(u);
  if (!sites.empty()) {
    const auto llt = factor(k, sites);
    const Vector wx = llt.matrixL().solve(k.A()(sites, x));
    const Vector wu = llt.matrixL().solve(k.A()(sites, u));
    s -= wx.dot(wu);  // conj(wx) . wu = A(x,xi) A(xi,xi)^{-1} A(xi,u)
    alpha_u -= wu.squaredNorm();
  }
  return std::norm(s) / checked(k, alpha_u, u);
}

double alpha_difference_restricted(const Kernel& k, int x, int u, const Configuration& xi) {
  require_pair(k, x, u, xi);
  SiteList idx = {x, u};
  for (int y : xi.sites()) idx.push_back(y);
  const Matrix inv = principal(k.A(), idx).partialPivLu().inverse();
  const Eigen::Matrix2cd schur = inv.topLeftCorner<2, 2>().inverse();
  const double s_uu = checked(k, schur(1, 1).real(), u);
  return (schur(0, 1) * schur(1, 0)).real() / s_uu;
}

std::vector<double> alpha_all(const Kernel& k, const Configuration& xi) {
  if (xi.n_sites() != k.n())
    throw Error(ErrorCode::DimensionMismatch, "configuration and kernel sizes differ");
  std::vector<double> out(k.n(), std::numeric_limits<double>::quiet_NaN());
  const SiteList sites = xi.sites();
  const SiteList holes = xi.holes();
  if (holes.empty()) return out;
  if (sites.empty()) {
    for (int y : holes) out[y] = k.diag(y);
    return out;
  }
  const auto llt = factor(k, sites);
  const Matrix w = llt.matrixL().solve(k.A()(sites, holes));
  for (size_t j = 0; j < holes.size(); ++j) {
    const int y = holes[j];
    out[y] = checked(k, k.diag(y) - w.col(static_cast<Eigen::Index>(j)).squaredNorm(), y);
  }
  return out;
}

namespace detail {

IntensitySnapshot snapshot_from_factor(const Kernel& k, const Configuration& xi, const SiteList& order,
                                       const std::vector<int>& position, const Matrix& chol, bool with_pairs) {
  IntensitySnapshot snap;
  snap.occupied = xi.sites();
  snap.holes = xi.holes();
  const auto m = static_cast<Eigen::Index>(order.size());
  const auto h = static_cast<Eigen::Index>(snap.holes.size());
  snap.alpha_hole.resize(h);
  snap.alpha_removed.resize(m);

  if (m == 0) {
    for (Eigen::Index j = 0; j < h; ++j) snap.alpha_hole[j] = k.diag(snap.holes[j]);
    if (with_pairs) snap.alpha_pair = RealMatrix(0, h);
    return snap;
  }

  const Matrix chol_inv = chol.triangularView<Eigen::Lower>().solve(Matrix::Identity(m, m));
  // G = A(xi,xi)^{-1} = chol_inv* chol_inv
  RealVector g_diag(m);
  for (Eigen::Index p = 0; p < m; ++p) g_diag(p) = chol_inv.col(p).squaredNorm();

  Matrix w(m, h);
  if (h > 0) w = chol_inv * k.A()(order, snap.holes);
  for (Eigen::Index j = 0; j < h; ++j) {
    const int y = snap.holes[j];
    snap.alpha_hole[j] = checked(k, k.diag(y) - w.col(j).squaredNorm(), y);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const int x = snap.occupied[i];
    snap.alpha_removed[i] = checked(k, 1.0 / g_diag(position[x]), x);
  }
  if (with_pairs) {
    // alpha(y; xi \ x) = alpha(y; xi) + |(G a_y)_x|^2 / G(x,x)
    snap.alpha_pair.resize(m, h);
    Matrix g_a(m, h);
    if (h > 0) g_a = chol_inv.adjoint() * w;
    for (Eigen::Index i = 0; i < m; ++i) {
      const int p = position[snap.occupied[i]];
      for (Eigen::Index j = 0; j < h; ++j)
        snap.alpha_pair(i, j) = snap.alpha_hole[j] + std::norm(g_a(p, j)) / g_diag(p);
    }
  }
  return snap;
}

double checked_intensity(const Kernel& k, double value, int x) { return checked(k, value, x); }

}  // namespace detail

IntensitySnapshot intensity_snapshot(const Kernel& k, const Configuration& xi, bool with_pairs) {
  if (xi.n_sites() != k.n())
    throw Error(ErrorCode::DimensionMismatch, "configuration and kernel sizes differ");
  const SiteList order = xi.sites();
  std::vector<int> position(k.n(), -1);
  for (size_t p = 0; p < order.size(); ++p) position[order[p]] = static_cast<int>(p);
  Matrix chol;
  if (!order.empty()) chol = factor(k, order).matrixL();
  return detail::snapshot_from_factor(k, xi, order, position, chol, with_pairs);
}

AlphaBoundsReport alpha_bounds_check(const Kernel& k, Exec exec, std::uint64_t samples, std::uint64_t seed) {
  const int n = k.n();
  AlphaBoundsReport report;
  const auto assumption = check_assumption_a(k);
  report.lambda = assumption.lambda;
  report.lower_bound_applies = assumption.holds;
  report.exhaustive = n <= 16;
  const std::int64_t count = report.exhaustive ? (std::int64_t{1} << n) : static_cast<std::int64_t>(samples);

  struct Slot {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::uint64_t checked = 0;
    std::optional<AlphaBoundsReport::Witness> violation;
  };
  std::vector<Slot> slots(count);

  for_each_index(count, exec, [&](std::int64_t i) {
    Configuration xi(n);
    if (report.exhaustive) {
      xi = Configuration::from_mask(n, static_cast<std::uint64_t>(i));
    } else {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      for (int s = 0; s < n; ++s)
        if (rng() & 1u) xi.insert(s);
    }
    const auto values = alpha_all(k, xi);
    Slot& slot = slots[i];
    for (int x = 0; x < n; ++x) {
      if (xi.contains(x)) continue;
      const double a = values[x];
      ++slot.checked;
      slot.lo = std::min(slot.lo, a);
      slot.hi = std::max(slot.hi, a);
      if (slot.violation) continue;
      const double slack = 1e-12 * k.op_norm();
      if (a > k.diag(x) + slack) {
        slot.violation = AlphaBoundsReport::Witness{x, xi.bitstring(), a, "upper"};
      } else if (assumption.holds && a < assumption.lambda - slack) {
        slot.violation = AlphaBoundsReport::Witness{x, xi.bitstring(), a, "lower"};
      }
    }
  });

  report.min_alpha = std::numeric_limits<double>::infinity();
  report.max_alpha = -std::numeric_limits<double>::infinity();
  for (const Slot& s : slots) {
    report.checked += s.checked;
    report.min_alpha = std::min(report.min_alpha, s.lo);
    report.max_alpha = std::max(report.max_alpha, s.hi);
    if (!report.violation && s.violation) report.violation = s.violation;
  }
  return report;
}

}  // namespace dppdyn
