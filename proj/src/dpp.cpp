#include "dppdyn/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dppdyn/papangelou.hpp"
#include "dppdyn/random.hpp"

namespace dppdyn {

DppMeasure::DppMeasure(const Kernel& k) : k_(&k) {
  const RealVector& a = k.eigenvalues();
  k_eigenvalues_ = a.array() / (1.0 + a.array());
  log_det_complement_ = -(1.0 + a.array()).log().sum();
}

namespace {

void require_distinct(int n, const SiteList& sites) {
  std::set<int> seen;
  for (int s : sites) {
    if (s < 0 || s >= n) throw Error(ErrorCode::InvalidArgument, "site out of range");
    if (!seen.insert(s).second) throw Error(ErrorCode::DuplicateSites, "site " + std::to_string(s) + " repeated");
  }
}

double log_det_pd(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NumericallySingular, "matrix not positive definite");
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += 2.0 * std::log(llt.matrixLLT()(i, i).real());
  return s;
}

}  // namespace

double correlation(const DppMeasure& m, const SiteList& sites) {
  if (sites.empty()) throw Error(ErrorCode::InvalidArgument, "correlation needs at least one site");
  require_distinct(m.n(), sites);
  return principal(m.kernel().K(), sites).partialPivLu().determinant().real();
}

double marginal_probability(const DppMeasure& m, const SiteList& window, const Configuration& zeta) {
  require_distinct(m.n(), window);
  if (zeta.n_sites() != m.n()) throw Error(ErrorCode::DimensionMismatch, "configuration size");
  SiteList sorted = window;
  std::sort(sorted.begin(), sorted.end());
  SiteList local;  // positions of zeta inside the window
  for (int s : zeta.sites()) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), s);
    if (it == sorted.end() || *it != s)
      throw Error(ErrorCode::ConfigurationNotInWindow, "site " + std::to_string(s) + " outside window");
    local.push_back(static_cast<int>(it - sorted.begin()));
  }
  if (sorted.empty()) return 1.0;

  const auto w = static_cast<Eigen::Index>(sorted.size());
  const Matrix complement = Matrix::Identity(w, w) - principal(m.kernel().K(), sorted);
  const Matrix bracket = restrict_a_bracket(m.kernel(), sorted);
  return std::exp(log_det_pd(complement) + log_det_pd(principal(bracket, local)));
}

std::vector<double> state_probabilities(const DppMeasure& m) {
  const int n = m.n();
  if (n > 24) throw Error(ErrorCode::TooManySites, "state enumeration needs n <= 24");
  SiteList all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const Matrix complement = Matrix::Identity(n, n) - m.kernel().K();
  const double log_norm = log_det_pd(complement);
  const Matrix bracket = restrict_a_bracket(m.kernel(), all);
  std::vector<double> out(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < out.size(); ++mask)
    out[mask] = std::exp(log_norm + log_det_pd(principal(bracket, sites_of_mask(mask))));
  return out;
}

Configuration sample(const DppMeasure& m, std::uint64_t seed) {
  const int n = m.n();
  Rng rng(seed);
  const RealVector& lam = m.k_eigenvalues();
  std::vector<Eigen::Index> chosen;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (uniform01(rng) < lam(i)) chosen.push_back(i);

  Matrix v = m.kernel().eigenvectors()(Eigen::all, chosen);
  Configuration out(n);
  while (v.cols() > 0) {
    // P(site j) = sum_i |V(j,i)|^2 / k; inverse CDF over ascending site index.
    const RealVector weights = v.rowwise().squaredNorm();
    const double total = weights.sum();
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    int pick = -1;
    for (int j = 0; j < n; ++j) {
      if (out.contains(j) || weights(j) <= 0.0) continue;
      acc += weights(j);
      pick = j;
      if (acc > target) break;
    }
    if (pick < 0) throw Error(ErrorCode::NumericallySingular, "sampler found no admissible site");
    out.insert(pick);

    // Restrict the span to vectors vanishing at `pick`.
    Eigen::Index pivot = 0;
    v.row(pick).cwiseAbs().maxCoeff(&pivot);
    const Vector pv = v.col(pivot) / v(pick, pivot);
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      if (c != pivot) v.col(c) -= pv * v(pick, c);
    Matrix reduced(n, v.cols() - 1);
    for (Eigen::Index c = 0, r = 0; c < v.cols(); ++c)
      if (c != pivot) reduced.col(r++) = v.col(c);

    // Modified Gram-Schmidt, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < reduced.cols(); ++c) {
        for (Eigen::Index p = 0; p < c; ++p) reduced.col(c) -= reduced.col(p) * reduced.col(p).dot(reduced.col(c));
        reduced.col(c).normalize();
      }
    }
    v = std::move(reduced);
  }
  return out;
}

namespace {

// prod_i alpha(x_i; x_1 .. x_{i-1} outside) with x_i ascending.
double product_intensity(const Kernel& k, const SiteList& zeta, const Configuration& outside) {
  Configuration state = outside;
  double prod = 1.0;
  for (int x : zeta) {
    prod *= alpha(k, x, state);
    state.insert(x);
  }
  return prod;
}

}  // namespace

DlrResult dlr_residual(const DppMeasure& m, const SiteList& window, const ConfigFunction& f,
                       std::uint64_t sample_budget, std::uint64_t seed) {
  const int n = m.n();
  require_distinct(n, window);
  if (static_cast<int>(window.size()) > kMaxDlrWindow)
    throw Error(ErrorCode::WindowTooLarge, "window has more than 12 sites");
  SiteList win = window;
  std::sort(win.begin(), win.end());
  const std::uint64_t inner_count = std::uint64_t{1} << win.size();

  auto specification_average = [&](const Configuration& outside) {
    double z = 0.0;
    double acc = 0.0;
    for (std::uint64_t sub = 0; sub < inner_count; ++sub) {
      SiteList zeta;
      Configuration full = outside;
      for (size_t b = 0; b < win.size(); ++b) {
        if ((sub >> b) & 1u) {
          zeta.push_back(win[b]);
          full.insert(win[b]);
        }
      }
      const double weight = product_intensity(m.kernel(), zeta, outside);
      z += weight;
      acc += weight * f(full);
    }
    return acc / z;
  };

  auto strip_window = [&](Configuration xi) {
    for (int s : win)
      if (xi.contains(s)) xi.erase(s);
    return xi;
  };

  DlrResult result;
  if (n <= kMaxExactDlrSites) {
    const auto probs = state_probabilities(m);
    std::uint64_t window_mask = 0;
    for (int s : win) window_mask |= std::uint64_t{1} << s;
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::uint64_t mask = 0; mask < probs.size(); ++mask)
      lhs += probs[mask] * f(Configuration::from_mask(n, mask));
    // The inner average depends on xi only through xi outside the window, so
    // group the outer integral by that restriction.
    for (std::uint64_t mask = 0; mask < probs.size(); ++mask) {
      if (mask & window_mask) continue;
      double weight = 0.0;
      for (std::uint64_t sub = 0; sub < inner_count; ++sub) {
        std::uint64_t full = mask;
        for (size_t b = 0; b < win.size(); ++b)
          if ((sub >> b) & 1u) full |= std::uint64_t{1} << win[b];
        weight += probs[full];
      }
      rhs += weight * specification_average(Configuration::from_mask(n, mask));
    }
    result.residual = std::abs(lhs - rhs);
    result.exact = true;
    return result;
  }

  if (sample_budget < 2) throw Error(ErrorCode::InsufficientData, "need at least two samples");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < sample_budget; ++i) {
    const Configuration xi = sample(m, derive_seed(seed, i));
    const double d = f(xi) - specification_average(strip_window(xi));
    const double delta = d - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (d - mean);
  }
  const double var = m2 / static_cast<double>(sample_budget - 1);
  result.residual = std::abs(mean);
  result.standard_error = std::sqrt(var / static_cast<double>(sample_budget));
  result.exact = false;
  return result;
}

}  // namespace dppdyn
