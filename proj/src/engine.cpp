#include <cmath>

#include "dppdyn/papangelou.hpp"
#include "papangelou_detail.hpp"

namespace dppdyn {

PapangelouEngine::PapangelouEngine(const Kernel& k, const Configuration& initial, int refactor_period)
    : k_(&k), xi_(initial), position_(k.n(), -1), refactor_period_(refactor_period) {
  if (initial.n_sites() != k.n())
    throw Error(ErrorCode::DimensionMismatch, "configuration and kernel sizes differ");
  if (refactor_period < 1) throw Error(ErrorCode::InvalidArgument, "refactor period must be >= 1");
  order_ = initial.sites();
  for (size_t p = 0; p < order_.size(); ++p) position_[order_[p]] = static_cast<int>(p);
  refactorize();
}

void PapangelouEngine::refactorize() {
  updates_since_refactor_ = 0;
  if (order_.empty()) {
    chol_.resize(0, 0);
    return;
  }
  Eigen::LLT<Matrix> llt(principal(k_->A(), order_));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NumericallySingular, "refactorization of A(xi,xi) failed");
  chol_ = llt.matrixL();
}

void PapangelouEngine::after_update() {
  if (++updates_since_refactor_ >= refactor_period_) refactorize();
}

void PapangelouEngine::add(int x) {
  if (x < 0 || x >= k_->n()) throw Error(ErrorCode::InvalidArgument, "site out of range");
  if (xi_.contains(x)) throw Error(ErrorCode::SiteOccupied, "site " + std::to_string(x));
  const auto m = static_cast<Eigen::Index>(order_.size());

  // New row [w*, delta] with L w = A(xi, x), delta^2 = A(x,x) - |w|^2.
  Vector w;
  double delta2 = k_->diag(x);
  if (m > 0) {
    w = chol_.triangularView<Eigen::Lower>().solve(k_->A()(order_, x));
    delta2 -= w.squaredNorm();
  }
  detail::checked_intensity(*k_, delta2, x);

  chol_.conservativeResize(m + 1, m + 1);
  chol_.col(m).setZero();
  if (m > 0) chol_.row(m).head(m) = w.adjoint();
  chol_(m, m) = std::sqrt(delta2);

  xi_.insert(x);
  position_[x] = static_cast<int>(m);
  order_.push_back(x);
  after_update();
}

void PapangelouEngine::remove(int x) {
  if (x < 0 || x >= k_->n()) throw Error(ErrorCode::InvalidArgument, "site out of range");
  if (!xi_.contains(x)) throw Error(ErrorCode::SiteEmpty, "site " + std::to_string(x));
  const auto m = static_cast<Eigen::Index>(order_.size());
  const auto p = static_cast<Eigen::Index>(position_[x]);
  const Eigen::Index tail = m - p - 1;

  // Dropping row/column p leaves L22 L22* = A22 - v v*, where v is the removed
  // column below the diagonal; absorb v back with a rank-one update.
  Vector v = chol_.col(p).tail(tail);
  Matrix next(m - 1, m - 1);
  next.setZero();
  next.topLeftCorner(p, p) = chol_.topLeftCorner(p, p);
  next.bottomLeftCorner(tail, p) = chol_.bottomLeftCorner(tail, p);
  next.bottomRightCorner(tail, tail) = chol_.bottomRightCorner(tail, tail);

  for (Eigen::Index j = 0; j < tail; ++j) {
    const Eigen::Index c = p + j;
    const double l_jj = next(c, c).real();
    const double r = std::hypot(l_jj, std::abs(v(j)));
    const double cosine = r / l_jj;
    const Complex sine = v(j) / l_jj;
    next(c, c) = r;
    for (Eigen::Index i = j + 1; i < tail; ++i) {
      const Eigen::Index row = p + i;
      next(row, c) = (next(row, c) + std::conj(sine) * v(i)) / cosine;
      v(i) = cosine * v(i) - sine * next(row, c);
    }
  }
  chol_ = std::move(next);

  xi_.erase(x);
  order_.erase(order_.begin() + p);
  position_[x] = -1;
  for (Eigen::Index i = p; i < m - 1; ++i) position_[order_[i]] = static_cast<int>(i);
  after_update();
}

double PapangelouEngine::alpha(int y) const {
  if (y < 0 || y >= k_->n()) throw Error(ErrorCode::InvalidArgument, "site out of range");
  if (xi_.contains(y)) throw Error(ErrorCode::SiteOccupied, "site " + std::to_string(y));
  if (order_.empty()) return k_->diag(y);
  const Vector w = chol_.triangularView<Eigen::Lower>().solve(k_->A()(order_, y));
  return detail::checked_intensity(*k_, k_->diag(y) - w.squaredNorm(), y);
}

double PapangelouEngine::alpha_without(int x) const {
  if (x < 0 || x >= k_->n()) throw Error(ErrorCode::InvalidArgument, "site out of range");
  if (!xi_.contains(x)) throw Error(ErrorCode::SiteEmpty, "site " + std::to_string(x));
  const auto m = static_cast<Eigen::Index>(order_.size());
  const auto p = static_cast<Eigen::Index>(position_[x]);
  // G(x,x) = |L^{-1} e_p|^2; only rows >= p of the solution are nonzero.
  Vector e = Vector::Zero(m - p);
  e(0) = 1.0;
  const Vector z = chol_.bottomRightCorner(m - p, m - p).triangularView<Eigen::Lower>().solve(e);
  return detail::checked_intensity(*k_, 1.0 / z.squaredNorm(), x);
}

IntensitySnapshot PapangelouEngine::snapshot(bool with_pairs) const {
  return detail::snapshot_from_factor(*k_, xi_, order_, position_, chol_, with_pairs);
}

double PapangelouEngine::factorization_error() const {
  if (order_.empty()) return 0.0;
  const Matrix product = chol_ * chol_.adjoint();
  return (product - principal(k_->A(), order_)).cwiseAbs().maxCoeff();
}

double PapangelouEngine::log_det() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < chol_.rows(); ++i) s += 2.0 * std::log(chol_(i, i).real());
  return s;
}

}  // namespace dppdyn
