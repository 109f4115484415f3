#ifndef DPPDYN_SRC_PAPANGELOU_DETAIL_HPP
#define DPPDYN_SRC_PAPANGELOU_DETAIL_HPP

#include "dppdyn/papangelou.hpp"

namespace dppdyn::detail {

// Snapshot from a lower Cholesky factor `chol` of A(order, order);
// `position` maps a site to its index in `order` (or -1).
IntensitySnapshot snapshot_from_factor(const Kernel& k, const Configuration& xi, const SiteList& order,
                                       const std::vector<int>& position, const Matrix& chol, bool with_pairs);

// Throws NumericallySingular unless value is a usable intensity.
double checked_intensity(const Kernel& k, double value, int x);

}  // namespace dppdyn::detail

#endif  // DPPDYN_SRC_PAPANGELOU_DETAIL_HPP
