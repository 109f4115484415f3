#ifndef DPPDYN_CONFIGURATION_HPP
#define DPPDYN_CONFIGURATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dppdyn/common.hpp"

namespace dppdyn {

/// A subset of the site set {0..n-1}: the state of the particle system.
///
/// Bit i of `mask()` is the occupancy of site i. Exhaustive enumerations,
/// generator matrices and event logs all use this indexing.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int n_sites);
  Configuration(int n_sites, const SiteList& occupied);

  static Configuration from_mask(int n_sites, std::uint64_t mask);
  static Configuration full(int n_sites);

  int n_sites() const { return static_cast<int>(bits_.size()); }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(int site) const;

  // Throws SiteOccupied / SiteEmpty on an illegal update.
  void insert(int site);
  void erase(int site);

  Configuration with(int site) const;
  Configuration without(int site) const;

  /// Occupied sites in ascending order.
  SiteList sites() const;
  /// Empty sites in ascending order.
  SiteList holes() const;

  std::uint64_t mask() const;  // requires n_sites <= 64
  std::string bitstring() const;

  bool operator==(const Configuration& other) const = default;

 private:
  void check_site(int site) const;

  std::vector<std::uint8_t> bits_;
  int size_ = 0;
};

/// Sites of `mask` in ascending order.
SiteList sites_of_mask(std::uint64_t mask);

}  // namespace dppdyn

#endif  // DPPDYN_CONFIGURATION_HPP
