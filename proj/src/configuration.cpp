#include "dppdyn/configuration.hpp"

#include <bit>

namespace dppdyn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularRestriction: return "SingularRestriction";
    case ErrorCode::SiteOccupied: return "SiteOccupied";
    case ErrorCode::SiteEmpty: return "SiteEmpty";
    case ErrorCode::IdenticalSites: return "IdenticalSites";
    case ErrorCode::NumericallySingular: return "NumericallySingular";
    case ErrorCode::RefactorizationFailure: return "RefactorizationFailure";
    case ErrorCode::DuplicateSites: return "DuplicateSites";
    case ErrorCode::ConfigurationNotInWindow: return "ConfigurationNotInWindow";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::TooManySites: return "TooManySites";
    case ErrorCode::NotReversible: return "NotReversible";
    case ErrorCode::AssumptionAViolated: return "AssumptionAViolated";
    case ErrorCode::RateOverflow: return "RateOverflow";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::IllegalEvent: return "IllegalEvent";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Configuration::Configuration(int n_sites) {
  if (n_sites < 0) throw Error(ErrorCode::InvalidArgument, "negative site count");
  bits_.assign(static_cast<size_t>(n_sites), 0);
}

Configuration::Configuration(int n_sites, const SiteList& occupied) : Configuration(n_sites) {
  for (int s : occupied) {
    check_site(s);
    if (bits_[s]) throw Error(ErrorCode::DuplicateSites, "site " + std::to_string(s) + " listed twice");
    bits_[s] = 1;
    ++size_;
  }
}

Configuration Configuration::from_mask(int n_sites, std::uint64_t mask) {
  if (n_sites > 64) throw Error(ErrorCode::TooManySites, "mask form needs n_sites <= 64");
  if (n_sites < 64 && (mask >> n_sites) != 0)
    throw Error(ErrorCode::InvalidArgument, "mask has bits beyond n_sites");
  Configuration c(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    if ((mask >> i) & 1u) c.bits_[i] = 1;
  }
  c.size_ = std::popcount(mask);
  return c;
}

Configuration Configuration::full(int n_sites) {
  Configuration c(n_sites);
  std::fill(c.bits_.begin(), c.bits_.end(), 1);
  c.size_ = n_sites;
  return c;
}

void Configuration::check_site(int site) const {
  if (site < 0 || site >= n_sites())
    throw Error(ErrorCode::InvalidArgument,
                "site " + std::to_string(site) + " outside 0.." + std::to_string(n_sites() - 1));
}

bool Configuration::contains(int site) const {
  check_site(site);
  return bits_[site] != 0;
}

void Configuration::insert(int site) {
  if (contains(site)) throw Error(ErrorCode::SiteOccupied, "site " + std::to_string(site));
  bits_[site] = 1;
  ++size_;
}

void Configuration::erase(int site) {
  if (!contains(site)) throw Error(ErrorCode::SiteEmpty, "site " + std::to_string(site));
  bits_[site] = 0;
  --size_;
}

Configuration Configuration::with(int site) const {
  Configuration c = *this;
  c.insert(site);
  return c;
}

Configuration Configuration::without(int site) const {
  Configuration c = *this;
  c.erase(site);
  return c;
}

SiteList Configuration::sites() const {
  SiteList out;
  out.reserve(size_);
  for (int i = 0; i < n_sites(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

SiteList Configuration::holes() const {
  SiteList out;
  out.reserve(n_sites() - size_);
  for (int i = 0; i < n_sites(); ++i)
    if (!bits_[i]) out.push_back(i);
  return out;
}

std::uint64_t Configuration::mask() const {
  if (n_sites() > 64) throw Error(ErrorCode::TooManySites, "mask form needs n_sites <= 64");
  std::uint64_t m = 0;
  for (int i = 0; i < n_sites(); ++i)
    if (bits_[i]) m |= std::uint64_t{1} << i;
  return m;
}

std::string Configuration::bitstring() const {
  std::string s(bits_.size(), '0');
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

SiteList sites_of_mask(std::uint64_t mask) {
  SiteList out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

}  // namespace dppdyn
