#include <doctest.h>

#include <map>

#include "dppdyn/dpp.hpp"
#include "dppdyn/papangelou.hpp"
#include "oracles.hpp"

using namespace dppdyn;

TEST_CASE("two-site state probabilities") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const DppMeasure m(k);
  const auto p = state_probabilities(m);
  const double z = 8.75;
  CHECK(p[0] == doctest::Approx(1.0 / z).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(2.0 / z).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(2.0 / z).epsilon(1e-14));
  CHECK(p[3] == doctest::Approx(3.75 / z).epsilon(1e-14));
  CHECK(correlation(m, {0, 1}) == doctest::Approx(3.75 / z).epsilon(1e-14));
  CHECK(m.log_det_complement() == doctest::Approx(-std::log(z)).epsilon(1e-14));
}

TEST_CASE("probabilities, correlations and marginals against determinant oracles") {
  const int n = 7;
  const Matrix a = oracle::random_dense_pd(n, 2);
  const Kernel k = Kernel::from_matrix(a);
  const DppMeasure m(k);
  const auto p = state_probabilities(m);
  double total = 0.0;
  for (std::uint64_t s = 0; s < p.size(); ++s) {
    CHECK(p[s] == doctest::Approx(oracle::probability(a, s)).epsilon(1e-11));
    total += p[s];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

  const Matrix kk = oracle::marginal_kernel(a);
  const SiteList tuple = {0, 3, 5};
  CHECK(correlation(m, tuple) == doctest::Approx(oracle::det(oracle::sub(kk, tuple)).real()).epsilon(1e-11));
  // inclusion probability by summing the exact law
  double incl = 0.0;
  for (std::uint64_t s = 0; s < p.size(); ++s)
    if ((s & 0b101001) == 0b101001) incl += p[s];
  CHECK(correlation(m, tuple) == doctest::Approx(incl).epsilon(1e-11));

  // window marginal: sum the law over the complement
  const SiteList window = {1, 2, 4};
  const std::uint64_t wmask = 0b10110;
  const Configuration zeta(n, {2, 4});
  double marg = 0.0;
  for (std::uint64_t s = 0; s < p.size(); ++s)
    if ((s & wmask) == zeta.mask()) marg += p[s];
  CHECK(marginal_probability(m, window, zeta) == doctest::Approx(marg).epsilon(1e-11));
  CHECK(m.expected_size() == doctest::Approx(kk.trace().real()).epsilon(1e-12));
}

TEST_CASE("Papangelou intensity is the ratio of neighbouring state probabilities") {
  const int n = 6;
  const Matrix a = oracle::random_kernel(n, 8, true);
  const Kernel k = Kernel::from_matrix(a);
  const auto p = state_probabilities(DppMeasure(k));
  for (std::uint64_t s = 0; s < p.size(); ++s)
    for (int x = 0; x < n; ++x)
      if (!(s & (1u << x)))
        CHECK(p[s | (1u << x)] / p[s] ==
              doctest::Approx(alpha(k, x, Configuration::from_mask(n, s))).epsilon(1e-11));
}

TEST_CASE("sampler is deterministic per seed and roughly unbiased") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const DppMeasure m(k);
  CHECK(sample(m, 42) == sample(m, 42));
  std::map<std::uint64_t, int> counts;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) ++counts[sample(m, 1000 + i).mask()];
  const auto p = state_probabilities(m);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const double se = std::sqrt(p[s] * (1 - p[s]) / draws);
    CHECK(std::abs(counts[s] / double(draws) - p[s]) < 5 * se);
  }
}

TEST_CASE("DLR equation holds exactly on small systems") {
  const int n = 6;
  const Kernel k = Kernel::from_matrix(oracle::random_dense_pd(n, 12));
  const DppMeasure m(k);
  const ConfigFunction f = [](const Configuration& c) { return c.size() * 1.0 + (c.contains(1) ? 0.5 : 0.0); };
  const DlrResult r = dlr_residual(m, {0, 1, 4}, f);
  CHECK(r.exact);
  CHECK(r.residual < 1e-12);
}

TEST_CASE("measure argument errors") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const DppMeasure m(k);
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code([&] { correlation(m, {0, 0}); }) == ErrorCode::DuplicateSites);
  CHECK(code([&] { marginal_probability(m, {0}, Configuration(2, {1})); }) == ErrorCode::ConfigurationNotInWindow);
}
