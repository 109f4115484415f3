#include <doctest.h>

#include <random>

#include "dppdyn/dpp.hpp"
#include "dppdyn/exactcheck.hpp"
#include "oracles.hpp"

using namespace dppdyn;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::vector<double> random_function(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(std::size_t{1} << n);
  for (double& v : f) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("generators match the oracle rate matrices") {
  const int n = 5;
  const Matrix a = oracle::random_kernel(n, 61, true);
  const Kernel k = Kernel::from_matrix(a);
  const RateSpec spec = make_rate_spec(SiteSpace::plain(n), 0.3, WeightKind::ExponentialDecay, 0.5);
  const GeneratorMatrix g = build_generator(k, spec, Dynamics::Glauber);
  CHECK((RealMatrix(g.L) - oracle::glauber_generator(a)).cwiseAbs().maxCoeff() < 1e-12);
  const GeneratorMatrix kw = build_generator(k, spec, Dynamics::Kawasaki, Exec::Serial);
  CHECK((RealMatrix(kw.L) - oracle::kawasaki_generator(a, spec.weight, 0.3)).cwiseAbs().maxCoeff() < 1e-12);
  const GeneratorStructure s = generator_structure(g);
  CHECK(s.max_row_sum < 1e-12);
  CHECK(s.min_off_diagonal > 0.0);
  CHECK(s.max_nonzeros_per_row == n);
  CHECK(RealMatrix(build_generator(k, spec, Dynamics::Kawasaki, Exec::Parallel).L) == RealMatrix(kw.L));
}

TEST_CASE("the DPP is invariant and reversible for both dynamics") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const int n = 6;
    const Kernel k = Kernel::from_matrix(seed == 2 ? oracle::random_dense_pd(n, 5) : oracle::random_kernel(n, seed, seed == 1));
    const RateSpec spec = make_rate_spec(SiteSpace::plain(n), 0.5);
    for (Dynamics mode : {Dynamics::Glauber, Dynamics::Kawasaki}) {
      const InvarianceReport r = invariance_residual(k, spec, mode);
      CHECK(r.invariance < 1e-13);
      CHECK(r.detailed_balance < 1e-13);
    }
  }
}

TEST_CASE("invariance residual notices a wrong measure") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const GeneratorMatrix g = build_generator(k, make_rate_spec(SiteSpace::plain(2), 0.0), Dynamics::Glauber);
  CHECK(invariance_residual(g, {0.25, 0.25, 0.25, 0.25}).invariance > 1e-3);
  CHECK(code_of([&] { invariance_residual(g, {1.0}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("spectral gap: product chain and the ergodicity lower bound") {
  // No interaction: each site flips at rate 1/2 each way, gap = 1 = eps - M.
  const Kernel diag = build_kernel(KernelSpec::scalar_diagonal(1.0), SiteSpace::plain(4));
  const GeneratorMatrix g = build_generator(diag, make_rate_spec(SiteSpace::plain(4), 0.0), Dynamics::Glauber);
  CHECK(spectral_gap(g, stationary_vector(diag)).gap == doctest::Approx(1.0).epsilon(1e-12));

  const Kernel k = Kernel::from_matrix(oracle::random_kernel(7, 4, false));
  const RateSpec spec = make_rate_spec(SiteSpace::plain(7), 0.5);
  const LiggettConstants c = liggett_constants(k, spec, Dynamics::Glauber, true);
  REQUIRE(c.epsilon > *c.m_exact);
  const GapReport r = spectral_gap(build_generator(k, spec, Dynamics::Glauber), stationary_vector(k));
  CHECK(r.gap >= c.epsilon - *c.m_exact - 1e-9);

  const GapReport kr = spectral_gap(build_generator(k, spec, Dynamics::Kawasaki), stationary_vector(k));
  CHECK(kr.sectors.size() == 6);  // sectors with 1..6 particles
  for (const SectorGap& s : kr.sectors) CHECK(s.gap > 0.0);

  const GeneratorMatrix g2 =
      build_generator(Kernel::from_matrix(oracle::a2()), make_rate_spec(SiteSpace::plain(2), 0.0), Dynamics::Glauber);
  CHECK(code_of([&] { spectral_gap(g2, std::vector<double>(4, 0.25)); }) == ErrorCode::NotReversible);
}

TEST_CASE("semigroup contraction: product chain values") {
  // A = I on 3 sites: every site flips at rate 1/2 both ways, so for the
  // parity f the semigroup gives T_t f = 1/2 - e^{-3t} (-1)^{|xi|} / 2.
  const int n = 3;
  const Kernel k = build_kernel(KernelSpec::scalar_diagonal(1.0), SiteSpace::plain(n));
  const RateSpec spec = make_rate_spec(SiteSpace::plain(n), 0.0);
  const LiggettConstants c = liggett_constants(k, spec, Dynamics::Glauber, true);
  const GeneratorMatrix g = build_generator(k, spec, Dynamics::Glauber);
  std::vector<double> parity(8);
  for (int m = 0; m < 8; ++m) parity[m] = std::popcount(static_cast<unsigned>(m)) % 2;
  const ContractionReport r = contraction_check(g, parity, {0.5, 1.0, 2.0}, c);
  for (const ContractionPoint& p : r.points) {
    CHECK(p.triple_norm == doctest::Approx(3.0 * std::exp(-3.0 * p.t)).epsilon(1e-10));
    CHECK(p.bound == doctest::Approx(3.0 * std::exp(-p.t)).epsilon(1e-12));
  }
  // a single-site function saturates the bound
  std::vector<double> first(8);
  for (int m = 0; m < 8; ++m) first[m] = m & 1;
  for (const ContractionPoint& p : contraction_check(g, first, {0.5, 1.0, 2.0}, c).points)
    CHECK(p.triple_norm == doctest::Approx(p.bound).epsilon(1e-10));
}

TEST_CASE("semigroup contraction holds against the oracle exponential") {
  const int n = 5;
  const Matrix a = oracle::random_kernel(n, 19, true);
  const Kernel k = Kernel::from_matrix(a);
  const RateSpec spec = make_rate_spec(SiteSpace::plain(n), 0.5);
  for (Dynamics mode : {Dynamics::Glauber, Dynamics::Kawasaki}) {
    const LiggettConstants c = liggett_constants(k, spec, mode, true);
    const GeneratorMatrix g = build_generator(k, spec, mode);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto f = random_function(n, s);
      const ContractionReport r = contraction_check(g, f, {0.5, 1.0, 2.0, 4.0}, c);
      CHECK(r.max_violation() <= 1e-9);
      // cross-check one point with the oracle exponential
      const Eigen::Map<const RealVector> fv(f.data(), f.size());
      const RealVector tf = oracle::expm(RealMatrix(g.L)) * fv;
      CHECK(triple_norm(std::vector<double>(tf.data(), tf.data() + tf.size()), n) ==
            doctest::Approx(r.points[1].triple_norm).epsilon(1e-9));
    }
  }
}

TEST_CASE("Gamma matrix for the two-site kernel") {
  const GammaData d = gamma_data(Kernel::from_matrix(oracle::a2()));
  CHECK(d.r == doctest::Approx(0.25));
  CHECK(d.gamma(0, 1) == doctest::Approx(0.25 / 0.9375).epsilon(1e-14));
  CHECK(d.gamma(0, 1) == doctest::Approx(0.266667).epsilon(1e-6));
  CHECK(d.m(0, 1) == doctest::Approx(0.177778).epsilon(1e-6));
  CHECK(d.m(0, 0) == doctest::Approx(1.0 / 1.5));
  CHECK(d.p_hat(0, 1) == 1.0);
  CHECK(d.p_hat(0, 0) == 0.0);
  CHECK(d.series_deviation < 1e-14);
}

TEST_CASE("Gamma matches the explicit power series") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix a = oracle::random_kernel(8, seed, seed == 1);
    const GammaData d = gamma_data(Kernel::from_matrix(a));
    CHECK((d.gamma - oracle::gamma_series(a)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.series_deviation <= 1e-12);
  }
  const GammaData none = gamma_data(build_kernel(KernelSpec::scalar_diagonal(2.0), SiteSpace::plain(3)));
  CHECK(none.q == 0.0);
  CHECK(none.gamma.cwiseAbs().maxCoeff() == 0.0);
  Matrix weak(3, 3);
  weak << 1.0, 0.6, 0.6, 0.6, 1.0, 0.6, 0.6, 0.6, 1.0;
  CHECK(code_of([&] { gamma_data(Kernel::from_matrix(weak)); }) == ErrorCode::AssumptionAViolated);
}

TEST_CASE("inverse bound over every subset") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Kernel k = Kernel::from_matrix(oracle::random_kernel(9, 50 + seed, seed == 2, 0.9));
    const Lemma41Report r = lemma41_bruteforce(k);
    CHECK(r.exhaustive);
    CHECK(r.subsets == 512u);
    CHECK(r.max_ratio <= 1.0 + 1e-9);
    CHECK(r.max_restricted_excess <= 1e-12);
  }
  // diagonal kernel: |A^{-1}(x,x)| = 1/lambda exactly
  const Kernel diag = build_kernel(KernelSpec::scalar_diagonal(0.8), SiteSpace::plain(6));
  const Lemma41Report d = lemma41_bruteforce(diag);
  CHECK(d.max_ratio == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.max_diagonal_ratio == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("complex-to-real embedding") {
  const Kernel k = Kernel::from_matrix(oracle::complex2());
  const EmbeddingReport r = complex_embedding(k);
  CHECK(r.embedded.n() == 4);
  CHECK(r.lambda == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(r.lambda_embedded == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(r.recovery_error < 1e-14);
  CHECK(r.modulus_excess <= 1e-15);
  CHECK(r.lemma_ratio <= 1.0 + 1e-12);
  // spectrum of the embedding doubles that of A
  RealVector doubled(4);
  doubled << k.eigenvalues(), k.eigenvalues();
  std::sort(doubled.data(), doubled.data() + 4);
  CHECK((r.embedded.eigenvalues() - doubled).cwiseAbs().maxCoeff() < 1e-12);

  const Kernel big = Kernel::from_matrix(oracle::random_kernel(7, 8, true));
  const EmbeddingReport rb = complex_embedding(big);
  CHECK(rb.subsets == 128u);
  CHECK(rb.recovery_error < 1e-12);
  CHECK(rb.lemma_ratio <= 1.0 + 1e-9);
}

TEST_CASE("size limits") {
  const Kernel k = build_kernel(KernelSpec::scalar_diagonal(1.0), SiteSpace::plain(15));
  CHECK(code_of([&] { build_generator(k, make_rate_spec(SiteSpace::plain(15), 0.0), Dynamics::Glauber); }) ==
        ErrorCode::TooManySites);
}
