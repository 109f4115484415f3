#include <doctest.h>

#include "dppdyn/configuration.hpp"
#include "dppdyn/kernel.hpp"
#include "oracles.hpp"

using namespace dppdyn;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("two-site kernel derived quantities") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  CHECK(k.lambda_margin() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(k.q_exact() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.op_norm() == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(k.K()(0, 0).real() == doctest::Approx(23.0 / 35.0).epsilon(1e-14));
  CHECK(k.K()(0, 1).real() == doctest::Approx(2.0 / 35.0).epsilon(1e-14));
  const Matrix bracket = restrict_a_bracket(k, {0});
  CHECK(bracket(0, 0).real() == doctest::Approx(23.0 / 12.0).epsilon(1e-13));
  CHECK(check_assumption_a(k).holds);
}

TEST_CASE("marginal kernel matches the resolvent oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix a = seed % 2 ? oracle::random_kernel(7, seed, true) : oracle::random_dense_pd(7, seed);
    const Kernel k = Kernel::from_matrix(a);
    CHECK((k.K() - oracle::marginal_kernel(a)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((k.A_inverse() - oracle::inverse(a)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(k.K().selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff() < 1.0);
  }
}

TEST_CASE("bracket on the full window recovers A") {
  const Matrix a = oracle::random_kernel(6, 3, true);
  const Kernel k = Kernel::from_matrix(a);
  CHECK((restrict_a_bracket(k, {0, 1, 2, 3, 4, 5}) - a).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("bracket agrees with the Schur-complement oracle on a sub-window") {
  // A_[w] = K_w (I - K_w)^{-1} computed from oracle K.
  const Matrix a = oracle::random_dense_pd(6, 9);
  const Kernel k = Kernel::from_matrix(a);
  const SiteList w = {1, 3, 4};
  const Matrix kw = oracle::sub(oracle::marginal_kernel(a), w);
  const Matrix expect = kw * oracle::inverse(Matrix::Identity(3, 3) - kw);
  CHECK((restrict_a_bracket(k, w) - expect).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("kernel validation errors") {
  Matrix bad(2, 2);
  bad << 2.0, 0.5, 0.4, 2.0;
  CHECK(code_of([&] { Kernel::from_matrix(bad); }) == ErrorCode::NotHermitian);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK(code_of([&] { Kernel::from_matrix(indefinite); }) == ErrorCode::NotPositiveDefinite);
  CHECK(code_of([&] { Kernel::from_matrix(Matrix(2, 3)); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { Kernel::from_matrix(oracle::a2(), 0.1); }) == ErrorCode::ValidationError);
}

TEST_CASE("assumption A margin uses the |Re|+|Im| norm") {
  const Kernel k = Kernel::from_matrix(oracle::complex2());
  CHECK(k.lambda_margin() == doctest::Approx(1.3).epsilon(1e-14));
  CHECK(k.q_exact() == doctest::Approx(0.7).epsilon(1e-14));
  Matrix weak(3, 3);
  weak << 1.0, 0.6, 0.6, 0.6, 1.0, 0.6, 0.6, 0.6, 1.0;
  CHECK_FALSE(check_assumption_a(Kernel::from_matrix(weak)).holds);
}

TEST_CASE("torus geometry and convolution kernels") {
  const SiteSpace ring = SiteSpace::torus({8});
  CHECK(ring.distance(0, 7) == 1);
  CHECK(ring.distance(1, 5) == 4);
  const SiteSpace square = SiteSpace::torus({3, 4});
  CHECK(square.n_sites() == 12);
  CHECK(square.site(square.coordinate(7)) == 7);
  CHECK(square.distance(square.site({0, 0}), square.site({2, 3})) == 2);

  const Kernel k = build_kernel(KernelSpec::torus_convolution(1.0, {0.2}), ring);
  CHECK(k.lambda_margin() == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(k.A(0, 1).real() == doctest::Approx(0.2));
  CHECK(k.A(0, 2).real() == 0.0);
  for (int x = 0; x < 8; ++x) CHECK(k.A(x, (x + 1) % 8) == k.A(0, 1));

  KernelSpec decay = KernelSpec::torus_convolution(1.0, {});
  decay.decay = DecayProfile{0.3, 1.0, 2};
  const Kernel kd = build_kernel(decay, ring);
  CHECK(kd.A(0, 2).real() == doctest::Approx(0.3 * std::exp(-2.0)));
  CHECK(kd.A(0, 3).real() == 0.0);

  const Kernel diag = build_kernel(KernelSpec::scalar_diagonal(1.5), SiteSpace::plain(4));
  CHECK(diag.q_exact() == 0.0);
  CHECK(diag.lambda_margin() == 1.5);
}

TEST_CASE("matrix and complex literal parsing") {
  CHECK(parse_complex("1.5") == Complex(1.5, 0.0));
  CHECK(parse_complex("0.3+0.4j") == Complex(0.3, 0.4));
  CHECK(parse_complex("0.3-0.4j") == Complex(0.3, -0.4));
  CHECK(parse_complex("-2j") == Complex(0.0, -2.0));
  CHECK(code_of([] { parse_complex("abc"); }) == ErrorCode::ParseError);
  const Matrix m = parse_matrix_text("2\n2 0.5\n0.5 2\n");
  CHECK((m - oracle::a2()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(code_of([] { parse_matrix_text("2\n1 2 3\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_matrix_text("2\n1 0 0 1 9\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("configuration bookkeeping") {
  Configuration c(5, {1, 3});
  CHECK(c.mask() == 0b01010);
  CHECK(c.bitstring() == "01010");
  CHECK(c.sites() == SiteList{1, 3});
  CHECK(c.holes() == SiteList{0, 2, 4});
  CHECK(c.with(0).size() == 3);
  CHECK(Configuration::from_mask(5, c.mask()) == c);
  CHECK(code_of([&] { c.insert(1); }) == ErrorCode::SiteOccupied);
  CHECK(code_of([&] { c.erase(0); }) == ErrorCode::SiteEmpty);
  CHECK(code_of([] { Configuration(3, {1, 1}); }) == ErrorCode::DuplicateSites);
  CHECK(Configuration::full(3).size() == 3);
  CHECK(sites_of_mask(0b1101) == SiteList{0, 2, 3});
}
