#include <doctest.h>

#include "dppdyn/papangelou.hpp"
#include "dppdyn/rates.hpp"
#include "oracles.hpp"

using namespace dppdyn;

namespace {

std::uint64_t bit(int s) { return std::uint64_t{1} << s; }

// Glauber interdependence from oracle rates.
RealMatrix glauber_gamma_oracle(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  RealMatrix g = RealMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int u = 0; u < n; ++u) {
      if (u == x) continue;
      for (std::uint64_t m = 0; m < (1u << n); ++m) {
        if (m & (bit(x) | bit(u))) continue;
        const double v = std::abs(oracle::birth(a, x, m) - oracle::birth(a, x, m | bit(u))) +
                         std::abs(oracle::death(a, x, m | bit(u)) - oracle::death(a, x, m));
        g(x, u) = std::max(g(x, u), v);
      }
    }
  return g;
}

// Kawasaki interdependence: sum over third sites y of the sup rate change,
// plus the exchange x <-> u itself.
RealMatrix kawasaki_gamma_oracle(const Matrix& a, const RealMatrix& w, double t) {
  const int n = static_cast<int>(a.rows());
  RealMatrix g = RealMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int u = 0; u < n; ++u) {
      if (u == x) continue;
      double exchange = 0.0;
      for (std::uint64_t m = 0; m < (1u << n); ++m) {
        if (m & (bit(x) | bit(u))) continue;
        exchange = std::max({exchange, oracle::jump(a, w(x, u), t, x, u, m), oracle::jump(a, w(u, x), t, u, x, m)});
      }
      g(x, u) = exchange;
      for (int y = 0; y < n; ++y) {
        if (y == x || y == u) continue;
        double sup = 0.0;
        for (std::uint64_t m = 0; m < (1u << n); ++m) {
          if (m & (bit(x) | bit(y) | bit(u))) continue;
          sup = std::max({sup,
                          std::abs(oracle::jump(a, w(x, y), t, x, y, m) - oracle::jump(a, w(x, y), t, x, y, m | bit(u))),
                          std::abs(oracle::jump(a, w(y, x), t, y, x, m) - oracle::jump(a, w(y, x), t, y, x, m | bit(u)))});
        }
        g(x, u) += sup;
      }
    }
  return g;
}

}  // namespace

TEST_CASE("two-site Glauber rates and constants") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const GlauberRates r = glauber_rates(k, 0, Configuration(2, {1}));
  CHECK(r.birth == doctest::Approx(0.652174).epsilon(1e-6));
  CHECK(r.birth + r.death == 1.0);
  CHECK(birth_rate(k, 0, Configuration(2)) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(death_rate(k, 0, Configuration(2, {0})) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const RateSpec spec = make_rate_spec(SiteSpace::plain(2), 0.0);
  const LiggettConstants c = liggett_constants(k, spec, Dynamics::Glauber, true);
  CHECK(c.epsilon == 1.0);
  CHECK(*c.m_exact == doctest::Approx(0.028986).epsilon(1e-5));
  CHECK(*c.m_exact == doctest::Approx(2.0 * (2.0 / 3.0 - 1.875 / 2.875)).epsilon(1e-13));
  CHECK(c.m1_bound == doctest::Approx(0.481481).epsilon(1e-6));
  CHECK(*c.m1_exact == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(*c.m_exact <= c.a0 * *c.m1_exact);
  CHECK(c.ergodic);
  CHECK(*c.c_sup == doctest::Approx(2.0 / 3.0));

  const LiggettConstants bound = liggett_constants(k, spec, Dynamics::Glauber, false);
  CHECK_FALSE(bound.m_exact.has_value());
  CHECK(bound.epsilon == 1.0);
  CHECK(bound.m1_bound == doctest::Approx(c.m1_bound));
}

TEST_CASE("two-site Kawasaki rate and constants") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const RateSpec spec = make_rate_spec(SiteSpace::plain(2), 0.0);
  CHECK(spec.d(0, 1) == 1.0);
  CHECK(kawasaki_rate(k, spec, 0, 1, Configuration(2, {0})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(jump_rate_or_zero(k, spec, 0, 1, Configuration(2, {0, 1})) == 0.0);
  const LiggettConstants c = liggett_constants(k, spec, Dynamics::Kawasaki, true);
  CHECK(c.epsilon == doctest::Approx(2.0));
  CHECK(*c.m_exact == doctest::Approx(2.0));  // the exchange term alone
  CHECK_FALSE(c.ergodic);
  CHECK_FALSE(liggett_constants(k, spec, Dynamics::Kawasaki, false).ergodic);
}

TEST_CASE("no interaction: gamma vanishes and epsilon is one") {
  const Kernel k = build_kernel(KernelSpec::scalar_diagonal(0.7), SiteSpace::plain(5));
  const LiggettConstants c = liggett_constants(k, make_rate_spec(SiteSpace::plain(5), 0.0), Dynamics::Glauber, true);
  CHECK(*c.m_exact == 0.0);
  CHECK(c.epsilon == 1.0);
  CHECK(c.ergodic);
  CHECK(c.m1_bound == 0.0);
}

TEST_CASE("rates agree with the beta-form oracle") {
  const int n = 6;
  const Matrix a = oracle::random_kernel(n, 41, true);
  const Kernel k = Kernel::from_matrix(a);
  for (double t : {0.0, 0.3, 1.0}) {
    const RateSpec spec = make_rate_spec(SiteSpace::plain(n), t, WeightKind::ExponentialDecay, 0.7);
    for (std::uint64_t m = 0; m < (1u << n); ++m) {
      const Configuration xi = Configuration::from_mask(n, m);
      for (int x : xi.holes()) {
        CHECK(birth_rate(k, x, xi) == doctest::Approx(oracle::birth(a, x, m)).epsilon(1e-12));
        CHECK(death_rate(k, x, xi.with(x)) == doctest::Approx(oracle::death(a, x, m)).epsilon(1e-12));
        for (int y : xi.holes()) {
          if (y == x) continue;
          CHECK(kawasaki_rate(k, spec, x, y, xi.with(x)) ==
                doctest::Approx(oracle::jump(a, spec.d(x, y), t, x, y, m)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("detailed balance residuals vanish for the library rates") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const int n = 7;
    const Kernel k = Kernel::from_matrix(seed == 1 ? oracle::random_dense_pd(n, seed) : oracle::random_kernel(n, seed, true));
    const RateSpec spec = make_rate_spec(SiteSpace::plain(n), 0.5);
    CHECK(detailed_balance_residual(k, spec, Dynamics::Glauber) < 1e-12 * k.op_norm());
    CHECK(detailed_balance_residual(k, spec, Dynamics::Kawasaki) < 1e-12 * k.op_norm());
  }
}

TEST_CASE("detailed balance residual detects wrong rates") {
  const Kernel k = Kernel::from_matrix(oracle::a2());
  const BirthFn birth = [](int, const Configuration&) { return 1.0; };
  const DeathFn death = [](int, const Configuration&) { return 1.0; };
  CHECK(glauber_balance_residual(k, birth, death) > 0.1);
  const JumpFn jump = [](int, int, const Configuration&) { return 1.0; };
  CHECK(kawasaki_balance_residual(Kernel::from_matrix(oracle::random_dense_pd(3, 1)), jump) > 1e-3);
}

TEST_CASE("Liggett constants match brute-force oracles, serial and parallel alike") {
  const int n = 5;
  const Matrix a = oracle::random_kernel(n, 77, true);
  const Kernel k = Kernel::from_matrix(a);
  const RateSpec spec = make_rate_spec(SiteSpace::plain(n), 0.4);
  const LiggettConstants g = liggett_constants(k, spec, Dynamics::Glauber, true, Exec::Serial);
  CHECK((g.gamma - glauber_gamma_oracle(a)).cwiseAbs().maxCoeff() < 1e-13);
  const LiggettConstants kw = liggett_constants(k, spec, Dynamics::Kawasaki, true, Exec::Serial);
  CHECK((kw.gamma - kawasaki_gamma_oracle(a, spec.weight, 0.4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(*kw.m_exact >= kw.epsilon);  // conservation: never certified ergodic

  const LiggettConstants gp = liggett_constants(k, spec, Dynamics::Glauber, true, Exec::Parallel);
  const LiggettConstants kp = liggett_constants(k, spec, Dynamics::Kawasaki, true, Exec::Parallel);
  CHECK(gp.gamma == g.gamma);
  CHECK(kp.gamma == kw.gamma);
  CHECK(kp.epsilon == kw.epsilon);
  CHECK(alpha_table(k, Exec::Serial) != std::vector<double>{});
}

TEST_CASE("exact constants respect the analytic bounds under assumption A") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const int n = 6;
    const Kernel k = Kernel::from_matrix(oracle::random_kernel(n, 100 + seed, seed % 2 == 1));
    const RateSpec spec = make_rate_spec(SiteSpace::plain(n), 0.5);
    const LiggettConstants g = liggett_constants(k, spec, Dynamics::Glauber, true);
    CHECK(*g.m1_exact <= g.m1_bound + 1e-12);
    CHECK(*g.m_exact <= g.a0 * *g.m1_exact + 1e-12);
    const LiggettConstants kw = liggett_constants(k, spec, Dynamics::Kawasaki, true);
    CHECK(*kw.m1_exact <= kw.m1_bound + 1e-12);
    CHECK(kw.epsilon >= kw.epsilon_bound - 1e-12);
  }
}

TEST_CASE("rate spec construction and validation") {
  const RateSpec nn = make_rate_spec(SiteSpace::torus({6}), 0.5);
  CHECK(nn.d(0, 1) == 0.5);
  CHECK(nn.d(0, 5) == 0.5);
  CHECK(nn.d(0, 2) == 0.0);
  CHECK(nn.d1 == 1.0);
  CHECK(nn.d2 == 1.0);
  const RateSpec two = make_rate_spec(SiteSpace::torus({2}), 0.0);
  CHECK(two.d(0, 1) == 1.0);  // the two ring neighbours coincide
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code([] { make_rate_spec(SiteSpace::plain(3), 1.5); }) == ErrorCode::ValidationError);
  RealMatrix asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK(code([&] { make_rate_spec(SiteSpace::plain(2), 0.0, WeightKind::Explicit, 1.0, asym); }) ==
        ErrorCode::ValidationError);
  CHECK(code([] { make_rate_spec(SiteSpace::plain(3), 0.0, WeightKind::ExponentialDecay, -1.0); }) ==
        ErrorCode::ValidationError);
  CHECK(parse_dynamics("kawasaki") == Dynamics::Kawasaki);
  CHECK(code([] { parse_dynamics("metropolis"); }) == ErrorCode::ValidationError);
  CHECK(g_t(0.0, 3.0, 4.0) == 1.0);
  CHECK(g_t(1.0, 1.0, 3.0) == doctest::Approx(0.125));
}
