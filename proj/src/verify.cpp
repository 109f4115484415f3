#include "dppdyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dppdyn/dpp.hpp"
#include "dppdyn/exactcheck.hpp"
#include "dppdyn/papangelou.hpp"
#include "dppdyn/parallel.hpp"
#include "dppdyn/random.hpp"
#include "dppdyn/simulate.hpp"

namespace dppdyn {

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
  }
  return "unknown";
}

namespace {

CheckResult upper(const std::string& name, double residual, double tolerance, std::string note = {}) {
  const bool ok = std::isfinite(residual) && residual <= tolerance;
  return {name, ok ? CheckStatus::Pass : CheckStatus::Fail, residual, tolerance, std::move(note)};
}

CheckResult skip(const std::string& name, std::string note) { return {name, CheckStatus::Skip, 0.0, 0.0, std::move(note)}; }

std::string too_large(int n, int limit) {
  return "n = " + std::to_string(n) + " exceeds the exhaustive limit " + std::to_string(limit);
}

// max over masks of body(mask), evaluated per index and reduced in order.
template <class Body>
double max_over_masks(int n, Exec exec, Body&& body) {
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<double> worst(count, 0.0);
  for_each_index(count, exec, [&](std::int64_t m) { worst[m] = body(static_cast<std::uint64_t>(m)); });
  double out = 0.0;
  for (double w : worst) out = std::max(out, w);
  return out;
}

std::vector<CheckResult> kernel_suite(const Kernel& k) {
  const int n = k.n();
  std::vector<CheckResult> out;
  const double norm = k.op_norm();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix rebuilt = (id - k.K()).partialPivLu().solve(k.K());
  out.push_back(upper("kernel.k_roundtrip", (rebuilt - k.A()).cwiseAbs().maxCoeff() / norm, 1e-10));
  SiteList all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  out.push_back(
      upper("kernel.bracket_full_window", (restrict_a_bracket(k, all) - k.A()).cwiseAbs().maxCoeff() / norm, 1e-10));
  const Eigen::SelfAdjointEigenSolver<Matrix> es(k.K(), Eigen::EigenvaluesOnly);
  const double low = es.eigenvalues().minCoeff();
  const double high = es.eigenvalues().maxCoeff();
  out.push_back(upper("kernel.k_spectrum_in_unit_interval", std::max({0.0, -low, high - 1.0 + 1e-15}), 1e-12,
                      "eigenvalues of K must lie in [0,1)"));
  const AssumptionA a = check_assumption_a(k);
  CheckResult dominance{"kernel.assumption_a", a.holds ? CheckStatus::Pass : CheckStatus::Skip, a.lambda, 0.0,
                        a.holds ? "diagonal dominance margin" : "margin not positive; dependent bounds are skipped"};
  out.push_back(dominance);
  return out;
}

std::vector<CheckResult> papangelou_suite(const Kernel& k, const VerifySection& v, Exec exec) {
  const int n = k.n();
  std::vector<CheckResult> out;
  const double norm = k.op_norm();
  if (n > kMaxExhaustiveCheckSites) {
    for (const char* name : {"papangelou.det_ratio", "papangelou.variational_alpha", "papangelou.duality",
                             "papangelou.difference_paths", "papangelou.monotonicity"})
      out.push_back(skip(name, too_large(n, kMaxExhaustiveCheckSites)));
  } else {
    struct Worst {
      double det = 0, var = 0, dual = 0, diff = 0, mono = 0;
    };
    const std::int64_t count = std::int64_t{1} << n;
    std::vector<Worst> slots(count);
    for_each_index(count, exec, [&](std::int64_t m) {
      const Configuration xi = Configuration::from_mask(n, static_cast<std::uint64_t>(m));
      Worst& w = slots[m];
      for (int x : xi.holes()) {
        const double a = alpha(k, x, xi);
        w.det = std::max(w.det, std::abs(alpha_det_ratio(k, x, xi) - a) / a);
        w.var = std::max(w.var, std::abs(alpha_variational(k, x, xi) - a) / a);
        w.dual = std::max(w.dual, std::abs(a * beta_variational(k, x, xi) - 1.0));
        for (int u : xi.holes()) {
          if (u == x) continue;
          const double direct = a - alpha(k, x, xi.with(u));
          const double schur = alpha_difference(k, x, u, xi);
          const double restricted = alpha_difference_restricted(k, x, u, xi);
          const double scale = std::max({std::abs(direct), std::abs(schur), a});
          w.diff = std::max({w.diff, std::abs(direct - schur) / scale, std::abs(direct - restricted) / scale,
                             std::abs(schur - restricted) / scale});
          w.mono = std::max(w.mono, -direct / norm);
        }
      }
    });
    Worst worst;
    for (const Worst& w : slots) {
      worst.det = std::max(worst.det, w.det);
      worst.var = std::max(worst.var, w.var);
      worst.dual = std::max(worst.dual, w.dual);
      worst.diff = std::max(worst.diff, w.diff);
      worst.mono = std::max(worst.mono, w.mono);
    }
    out.push_back(upper("papangelou.det_ratio", worst.det, v.difference, "relative"));
    out.push_back(upper("papangelou.variational_alpha", worst.var, v.difference, "relative"));
    out.push_back(upper("papangelou.duality", worst.dual, v.duality, "|alpha * beta_variational - 1|"));
    out.push_back(upper("papangelou.difference_paths", worst.diff, v.difference, "relative to max(|a|,|b|,alpha)"));
    out.push_back(upper("papangelou.monotonicity", worst.mono, 1e-12, "max (alpha(x;u xi) - alpha(x;xi)) / |A|"));
  }

  const AlphaBoundsReport bounds = alpha_bounds_check(k, exec, 4096, v.seed);
  double excess = 0.0;
  if (bounds.violation) excess = std::abs(bounds.violation->value - (bounds.violation->bound == "lower" ? bounds.lambda : 0.0));
  out.push_back({"papangelou.intensity_bounds", bounds.ok() ? CheckStatus::Pass : CheckStatus::Fail, excess, 0.0,
                 bounds.exhaustive ? "exhaustive" : "sampled"});

  // Random walk of engine updates against from-scratch intensities.
  Rng rng(derive_seed(v.seed, 0xe9));
  PapangelouEngine engine(k, Configuration(n));
  double drift = 0.0;
  for (int step = 0; step < 2000; ++step) {
    const int x = static_cast<int>(uniform01(rng) * n);
    if (engine.configuration().contains(x)) {
      engine.remove(x);
    } else {
      engine.add(x);
    }
    if (step % 50 == 49) {
      const IntensitySnapshot inc = engine.snapshot(false);
      const IntensitySnapshot ref = intensity_snapshot(k, engine.configuration(), false);
      for (size_t j = 0; j < ref.alpha_hole.size(); ++j)
        drift = std::max(drift, std::abs(inc.alpha_hole[j] - ref.alpha_hole[j]));
      for (size_t j = 0; j < ref.alpha_removed.size(); ++j)
        drift = std::max(drift, std::abs(inc.alpha_removed[j] - ref.alpha_removed[j]));
      drift = std::max(drift, engine.factorization_error());
    }
  }
  out.push_back(upper("papangelou.engine_drift", drift, 1e-8, "2000 random updates"));
  return out;
}

std::vector<CheckResult> dpp_suite(const Kernel& k, Exec exec) {
  const int n = k.n();
  std::vector<CheckResult> out;
  const DppMeasure m(k);
  if (n > kMaxExactDlrSites) {
    for (const char* name : {"dpp.normalization", "dpp.one_point_consistency", "dpp.papangelou_ratio", "dpp.dlr"})
      out.push_back(skip(name, too_large(n, kMaxExactDlrSites)));
    return out;
  }
  const auto probs = state_probabilities(m);
  double total = 0.0;
  for (double p : probs) total += p;
  out.push_back(upper("dpp.normalization", std::abs(total - 1.0), 1e-10));

  double one_point = 0.0;
  for (int x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::uint64_t mask = 0; mask < probs.size(); ++mask)
      if ((mask >> x) & 1u) s += probs[mask];
    one_point = std::max(one_point, std::abs(s - k.K()(x, x).real()));
  }
  out.push_back(upper("dpp.one_point_consistency", one_point, 1e-10));

  const double ratio = max_over_masks(n, exec, [&](std::uint64_t mask) {
    const Configuration xi = Configuration::from_mask(n, mask);
    double w = 0.0;
    for (int x : xi.holes()) {
      const double a = alpha(k, x, xi);
      w = std::max(w, std::abs(probs[mask | (std::uint64_t{1} << x)] / probs[mask] - a) / a);
    }
    return w;
  });
  out.push_back(upper("dpp.papangelou_ratio", ratio, 1e-10, "relative"));

  SiteList window;
  for (int i = 0; i < std::min(n, 3); ++i) window.push_back(i);
  const ConfigFunction f = [&](const Configuration& xi) {
    double s = 0.0;
    for (int x : window) s += xi.contains(x) ? 1.0 : 0.0;
    return s + (xi.size() % 2 == 0 ? 0.5 : 0.0);
  };
  out.push_back(upper("dpp.dlr", dlr_residual(m, window, f).residual, 1e-10, "window of the first three sites"));
  return out;
}

std::vector<CheckResult> rates_suite(const Kernel& k, const RateSpec& spec, const VerifySection& v, Exec exec) {
  const int n = k.n();
  std::vector<CheckResult> out;
  if (n > kMaxExhaustiveSites) {
    for (const char* name : {"rates.detailed_balance.glauber", "rates.detailed_balance.kawasaki",
                             "rates.epsilon.glauber", "rates.m_exact_below_bound.glauber",
                             "rates.m1_exact_below_bound.glauber"})
      out.push_back(skip(name, too_large(n, kMaxExhaustiveSites)));
    return out;
  }
  const double tol = v.detailed_balance * k.op_norm();
  out.push_back(upper("rates.detailed_balance.glauber", detailed_balance_residual(k, spec, Dynamics::Glauber, exec), tol,
                      "tolerance scaled by |A|"));
  out.push_back(upper("rates.detailed_balance.kawasaki",
                      detailed_balance_residual(k, spec, Dynamics::Kawasaki, exec), tol, "tolerance scaled by |A|"));
  const LiggettConstants g = liggett_constants(k, spec, Dynamics::Glauber, true, exec);
  out.push_back(upper("rates.epsilon.glauber", std::abs(g.epsilon - 1.0), 0.0, "b + d = 1 exactly"));
  if (check_assumption_a(k).holds) {
    out.push_back(upper("rates.m_exact_below_bound.glauber", std::max(0.0, *g.m_exact - g.a0 * g.m1_bound_strict),
                        0.0, "M <= a0 * M1 bound"));
    out.push_back(upper("rates.m1_exact_below_bound.glauber", std::max(0.0, *g.m1_exact - g.m1_bound_strict), 0.0,
                        "exact M1 <= analytic bound"));
  } else {
    out.push_back(skip("rates.m_exact_below_bound.glauber", "Assumption (A) fails"));
    out.push_back(skip("rates.m1_exact_below_bound.glauber", "Assumption (A) fails"));
  }
  return out;
}

std::vector<CheckResult> exact_suite(const Kernel& k, const RateSpec& spec, const VerifySection& v, Exec exec) {
  const int n = k.n();
  std::vector<CheckResult> out;
  if (n > kMaxExhaustiveCheckSites) {
    out.push_back(skip("exactcheck.generator", too_large(n, kMaxExhaustiveCheckSites)));
  } else {
    const std::vector<double> mu = stationary_vector(k);
    for (Dynamics mode : {Dynamics::Glauber, Dynamics::Kawasaki}) {
      const std::string tag = to_string(mode);
      const GeneratorMatrix g = build_generator(k, spec, mode, exec);
      const GeneratorStructure st = generator_structure(g);
      out.push_back(upper("exactcheck.generator_rows." + tag, st.max_row_sum, 1e-12));
      const InvarianceReport inv = invariance_residual(g, mu);
      out.push_back(upper("exactcheck.invariance." + tag, inv.invariance, v.invariance, "|mu^T L|_inf"));
      out.push_back(upper("exactcheck.reversibility." + tag, inv.detailed_balance, v.invariance));

      const LiggettConstants c = liggett_constants(k, spec, mode, true, exec);
      const GapReport gap = spectral_gap(g, mu);
      const double margin = c.epsilon - *c.m_exact;
      if (margin > 0.0) {
        out.push_back(upper("exactcheck.spectral_gap." + tag, std::max(0.0, margin - gap.gap), v.gap,
                            "gap " + std::to_string(gap.gap) + " vs eps - M " + std::to_string(margin)));
      } else {
        out.push_back(skip("exactcheck.spectral_gap." + tag,
                           "eps - M = " + std::to_string(margin) + " is not positive; gap " + std::to_string(gap.gap)));
      }

      if (n > kMaxContractionCheckSites) {
        out.push_back(skip("exactcheck.contraction." + tag, too_large(n, kMaxContractionCheckSites)));
        continue;
      }
      double worst = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < v.functions; ++j) {
        Rng rng(derive_seed(v.seed, 0xf00 + static_cast<std::uint64_t>(j)));
        std::vector<double> f(std::size_t{1} << n);
        for (double& x : f) x = uniform01(rng);
        worst = std::max(worst, contraction_check(g, f, v.times, c).max_violation());
      }
      if (v.functions == 0) worst = 0.0;
      out.push_back(upper("exactcheck.contraction." + tag, std::max(0.0, worst), v.contraction,
                          std::to_string(v.functions) + " random functions"));
    }
  }

  if (!check_assumption_a(k).holds) {
    for (const char* name : {"exactcheck.lemma41", "exactcheck.gamma_series", "exactcheck.gamma_monotone"})
      out.push_back(skip(name, "Assumption (A) fails"));
  } else {
    const Lemma41Report lem = lemma41_bruteforce(k, exec, 4096, v.seed);
    out.push_back(upper("exactcheck.lemma41", std::max(0.0, lem.max_ratio - 1.0), v.lemma41,
                        "max ratio " + std::to_string(lem.max_ratio)));
    out.push_back(upper("exactcheck.gamma_series", lem.data.series_deviation,
                        lem.data.series_tail_bound + 1e-12, "resolvent vs truncated series"));
    out.push_back(upper("exactcheck.gamma_monotone", std::max(0.0, lem.max_restricted_excess), 1e-12,
                        "killed-walk Gamma below full Gamma"));
  }

  if (n <= 7) {
    const EmbeddingReport emb = complex_embedding(k, exec);
    out.push_back(upper("exactcheck.embedding_recovery", emb.recovery_error, 1e-12));
    out.push_back(upper("exactcheck.embedding_margin", std::abs(emb.lambda - emb.lambda_embedded), 1e-12));
    if (std::isnan(emb.lemma_ratio)) {
      out.push_back(skip("exactcheck.embedding_lemma41", "embedded kernel fails Assumption (A)"));
    } else {
      out.push_back(upper("exactcheck.embedding_lemma41", std::max(0.0, emb.lemma_ratio - 1.0), v.lemma41));
    }
  } else {
    out.push_back(skip("exactcheck.embedding", "embedding checks run for n <= 7"));
  }
  return out;
}

std::vector<CheckResult> simulate_suite(const Kernel& k, const RateSpec& spec, const ExperimentConfig& cfg) {
  std::vector<CheckResult> out;
  for (Dynamics mode : {Dynamics::Glauber, Dynamics::Kawasaki}) {
    const std::string tag = to_string(mode);
    SimConfig sim = cfg.run.sim;
    sim.mode = mode;
    sim.horizon = std::min(sim.horizon, 50.0);
    sim.burn_in = 0.0;
    if (mode == Dynamics::Kawasaki && sim.initial == InitialState::Empty) sim.initial = InitialState::DppSample;
    const Trajectory traj = run(k, spec, sim);
    Configuration last;
    try {
      last = replay(traj);
    } catch (const Error& err) {
      out.push_back({"simulate.legality." + tag, CheckStatus::Fail, 1.0, 0.0, err.what()});
      continue;
    }
    out.push_back({"simulate.legality." + tag, CheckStatus::Pass, 0.0, 0.0,
                   std::to_string(traj.events.size()) + " events replayed"});
    const IntensitySnapshot ref = intensity_snapshot(k, last, false);
    // Replay through a long-lived engine to compare incremental and fresh values.
    PapangelouEngine walker(k, traj.initial, sim.refactor_period);
    for (const Event& e : traj.events) {
      if (e.kind == EventKind::Birth) walker.add(e.site);
      if (e.kind == EventKind::Death) walker.remove(e.site);
      if (e.kind == EventKind::Jump) {
        walker.remove(e.site);
        walker.add(e.site2);
      }
    }
    const IntensitySnapshot inc = walker.snapshot(false);
    double drift = 0.0;
    for (size_t j = 0; j < ref.alpha_hole.size(); ++j) drift = std::max(drift, std::abs(inc.alpha_hole[j] - ref.alpha_hole[j]));
    for (size_t j = 0; j < ref.alpha_removed.size(); ++j)
      drift = std::max(drift, std::abs(inc.alpha_removed[j] - ref.alpha_removed[j]));
    out.push_back(upper("simulate.engine_consistency." + tag, drift, 1e-8));
    if (mode == Dynamics::Kawasaki) {
      double worst = 0.0;
      for (const Event& e : traj.events) {
        if (e.kind != EventKind::Jump) worst = 1.0;
      }
      worst = std::max(worst, std::abs(static_cast<double>(last.size() - traj.initial.size())));
      out.push_back(upper("simulate.particle_conservation", worst, 0.0));
    }
  }
  return out;
}

}  // namespace

std::vector<CheckResult> run_suite(const ExperimentConfig& cfg, const std::string& suite, Exec exec) {
  const Kernel k = build_kernel(cfg);
  const RateSpec spec = build_rate_spec(cfg);
  if (suite == "kernel") return kernel_suite(k);
  if (suite == "papangelou") return papangelou_suite(k, cfg.verify, exec);
  if (suite == "dpp") return dpp_suite(k, exec);
  if (suite == "rates") return rates_suite(k, spec, cfg.verify, exec);
  if (suite == "exactcheck") return exact_suite(k, spec, cfg.verify, exec);
  if (suite == "simulate") return simulate_suite(k, spec, cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + suite + "'");
}

std::vector<CheckResult> run_verify(const ExperimentConfig& cfg, Exec exec) {
  std::vector<CheckResult> all;
  for (const auto& suite : cfg.verify.suites) {
    auto part = run_suite(cfg, suite, exec);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::none_of(results.begin(), results.end(),
                      [](const CheckResult& r) { return r.status == CheckStatus::Fail; });
}

}  // namespace dppdyn
