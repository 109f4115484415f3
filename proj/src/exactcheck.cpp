#include "dppdyn/exactcheck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "dppdyn/dpp.hpp"
#include "dppdyn/papangelou.hpp"
#include "dppdyn/parallel.hpp"
#include "dppdyn/random.hpp"

namespace dppdyn {

namespace {

inline std::uint64_t bit(int s) { return std::uint64_t{1} << s; }

}  // namespace

GeneratorMatrix build_generator(const Kernel& k, const RateSpec& spec, Dynamics mode, Exec exec) {
  const int n = k.n();
  if (n > kMaxGeneratorSites)
    throw Error(ErrorCode::TooManySites, "generator needs n <= " + std::to_string(kMaxGeneratorSites));
  if (mode == Dynamics::Kawasaki && spec.weight.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "rate spec and kernel sizes differ");
  const std::int64_t count = std::int64_t{1} << n;
  const bool kawasaki = mode == Dynamics::Kawasaki;

  struct Entry {
    std::int64_t col;
    double rate;
  };
  std::vector<std::vector<Entry>> rows(count);
  for_each_index(count, exec, [&](std::int64_t mask) {
    const auto m = static_cast<std::uint64_t>(mask);
    const IntensitySnapshot snap = intensity_snapshot(k, Configuration::from_mask(n, m), kawasaki);
    auto& row = rows[mask];
    if (!kawasaki) {
      for (size_t j = 0; j < snap.holes.size(); ++j)
        row.push_back({static_cast<std::int64_t>(m | bit(snap.holes[j])), birth_from_alpha(snap.alpha_hole[j])});
      for (size_t i = 0; i < snap.occupied.size(); ++i)
        row.push_back({static_cast<std::int64_t>(m & ~bit(snap.occupied[i])),
                       death_from_alpha(snap.alpha_removed[i])});
    } else {
      for (size_t i = 0; i < snap.occupied.size(); ++i) {
        const int x = snap.occupied[i];
        for (size_t j = 0; j < snap.holes.size(); ++j) {
          const int y = snap.holes[j];
          const double w = spec.d(x, y);
          if (w == 0.0) continue;
          row.push_back({static_cast<std::int64_t>((m & ~bit(x)) | bit(y)),
                         jump_from_alpha(w, spec.t, snap.alpha_removed[i], snap.alpha_pair(i, j))});
        }
      }
    }
  });

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::int64_t i = 0; i < count; ++i) {
    double sum = 0.0;
    for (const Entry& e : rows[i]) {
      if (e.rate <= 0.0) continue;
      triplets.emplace_back(i, e.col, e.rate);
      sum += e.rate;
    }
    triplets.emplace_back(i, i, -sum);
  }
  GeneratorMatrix g;
  g.mode = mode;
  g.n_sites = n;
  g.L.resize(count, count);
  g.L.setFromTriplets(triplets.begin(), triplets.end());
  g.L.makeCompressed();
  return g;
}

std::vector<double> stationary_vector(const Kernel& k) { return state_probabilities(DppMeasure(k)); }

GeneratorStructure generator_structure(const GeneratorMatrix& g) {
  GeneratorStructure s;
  s.min_off_diagonal = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.L.outerSize(); ++i) {
    double sum = 0.0;
    int nnz = 0;
    for (SparseGenerator::InnerIterator it(g.L, i); it; ++it) {
      sum += it.value();
      if (it.col() != i) {
        ++nnz;
        s.min_off_diagonal = std::min(s.min_off_diagonal, it.value());
      }
    }
    s.max_row_sum = std::max(s.max_row_sum, std::abs(sum));
    s.max_nonzeros_per_row = std::max(s.max_nonzeros_per_row, nnz);
  }
  if (!std::isfinite(s.min_off_diagonal)) s.min_off_diagonal = 0.0;
  return s;
}

InvarianceReport invariance_residual(const GeneratorMatrix& g, const std::vector<double>& mu) {
  if (static_cast<std::int64_t>(mu.size()) != g.states())
    throw Error(ErrorCode::DimensionMismatch, "measure and generator sizes differ");
  const Eigen::Map<const RealVector> m(mu.data(), static_cast<Eigen::Index>(mu.size()));
  const RealVector flux = g.L.transpose() * m;
  InvarianceReport r;
  r.invariance = flux.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < g.L.outerSize(); ++i) {
    for (SparseGenerator::InnerIterator it(g.L, i); it; ++it) {
      if (it.col() == i) continue;
      const double back = g.L.coeff(it.col(), i);
      r.detailed_balance = std::max(r.detailed_balance, std::abs(m(i) * it.value() - m(it.col()) * back));
    }
  }
  return r;
}

InvarianceReport invariance_residual(const Kernel& k, const RateSpec& spec, Dynamics mode, Exec exec) {
  return invariance_residual(build_generator(k, spec, mode, exec), stationary_vector(k));
}

namespace {

double symmetric_gap(const RealMatrix& dense_l, const std::vector<double>& mu, const std::vector<std::int64_t>& idx) {
  const auto s = static_cast<Eigen::Index>(idx.size());
  RealMatrix sym(s, s);
  for (Eigen::Index a = 0; a < s; ++a)
    for (Eigen::Index b = 0; b < s; ++b)
      sym(a, b) = -std::sqrt(mu[idx[a]]) * dense_l(idx[a], idx[b]) / std::sqrt(mu[idx[b]]);
  sym = (0.5 * (sym + sym.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

}  // namespace

GapReport spectral_gap(const GeneratorMatrix& g, const std::vector<double>& mu, double reversibility_tolerance) {
  if (g.n_sites > kMaxSpectralSites)
    throw Error(ErrorCode::TooManySites, "spectral gap needs n <= " + std::to_string(kMaxSpectralSites));
  const InvarianceReport inv = invariance_residual(g, mu);
  GapReport report;
  report.reversibility_residual = inv.detailed_balance;
  if (inv.detailed_balance > reversibility_tolerance)
    throw Error(ErrorCode::NotReversible,
                "detailed balance residual " + std::to_string(inv.detailed_balance) + " exceeds tolerance");
  const RealMatrix dense = RealMatrix(g.L);
  const std::int64_t count = g.states();
  if (g.mode == Dynamics::Glauber) {
    std::vector<std::int64_t> all(count);
    for (std::int64_t i = 0; i < count; ++i) all[i] = i;
    report.gap = count > 1 ? symmetric_gap(dense, mu, all) : 0.0;
    return report;
  }
  report.gap = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= g.n_sites; ++s) {
    std::vector<std::int64_t> idx;
    for (std::int64_t i = 0; i < count; ++i)
      if (std::popcount(static_cast<std::uint64_t>(i)) == s) idx.push_back(i);
    if (idx.size() < 2) continue;
    const double gap = symmetric_gap(dense, mu, idx);
    report.sectors.push_back({s, static_cast<int>(idx.size()), gap});
    report.gap = std::min(report.gap, gap);
  }
  if (report.sectors.empty()) report.gap = 0.0;
  return report;
}

RealVector oscillation(const std::vector<double>& f, int n_sites) {
  const std::uint64_t count = std::uint64_t{1} << n_sites;
  if (f.size() != count) throw Error(ErrorCode::DimensionMismatch, "function must have 2^n entries");
  RealVector delta = RealVector::Zero(n_sites);
  for (int x = 0; x < n_sites; ++x)
    for (std::uint64_t mask = 0; mask < count; ++mask)
      if (!(mask & bit(x))) delta(x) = std::max(delta(x), std::abs(f[mask | bit(x)] - f[mask]));
  return delta;
}

double triple_norm(const std::vector<double>& f, int n_sites) { return oscillation(f, n_sites).sum(); }

double ContractionReport::max_violation() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) worst = std::max({worst, p.triple_norm - p.bound, p.vector_excess});
  return points.empty() ? 0.0 : worst;
}

ContractionReport contraction_check(const GeneratorMatrix& g, const std::vector<double>& f,
                                    const std::vector<double>& t_grid, const LiggettConstants& c) {
  const int n = g.n_sites;
  if (n > kMaxExpmSites)
    throw Error(ErrorCode::TooManySites, "contraction check needs n <= " + std::to_string(kMaxExpmSites));
  if (!c.m_exact || c.gamma.rows() != n)
    throw Error(ErrorCode::InvalidArgument, "contraction check needs exhaustive constants");
  const RealVector delta_f = oscillation(f, n);
  const Eigen::Map<const RealVector> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  const RealMatrix dense = RealMatrix(g.L);

  ContractionReport report;
  report.f_triple_norm = delta_f.sum();
  for (double t : t_grid) {
    const RealMatrix semigroup = (t * dense).exp();
    const RealVector tf = semigroup * fv;
    const std::vector<double> tf_vec(tf.data(), tf.data() + tf.size());
    const RealVector delta_t = oscillation(tf_vec, n);
    ContractionPoint p;
    p.t = t;
    p.triple_norm = delta_t.sum();
    p.bound = std::exp((*c.m_exact - c.epsilon) * t) * report.f_triple_norm;
    const RealVector vec_bound = std::exp(-c.epsilon * t) * ((t * c.gamma).exp() * delta_f);
    p.vector_excess = (delta_t - vec_bound).maxCoeff();
    report.points.push_back(p);
  }
  return report;
}

GammaData gamma_data(const Kernel& k) {
  const AssumptionA a = check_assumption_a(k);
  if (!a.holds)
    throw Error(ErrorCode::AssumptionAViolated,
                "diagonal dominance margin " + std::to_string(a.lambda) + " is not positive");
  const int n = k.n();
  GammaData d;
  d.lambda = a.lambda;
  d.q = k.q_value();
  d.q_hat = RealMatrix::Zero(n, n);
  if (d.q > 0.0) {
    for (int x = 0; x < n; ++x) {
      double row = 0.0;
      for (int y = 0; y < n; ++y) {
        if (y == x) continue;
        d.q_hat(x, y) = abs1(k.A(x, y)) / d.q;
        row += d.q_hat(x, y);
      }
      d.q_hat(x, x) = -row;
    }
  }
  d.p_hat = d.q_hat + RealMatrix::Identity(n, n);
  d.r = d.q / (d.lambda + d.q);
  const RealMatrix walk = d.r * d.p_hat;
  const RealMatrix resolvent = (RealMatrix::Identity(n, n) - walk).partialPivLu().solve(walk);
  d.gamma = resolvent.cwiseMax(0.0);  // clip rounding below zero
  d.m = d.gamma / d.lambda;
  for (int x = 0; x < n; ++x) d.m(x, x) = 1.0 / d.lambda;

  // Power series until the geometric tail is negligible.
  d.gamma_series = RealMatrix::Zero(n, n);
  RealMatrix term = RealMatrix::Identity(n, n);
  double tail = d.r / (1.0 - d.r);
  int terms = 0;
  while (terms < 100000 && d.r > 0.0) {
    term = term * walk;
    d.gamma_series += term;
    ++terms;
    tail = std::pow(d.r, terms + 1) / (1.0 - d.r);
    if (tail < 1e-15) break;
  }
  d.series_terms = terms;
  d.series_tail_bound = d.r > 0.0 ? tail : 0.0;
  d.series_deviation = (d.gamma - d.gamma_series).cwiseAbs().maxCoeff();
  return d;
}

RealMatrix gamma_restricted(const GammaData& data, const SiteList& xi) {
  const auto m = static_cast<Eigen::Index>(xi.size());
  if (m == 0) return RealMatrix(0, 0);
  const RealMatrix walk = data.r * data.p_hat(xi, xi);
  return (RealMatrix::Identity(m, m) - walk).partialPivLu().solve(walk);
}

Lemma41Report lemma41_bruteforce(const Kernel& k, Exec exec, std::uint64_t samples, std::uint64_t seed,
                                 int restricted_samples) {
  const int n = k.n();
  Lemma41Report report;
  report.data = gamma_data(k);
  const RealMatrix& bound = report.data.m;
  report.exhaustive = n <= kMaxGeneratorSites;
  const std::uint64_t count = report.exhaustive ? (std::uint64_t{1} << n) : samples;

  struct Slot {
    double ratio = 0.0;
    double diag = 0.0;
    int x = -1, y = -1;
    double value = 0.0, bound = 0.0;
    std::uint64_t mask = 0;
    SiteList sites;
  };
  std::vector<Slot> slots(count);
  for_each_index(static_cast<std::int64_t>(count), exec, [&](std::int64_t i) {
    Slot& s = slots[i];
    SiteList xi;
    if (report.exhaustive) {
      xi = sites_of_mask(static_cast<std::uint64_t>(i));
    } else {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      for (int x = 0; x < n; ++x)
        if (uniform01(rng) < 0.5) xi.push_back(x);
    }
    if (xi.empty()) return;
    const Matrix inv = principal(k.A(), xi).partialPivLu().inverse();
    for (size_t a = 0; a < xi.size(); ++a) {
      for (size_t b = 0; b < xi.size(); ++b) {
        const double value = std::abs(inv(a, b));
        const double m = bound(xi[a], xi[b]);
        double ratio;
        if (m > 0.0) {
          ratio = value / m;
        } else {
          ratio = value > 1e-14 / report.data.lambda ? std::numeric_limits<double>::infinity() : 0.0;
        }
        if (a == b) s.diag = std::max(s.diag, ratio);
        if (ratio > s.ratio) {
          s.ratio = ratio;
          s.x = xi[a];
          s.y = xi[b];
          s.value = value;
          s.bound = m;
          s.sites = xi;
        }
      }
    }
  });
  for (const Slot& s : slots) {
    report.max_diagonal_ratio = std::max(report.max_diagonal_ratio, s.diag);
    if (s.ratio > report.max_ratio) {
      report.max_ratio = s.ratio;
      report.witness = {Configuration(n, s.sites).bitstring(), s.x, s.y, s.value, s.bound};
    }
  }
  report.subsets = count;

  Rng rng(derive_seed(seed, 0x9a11a));
  for (int i = 0; i < restricted_samples; ++i) {
    SiteList xi;
    for (int x = 0; x < n; ++x)
      if (uniform01(rng) < 0.5) xi.push_back(x);
    if (xi.empty()) continue;
    const RealMatrix g_xi = gamma_restricted(report.data, xi);
    report.max_restricted_excess =
        std::max(report.max_restricted_excess, (g_xi - report.data.gamma(xi, xi)).maxCoeff());
  }
  return report;
}

Matrix embed_real(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const RealMatrix a1 = a.real();
  const RealMatrix a2 = a.imag();
  RealMatrix out(2 * n, 2 * n);
  out << a1, -a2, a2, a1;
  return out.cast<Complex>();
}

EmbeddingReport complex_embedding(const Kernel& k, Exec exec, std::uint64_t samples, std::uint64_t seed) {
  const int n = k.n();
  EmbeddingReport report;
  report.embedded = Kernel::from_matrix(embed_real(k.A()));
  report.lambda = k.lambda_margin();
  report.lambda_embedded = report.embedded.lambda_margin();
  std::optional<GammaData> gd;
  if (report.lambda_embedded > 0.0) gd = gamma_data(report.embedded);

  const bool all = n <= 12;
  const std::uint64_t count = all ? (std::uint64_t{1} << n) : samples + 1;
  struct Slot {
    double recovery = 0.0, modulus = 0.0, ratio = 0.0;
  };
  std::vector<Slot> slots(count);
  const std::uint64_t full = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  for_each_index(static_cast<std::int64_t>(count), exec, [&](std::int64_t i) {
    SiteList xi;
    if (all) {
      xi = sites_of_mask(static_cast<std::uint64_t>(i));
    } else if (i == 0) {
      xi = sites_of_mask(full);
    } else {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      for (int x = 0; x < n; ++x)
        if (uniform01(rng) < 0.5) xi.push_back(x);
    }
    if (xi.empty()) return;
    const auto m = static_cast<Eigen::Index>(xi.size());
    const Matrix sub = principal(k.A(), xi);
    const Matrix inv = sub.partialPivLu().inverse();
    const RealMatrix inv_e = embed_real(sub).real().partialPivLu().inverse();
    const RealMatrix c = inv_e.topLeftCorner(m, m);
    const RealMatrix d = -inv_e.topRightCorner(m, m);
    Slot& s = slots[i];
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        const Complex rebuilt(c(a, b), d(a, b));
        s.recovery = std::max(s.recovery, std::abs(rebuilt - inv(a, b)));
        const double value = std::abs(inv(a, b));
        s.modulus = std::max(s.modulus, value - (std::abs(c(a, b)) + std::abs(d(a, b))));
        if (gd) {
          const double bound = gd->m(xi[a], xi[b]) + gd->m(xi[a], n + xi[b]);
          s.ratio = std::max(s.ratio, bound > 0.0 ? value / bound : (value > 1e-14 ? 1e300 : 0.0));
        }
      }
    }
  });
  report.modulus_excess = -std::numeric_limits<double>::infinity();
  for (const Slot& s : slots) {
    report.recovery_error = std::max(report.recovery_error, s.recovery);
    report.modulus_excess = std::max(report.modulus_excess, s.modulus);
    report.lemma_ratio = std::max(report.lemma_ratio, s.ratio);
  }
  report.subsets = count;
  if (!gd) report.lemma_ratio = std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace dppdyn
