#ifndef DPPDYN_EXACTCHECK_HPP
#define DPPDYN_EXACTCHECK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "dppdyn/common.hpp"
#include "dppdyn/configuration.hpp"
#include "dppdyn/kernel.hpp"
#include "dppdyn/rates.hpp"

namespace dppdyn {

using SparseGenerator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Generator of the dynamics on the full configuration space. State i is the
/// configuration with mask i (bit x = occupancy of site x).
struct GeneratorMatrix {
  Dynamics mode = Dynamics::Glauber;
  int n_sites = 0;
  SparseGenerator L;  // off-diagonals >= 0, diagonal = -row sum

  std::int64_t states() const { return L.rows(); }
};

inline constexpr int kMaxGeneratorSites = 14;
inline constexpr int kMaxSpectralSites = 12;
inline constexpr int kMaxExpmSites = 10;

/// L(xi, xi \ x) = d(x; xi), L(xi, x xi) = b(x; xi) (Glauber);
/// L(xi, y xi \ x) = c(x, y; xi) (Kawasaki).
GeneratorMatrix build_generator(const Kernel& k, const RateSpec& spec, Dynamics mode, Exec exec = Exec::Parallel);

/// mu({xi}) indexed by mask.
std::vector<double> stationary_vector(const Kernel& k);

struct GeneratorStructure {
  double max_row_sum = 0.0;         // max |sum_eta L(xi, eta)|
  double min_off_diagonal = 0.0;    // smallest stored off-diagonal entry
  int max_nonzeros_per_row = 0;     // off-diagonal entries
};
GeneratorStructure generator_structure(const GeneratorMatrix& g);

struct InvarianceReport {
  double invariance = 0.0;       // |mu^T L|_inf
  double detailed_balance = 0.0; // max |mu(xi) L(xi,eta) - mu(eta) L(eta,xi)|
};

InvarianceReport invariance_residual(const GeneratorMatrix& g, const std::vector<double>& mu);
InvarianceReport invariance_residual(const Kernel& k, const RateSpec& spec, Dynamics mode, Exec exec = Exec::Parallel);

struct SectorGap {
  int particles = 0;
  int states = 0;
  double gap = 0.0;
};

struct GapReport {
  double gap = 0.0;  // Glauber: whole chain; Kawasaki: min over sectors with > 1 state
  std::vector<SectorGap> sectors;  // Kawasaki only
  double reversibility_residual = 0.0;
};

/// Second-smallest eigenvalue of -L in the mu-weighted inner product, from the
/// symmetrized matrix D^{1/2} L D^{-1/2}. Kawasaki chains are analyzed per
/// particle-number sector. Throws NotReversible if detailed balance fails
/// beyond `reversibility_tolerance`.
GapReport spectral_gap(const GeneratorMatrix& g, const std::vector<double>& mu,
                       double reversibility_tolerance = 1e-10);

/// Delta_f(x) = max over xi not containing x of |f(x xi) - f(xi)|.
RealVector oscillation(const std::vector<double>& f, int n_sites);
/// |||f||| = sum_x Delta_f(x)
double triple_norm(const std::vector<double>& f, int n_sites);

struct ContractionPoint {
  double t = 0.0;
  double triple_norm = 0.0;     // |||T_t f|||
  double bound = 0.0;           // exp((M - eps) t) |||f|||
  double vector_excess = 0.0;   // max_x (Delta_{T_t f} - e^{-eps t} exp(t Gamma) Delta_f)(x)
};

struct ContractionReport {
  double f_triple_norm = 0.0;
  std::vector<ContractionPoint> points;
  /// Largest amount by which either bound is exceeded (<= 0 when both hold).
  double max_violation() const;
};

/// T_t f = exp(tL) f on each grid time (dense matrix exponential, n <= 10),
/// checked against the triple-norm and componentwise oscillation bounds with
/// the exhaustive constants `c` (which must carry m_exact and gamma).
ContractionReport contraction_check(const GeneratorMatrix& g, const std::vector<double>& f,
                                    const std::vector<double>& t_grid, const LiggettConstants& c);

/// Walk matrices behind the inverse-submatrix bound.
struct GammaData {
  double lambda = 0.0;
  double q = 0.0;
  double r = 0.0;           // q / (lambda + q)
  RealMatrix q_hat;         // |A(x,y)|_1 / q off the diagonal, minus the row sum on it
  RealMatrix p_hat;         // q_hat + I
  RealMatrix gamma;         // sum_{n>=1} (r p_hat)^n = (I - r p_hat)^{-1} - I
  RealMatrix m;             // 1/lambda on the diagonal, gamma/lambda off it
  RealMatrix gamma_series;  // truncated power series
  int series_terms = 0;
  double series_tail_bound = 0.0;  // r^{N+1} / (1 - r)
  double series_deviation = 0.0;   // max |gamma - gamma_series|
};

/// Throws AssumptionAViolated unless lambda > 0. With q = 0 the walk is
/// trivial: q_hat = 0 and gamma = 0.
GammaData gamma_data(const Kernel& k);

/// Gamma of the walk killed on leaving xi: sum_n (r p_hat(xi,xi))^n.
RealMatrix gamma_restricted(const GammaData& data, const SiteList& xi);

struct Lemma41Report {
  bool exhaustive = false;
  std::uint64_t subsets = 0;
  double max_ratio = 0.0;  // max |A(xi,xi)^{-1}(x,y)| / M(x,y)
  struct Witness {
    std::string configuration;
    int x = -1;
    int y = -1;
    double value = 0.0;
    double bound = 0.0;
  } witness;
  double max_diagonal_ratio = 0.0;
  double max_restricted_excess = 0.0;  // max (gamma_xi - gamma) over sampled xi
  GammaData data;
};

/// Checks |A(xi,xi)^{-1}(x,y)| <= M(x,y) over all subsets (n <= 14) or over
/// `samples` random subsets. Also checks gamma_restricted <= gamma on up to
/// `restricted_samples` random subsets.
Lemma41Report lemma41_bruteforce(const Kernel& k, Exec exec = Exec::Parallel, std::uint64_t samples = 4096,
                                 std::uint64_t seed = 0, int restricted_samples = 64);

/// [[A1, -A2], [A2, A1]] for A = A1 + i A2.
Matrix embed_real(const Matrix& a);

struct EmbeddingReport {
  Kernel embedded;                // real kernel on E1 u E2
  double lambda = 0.0;            // margin of A under |.|_1
  double lambda_embedded = 0.0;   // margin of the embedding
  std::uint64_t subsets = 0;
  double recovery_error = 0.0;    // max |C + iD - A(xi,xi)^{-1}|
  double modulus_excess = 0.0;    // max |A(xi,xi)^{-1}(x,y)| - (|C| + |D|)
  double lemma_ratio = 0.0;       // max |A(xi,xi)^{-1}(x,y)| / (M~(x1,y1) + M~(x1,y2))
};

/// Real embedding of a kernel with C, D recovered from the embedded inverse.
/// All subsets are checked when n <= 12, otherwise xi = E and `samples`
/// random subsets. A real kernel gives the block-diagonal embedding.
EmbeddingReport complex_embedding(const Kernel& k, Exec exec = Exec::Parallel, std::uint64_t samples = 256,
                                  std::uint64_t seed = 0);

}  // namespace dppdyn

#endif  // DPPDYN_EXACTCHECK_HPP
