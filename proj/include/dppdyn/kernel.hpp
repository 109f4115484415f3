#ifndef DPPDYN_KERNEL_HPP
#define DPPDYN_KERNEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "dppdyn/common.hpp"

namespace dppdyn {

/// Finite site set, optionally carrying a torus geometry Z_{L1} x ... x Z_{Ld}.
///
/// Sites are numbered in row-major order of their torus coordinates (last
/// coordinate fastest). A plain site set of n sites is given the ring metric
/// of Z_n so that distance-based weights still make sense.
class SiteSpace {
 public:
  static SiteSpace plain(int n_sites);
  static SiteSpace torus(std::vector<int> sides);

  int n_sites() const { return n_sites_; }
  bool has_torus() const { return has_torus_; }
  int dimension() const { return static_cast<int>(sides_.size()); }
  const std::vector<int>& sides() const { return sides_; }

  std::vector<int> coordinate(int site) const;
  int site(const std::vector<int>& coordinate) const;

  /// L1 distance on the torus (ring distance for a plain set).
  int distance(int x, int y) const;

  bool operator==(const SiteSpace&) const = default;

 private:
  int n_sites_ = 0;
  bool has_torus_ = false;
  std::vector<int> sides_;
};

struct DecayProfile {
  double amplitude = 0.0;
  double rate = 1.0;
  int cutoff = 1;  // C(r) = 0 for r > cutoff

  bool operator==(const DecayProfile&) const = default;
};

struct KernelSpec {
  enum class Variant { ExplicitMatrix, ScalarDiagonal, TorusConvolution };

  Variant variant = Variant::ScalarDiagonal;
  // ExplicitMatrix
  Matrix matrix;
  // ScalarDiagonal and TorusConvolution: A = a I + C
  double a = 1.0;
  // TorusConvolution: C(x,y) = coupling[dist(x,y) - 1], or the decay profile
  // when `coupling` is empty.
  std::vector<double> coupling;
  std::optional<DecayProfile> decay;
  // Any value >= q(A); defaults to q(A).
  std::optional<double> q_override;

  static KernelSpec explicit_matrix(Matrix m);
  static KernelSpec scalar_diagonal(double a);
  static KernelSpec torus_convolution(double a, std::vector<double> coupling);
};

/// Hermitian positive-definite kernel A with its derived quantities.
/// Immutable once built.
class Kernel {
 public:
  static Kernel from_matrix(const Matrix& a, std::optional<double> q_override = std::nullopt);

  int n() const { return static_cast<int>(a_.rows()); }
  const Matrix& A() const { return a_; }
  const Matrix& A_inverse() const { return a_inv_; }
  /// Marginal kernel K = A (I + A)^{-1}.
  const Matrix& K() const { return k_; }

  Complex A(int x, int y) const { return a_(x, y); }
  double diag(int x) const { return a_(x, x).real(); }

  /// inf_x (A(x,x) - sum_{y != x} |A(x,y)|_1)
  double lambda_margin() const { return lambda_margin_; }
  /// sup_x sum_{y != x} |A(x,y)|_1
  double q_exact() const { return q_exact_; }
  double q_value() const { return q_value_; }
  double op_norm() const { return eigenvalues_.maxCoeff(); }
  double min_eigenvalue() const { return eigenvalues_.minCoeff(); }
  /// Eigenvalues of A in ascending order, with orthonormal eigenvectors.
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  bool is_real() const { return is_real_; }

 private:
  Matrix a_;
  Matrix a_inv_;
  Matrix k_;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
  double lambda_margin_ = 0.0;
  double q_exact_ = 0.0;
  double q_value_ = 0.0;
  bool is_real_ = true;
};

// Hermiticity and positivity are judged relative to the operator norm.
inline constexpr double kKernelTolerance = 1e-10;

Kernel build_kernel(const KernelSpec& spec, const SiteSpace& space);

struct AssumptionA {
  bool holds = false;
  double lambda = 0.0;
};

/// Diagonal dominance measured with |z|_1 = |Re z| + |Im z|.
AssumptionA check_assumption_a(const Kernel& k);

/// A_[window] = K_w (I_w - K_w)^{-1} for the principal restriction K_w of K.
Matrix restrict_a_bracket(const Kernel& k, const SiteList& window);

/// Principal submatrix m(idx, idx).
Matrix principal(const Matrix& m, const SiteList& idx);

/// Parses "re", "re+imj", "re-imj" or "imj".
Complex parse_complex(const std::string& text);

/// Dense matrix text file: first line n, then n rows of n entries.
Matrix load_matrix_file(const std::string& path);
Matrix parse_matrix_text(const std::string& text);

}  // namespace dppdyn

#endif  // DPPDYN_KERNEL_HPP
