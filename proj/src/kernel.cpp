#include "dppdyn/kernel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dppdyn {

SiteSpace SiteSpace::plain(int n_sites) {
  if (n_sites < 1) throw Error(ErrorCode::InvalidArgument, "n_sites must be >= 1");
  SiteSpace s;
  s.n_sites_ = n_sites;
  s.sides_ = {n_sites};
  return s;
}

SiteSpace SiteSpace::torus(std::vector<int> sides) {
  if (sides.empty()) throw Error(ErrorCode::InvalidArgument, "torus needs at least one side");
  long long n = 1;
  for (int l : sides) {
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "torus sides must be >= 1");
    n *= l;
    if (n > (1 << 20)) throw Error(ErrorCode::TooManySites, "torus too large");
  }
  SiteSpace s;
  s.n_sites_ = static_cast<int>(n);
  s.has_torus_ = true;
  s.sides_ = std::move(sides);
  return s;
}

std::vector<int> SiteSpace::coordinate(int site) const {
  if (site < 0 || site >= n_sites_) throw Error(ErrorCode::InvalidArgument, "site out of range");
  std::vector<int> c(sides_.size());
  for (int d = dimension() - 1; d >= 0; --d) {
    c[d] = site % sides_[d];
    site /= sides_[d];
  }
  return c;
}

int SiteSpace::site(const std::vector<int>& coordinate) const {
  if (coordinate.size() != sides_.size())
    throw Error(ErrorCode::DimensionMismatch, "coordinate dimension");
  int s = 0;
  for (size_t d = 0; d < sides_.size(); ++d) {
    int c = coordinate[d] % sides_[d];
    if (c < 0) c += sides_[d];
    s = s * sides_[d] + c;
  }
  return s;
}

int SiteSpace::distance(int x, int y) const {
  auto cx = coordinate(x);
  auto cy = coordinate(y);
  int dist = 0;
  for (size_t d = 0; d < sides_.size(); ++d) {
    int diff = std::abs(cx[d] - cy[d]);
    dist += std::min(diff, sides_[d] - diff);
  }
  return dist;
}

KernelSpec KernelSpec::explicit_matrix(Matrix m) {
  KernelSpec s;
  s.variant = Variant::ExplicitMatrix;
  s.matrix = std::move(m);
  return s;
}

KernelSpec KernelSpec::scalar_diagonal(double a) {
  KernelSpec s;
  s.variant = Variant::ScalarDiagonal;
  s.a = a;
  return s;
}

KernelSpec KernelSpec::torus_convolution(double a, std::vector<double> coupling) {
  KernelSpec s;
  s.variant = Variant::TorusConvolution;
  s.a = a;
  s.coupling = std::move(coupling);
  return s;
}

Kernel Kernel::from_matrix(const Matrix& a, std::optional<double> q_override) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "kernel matrix must be square and nonempty");
  const Eigen::Index n = a.rows();

  // Row-sum norm bounds the operator norm of a Hermitian matrix from above.
  const double scale = std::max(a.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kKernelTolerance * scale) {
    std::ostringstream msg;
    msg << "max |A - A*| = " << asym;
    throw Error(ErrorCode::NotHermitian, msg.str());
  }

  Kernel k;
  k.a_ = 0.5 * (a + a.adjoint());
  k.is_real_ = k.a_.imag().cwiseAbs().maxCoeff() == 0.0;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(k.a_);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition failed");
  k.eigenvalues_ = eig.eigenvalues();
  k.eigenvectors_ = eig.eigenvectors();
  const double top = k.eigenvalues_.maxCoeff();
  const double bottom = k.eigenvalues_.minCoeff();
  if (!(top > 0.0) || bottom <= kKernelTolerance * top) {
    std::ostringstream msg;
    msg << "min eigenvalue " << bottom << " (op norm " << top << ")";
    throw Error(ErrorCode::NotPositiveDefinite, msg.str());
  }

  const Matrix identity = Matrix::Identity(n, n);
  Eigen::LLT<Matrix> a_chol(k.a_);
  k.a_inv_ = a_chol.solve(identity);
  k.a_inv_ = 0.5 * (k.a_inv_ + k.a_inv_.adjoint()).eval();

  // (I + A) K = A; I + A is well conditioned because A is positive definite.
  Eigen::LLT<Matrix> shifted(identity + k.a_);
  k.k_ = shifted.solve(k.a_);
  k.k_ = 0.5 * (k.k_ + k.k_.adjoint()).eval();

  k.lambda_margin_ = std::numeric_limits<double>::infinity();
  k.q_exact_ = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    double off = 0.0;
    for (Eigen::Index y = 0; y < n; ++y)
      if (y != x) off += abs1(k.a_(x, y));
    k.lambda_margin_ = std::min(k.lambda_margin_, k.a_(x, x).real() - off);
    k.q_exact_ = std::max(k.q_exact_, off);
  }
  k.q_value_ = k.q_exact_;
  if (q_override) {
    if (*q_override < k.q_exact_ * (1.0 - 1e-12))
      throw Error(ErrorCode::ValidationError, "q override must be >= q(A)");
    k.q_value_ = *q_override;
  }
  return k;
}

Kernel build_kernel(const KernelSpec& spec, const SiteSpace& space) {
  const int n = space.n_sites();
  Matrix a;
  switch (spec.variant) {
    case KernelSpec::Variant::ExplicitMatrix:
      if (spec.matrix.rows() != n || spec.matrix.cols() != n)
        throw Error(ErrorCode::DimensionMismatch,
                    "matrix is " + std::to_string(spec.matrix.rows()) + "x" +
                        std::to_string(spec.matrix.cols()) + ", site space has " + std::to_string(n));
      a = spec.matrix;
      break;
    case KernelSpec::Variant::ScalarDiagonal:
      a = Matrix::Identity(n, n) * spec.a;
      break;
    case KernelSpec::Variant::TorusConvolution: {
      if (!space.has_torus())
        throw Error(ErrorCode::DimensionMismatch, "torus-convolution kernel needs a torus site space");
      a = Matrix::Identity(n, n) * spec.a;
      for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
          if (x == y) continue;
          const int r = space.distance(x, y);
          double c = 0.0;
          if (!spec.coupling.empty()) {
            if (r <= static_cast<int>(spec.coupling.size())) c = spec.coupling[r - 1];
          } else if (spec.decay && r <= spec.decay->cutoff) {
            c = spec.decay->amplitude * std::exp(-spec.decay->rate * r);
          }
          a(x, y) = c;
        }
      }
      break;
    }
  }
  return Kernel::from_matrix(a, spec.q_override);
}

AssumptionA check_assumption_a(const Kernel& k) {
  return {k.lambda_margin() > 0.0, k.lambda_margin()};
}

Matrix principal(const Matrix& m, const SiteList& idx) {
  return m(idx, idx);
}

Matrix restrict_a_bracket(const Kernel& k, const SiteList& window) {
  const Eigen::Index w = static_cast<Eigen::Index>(window.size());
  for (int s : window)
    if (s < 0 || s >= k.n()) throw Error(ErrorCode::InvalidArgument, "window site out of range");
  if (w == 0) return Matrix(0, 0);
  const Matrix kw = principal(k.K(), window);
  const Matrix complement = Matrix::Identity(w, w) - kw;
  Eigen::LLT<Matrix> llt(complement);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14)
    throw Error(ErrorCode::SingularRestriction, "I - K_window is numerically singular");
  // K_w and (I - K_w)^{-1} commute, so either order gives A_[window].
  Matrix out = llt.solve(kw);
  return 0.5 * (out + out.adjoint());
}

Complex parse_complex(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  if (text.empty()) throw Error(ErrorCode::ParseError, "empty complex literal");

  auto to_double = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad number '" + raw + "'");
    }
    if (used != s.size()) throw Error(ErrorCode::ParseError, "bad number '" + raw + "'");
    return v;
  };

  const char last = text.back();
  if (last != 'j' && last != 'i') return {to_double(text), 0.0};

  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not an exponent sign.
  size_t split = std::string::npos;
  for (size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(body)};
  return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

Matrix parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  long long n = 0;
  if (!(in >> n) || n <= 0) throw Error(ErrorCode::ParseError, "first token must be a positive size");
  Matrix m(n, n);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      std::string tok;
      if (!(in >> tok))
        throw Error(ErrorCode::ParseError, "expected " + std::to_string(n * n) + " entries");
      m(i, j) = parse_complex(tok);
    }
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::ParseError, "trailing data after matrix: '" + extra + "'");
  return m;
}

Matrix load_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ParseError, "cannot open matrix file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_matrix_text(ss.str());
}

}  // namespace dppdyn
