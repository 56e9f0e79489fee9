#include "w2s/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "w2s/rng.hpp"

namespace w2s {

namespace {

// Smallest relative singular value the Gram route can certify as nonzero.
double gram_floor(Index n, Index d) {
  const double scale = static_cast<double>(std::max<Index>({n, d, 1}));
  return 4.0 * std::sqrt(std::numeric_limits<double>::epsilon() * scale);
}

void require_finite(const Matrix& phi, const char* who) {
  if (!phi.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite entries in design matrix");
}

}  // namespace

void SolverConfig::validate() const {
  if (!(ridge_alpha >= 0.0) || !std::isfinite(ridge_alpha))
    throw std::invalid_argument("SolverConfig: ridge_alpha must be a finite nonnegative real");
  if (rcond != 0.0 && !(rcond > 0.0 && rcond < 1.0))
    throw std::invalid_argument("SolverConfig: rcond must lie in (0, 1), or 0 for automatic");
}

MinNormSolver::MinNormSolver(const Matrix& phi, double rcond) : phi_(phi) {
  require_finite(phi, "MinNormSolver");
  const Index n = phi.rows();
  const Index d = phi.cols();
  if (rcond < 0.0 || rcond >= 1.0) throw std::invalid_argument("MinNormSolver: rcond must lie in [0, 1)");

  const Index k = std::min(n, d);
  if (k == 0) {
    singular_values_ = Vector();
    pinv_core_ = Matrix::Zero(std::max<Index>(n, 0), std::max<Index>(n, 0));
    gram_on_rows_ = true;
    return;
  }

  gram_on_rows_ = n <= d;
  Matrix gram = gram_on_rows_ ? Matrix(phi * phi.transpose()) : Matrix(phi.transpose() * phi);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("MinNormSolver: eigendecomposition failed");

  Vector lambda = eig.eigenvalues().cwiseMax(0.0);  // ascending
  singular_values_ = lambda.reverse().cwiseSqrt();

  const double sigma_max = singular_values_(0);
  double cut = rcond > 0.0 ? rcond : 1e-10 * static_cast<double>(std::max(n, d));
  cut = std::max(cut, gram_floor(n, d));
  const double threshold = cut * sigma_max;

  Vector inv = Vector::Zero(k);
  rank_ = 0;
  for (Index i = 0; i < k; ++i) {
    const double s = std::sqrt(lambda(i));
    if (sigma_max > 0.0 && s > threshold) {
      inv(i) = 1.0 / lambda(i);
      ++rank_;
    }
  }
  pinv_core_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Vector MinNormSolver::solve(const Vector& y) const {
  if (y.size() != phi_.rows()) throw std::invalid_argument("MinNormSolver: label length does not match design rows");
  if (!y.allFinite()) throw std::invalid_argument("MinNormSolver: non-finite labels");
  if (phi_.rows() == 0 || phi_.cols() == 0) return Vector::Zero(phi_.cols());
  if (gram_on_rows_) return phi_.transpose() * (pinv_core_ * y);
  return pinv_core_ * (phi_.transpose() * y);
}

Vector min_norm_solve(const Matrix& phi, const Vector& y, double rcond) {
  return MinNormSolver(phi, rcond).solve(y);
}

RidgeSolver::RidgeSolver(const Matrix& phi, double alpha) : phi_(phi) {
  require_finite(phi, "RidgeSolver");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("RidgeSolver: alpha must be positive");
  const Index n = phi.rows();
  const Index d = phi.cols();
  if (n == 0) throw std::invalid_argument("RidgeSolver: empty design");
  const double shift = alpha * static_cast<double>(n);
  dual_ = n < d;
  Matrix reg = dual_ ? Matrix(phi * phi.transpose() + shift * Matrix::Identity(n, n))
                     : Matrix(phi.transpose() * phi + shift * Matrix::Identity(d, d));
  llt_.compute(reg);
  if (llt_.info() != Eigen::Success) throw std::runtime_error("RidgeSolver: factorization failed");
}

Vector RidgeSolver::solve(const Vector& y) const {
  if (y.size() != phi_.rows()) throw std::invalid_argument("RidgeSolver: label length does not match design rows");
  if (!y.allFinite()) throw std::invalid_argument("RidgeSolver: non-finite labels");
  if (dual_) return phi_.transpose() * llt_.solve(y);
  return llt_.solve(phi_.transpose() * y);
}

Vector ridge_solve(const Matrix& phi, const Vector& y, double alpha) {
  return RidgeSolver(phi, alpha).solve(y);
}

Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  if (cols > rows) throw std::invalid_argument("random_orthonormal: cols must not exceed rows");
  if (cols == 0) return Matrix(rows, 0);
  Matrix g = gaussian_matrix(rows, cols, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix column signs so the result is unique given the Gaussian draw.
  for (Index j = 0; j < cols; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("gaussian_matrix: negative shape");
  Matrix out(rows, cols);
  Rng rng(seed);
  rng.fill_gaussian(out);
  return out;
}

}  // namespace w2s
