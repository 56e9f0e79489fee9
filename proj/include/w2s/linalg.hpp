#pragma once

#include <cstdint>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace w2s {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Regularization of the regression fits. ridge_alpha = 0 selects the
/// ridgeless (minimum-norm) path; rcond = 0 selects the automatic singular
/// value cutoff 1e-10 * max(n, d).
struct SolverConfig {
  double ridge_alpha = 0.0;
  double rcond = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Minimum-norm least squares: theta = pinv(phi) * y with singular values
/// below cutoff * sigma_max treated as zero. Among all least-squares
/// minimizers the returned theta has minimal Euclidean norm.
///
/// The SVD spectrum is taken from the Gram matrix on the smaller side, which
/// costs O(min(n,d)^2 max(n,d)) instead of a full bidiagonalization but only
/// resolves singular values down to about sqrt(eps) * sigma_max; the cutoff is
/// floored there. Construct once to solve against several right-hand sides on
/// the same design.
class MinNormSolver {
 public:
  explicit MinNormSolver(const Matrix& phi, double rcond = 0.0);

  Vector solve(const Vector& y) const;

  Index rank() const { return rank_; }
  /// Descending, same count as min(rows, cols).
  const Vector& singular_values() const { return singular_values_; }

 private:
  Matrix phi_;
  Matrix pinv_core_;  // U diag(1/lambda_kept) U^T on the Gram side
  Vector singular_values_;
  Index rank_ = 0;
  bool gram_on_rows_ = true;
};

Vector min_norm_solve(const Matrix& phi, const Vector& y, double rcond = 0.0);

/// Ridge regression: the unique minimizer of (1/n)|phi theta - y|^2 +
/// alpha |theta|^2, i.e. theta = (phi^T phi + alpha n I)^{-1} phi^T y.
/// Solved in whichever of sample/feature space is smaller.
class RidgeSolver {
 public:
  RidgeSolver(const Matrix& phi, double alpha);

  Vector solve(const Vector& y) const;

 private:
  Matrix phi_;
  Eigen::LLT<Matrix> llt_;
  bool dual_ = false;
};

Vector ridge_solve(const Matrix& phi, const Vector& y, double alpha);

/// V with V^T V = I_cols (partial isometry), obtained by QR-orthonormalizing
/// a seeded Gaussian matrix. Deterministic per seed; requires cols <= rows.
Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed);

/// i.i.d. standard normal entries, bit-identical for equal seeds.
Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

}  // namespace w2s
