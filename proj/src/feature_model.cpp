#include "w2s/feature_model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

namespace w2s {

namespace {

void require_nonincreasing(const Vector& v, const char* who) {
  for (Index i = 0; i + 1 < v.size(); ++i)
    if (v(i) < v(i + 1)) throw std::invalid_argument(std::string(who) + ": eigenvalues must be nonincreasing");
  if (v.size() > 0 && (!v.allFinite() || v.minCoeff() < 0.0))
    throw std::invalid_argument(std::string(who) + ": eigenvalues must be finite and nonnegative");
}

void require_orthonormal(const Matrix& v, double tol, const char* who) {
  const Index r = v.cols();
  const double dev = (v.transpose() * v - Matrix::Identity(r, r)).norm();
  if (dev >= tol) throw std::invalid_argument(std::string(who) + ": basis columns are not orthonormal");
}

Matrix canonical_basis(Index d, Index first, Index count) {
  Matrix v = Matrix::Zero(d, count);
  for (Index j = 0; j < count; ++j) v(first + j, j) = 1.0;
  return v;
}

void fill_latent(Matrix& x, Rng& rng, LatentKind latent) {
  if (latent == LatentKind::gaussian)
    rng.fill_gaussian(x);
  else
    rng.fill_rademacher(x);
}

// phi = x * Sigma^{1/2} computed through the eigenbasis.
Matrix project_features(const Matrix& x, const CovarianceSpec& cov) {
  if (cov.rank() == 0) return Matrix::Zero(x.rows(), cov.ambient_dim);
  Matrix scores = (x * cov.basis) * cov.eigenvalues.cwiseSqrt().asDiagonal();
  return scores * cov.basis.transpose();
}

}  // namespace

void CovarianceSpec::validate() const {
  if (ambient_dim < 0) throw std::invalid_argument("CovarianceSpec: negative ambient dimension");
  if (basis.rows() != ambient_dim || basis.cols() != eigenvalues.size())
    throw std::invalid_argument("CovarianceSpec: basis shape does not match eigenvalues");
  if (rank() > ambient_dim) throw std::invalid_argument("CovarianceSpec: rank exceeds ambient dimension");
  require_nonincreasing(eigenvalues, "CovarianceSpec");
  if (rank() > 0) require_orthonormal(basis, 1e-8, "CovarianceSpec");
}

double TaskSpec::signal_variance() const {
  return (ground_truth_eigenvalues.cwiseSqrt().asDiagonal() * (ground_truth_basis.transpose() * theta_star))
      .squaredNorm();
}

void TaskSpec::validate() const {
  if (ambient_dim <= 0) throw std::invalid_argument("TaskSpec: ambient dimension must be positive");
  if (ground_truth_basis.rows() != ambient_dim || ground_truth_basis.cols() != ground_truth_eigenvalues.size())
    throw std::invalid_argument("TaskSpec: ground-truth basis shape does not match eigenvalues");
  require_nonincreasing(ground_truth_eigenvalues, "TaskSpec");
  if (ground_truth_eigenvalues.size() > 0) require_orthonormal(ground_truth_basis, 1e-8, "TaskSpec");
  if (theta_star.size() != ambient_dim) throw std::invalid_argument("TaskSpec: theta_star length must equal ambient dimension");
  if (std::abs(theta_star.norm() - 1.0) >= 1e-10) throw std::invalid_argument("TaskSpec: theta_star must have unit norm");
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
    throw std::invalid_argument("TaskSpec: noise variance must be a finite nonnegative real");
}

void SyntheticConfig::validate() const {
  if (d <= 0 || d_star <= 0 || d_s <= 0 || d_w <= 0)
    throw std::invalid_argument("SyntheticConfig: dimensions must be positive");
  if (d_overlap < 0 || d_overlap > std::min(d_s, d_w))
    throw std::invalid_argument("SyntheticConfig: infeasible overlap geometry (d_overlap > min(d_s, d_w))");
  if (d_s + d_w - d_overlap > d_star || d_star > d)
    throw std::invalid_argument("SyntheticConfig: infeasible overlap geometry (need d_s + d_w - d_overlap <= d_star <= d)");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("SyntheticConfig: sigma2 must be nonnegative");
  if (profile == EigenvalueProfile::custom) {
    if (static_cast<Index>(custom_eigenvalues.size()) < d_star)
      throw std::invalid_argument("SyntheticConfig: custom spectrum shorter than d_star");
    for (Index i = 0; i < d_star; ++i) {
      const double v = custom_eigenvalues[static_cast<std::size_t>(i)];
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("SyntheticConfig: custom spectrum must be positive");
      if (i > 0 && custom_eigenvalues[static_cast<std::size_t>(i - 1)] < v)
        throw std::invalid_argument("SyntheticConfig: custom spectrum must be nonincreasing");
    }
  }
}

SyntheticModel build_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
  config.validate();

  Vector lambda_star(config.d_star);
  for (Index i = 0; i < config.d_star; ++i)
    lambda_star(i) = config.profile == EigenvalueProfile::inverse_index
                         ? 1.0 / static_cast<double>(i + 1)
                         : config.custom_eigenvalues[static_cast<std::size_t>(i)];

  Rng rng(seed);
  Rng theta_rng = rng.fork(0);
  Vector theta = Vector(config.d);
  theta_rng.fill_gaussian(theta);
  theta /= theta.norm();

  SyntheticModel model;
  model.task.ambient_dim = config.d;
  model.task.ground_truth_eigenvalues = lambda_star;
  model.task.ground_truth_basis = canonical_basis(config.d, 0, config.d_star);
  model.task.theta_star = theta;
  model.task.noise_variance = config.sigma2;

  model.cov_s.ambient_dim = config.d;
  model.cov_s.eigenvalues = lambda_star.head(config.d_s);
  model.cov_s.basis = canonical_basis(config.d, 0, config.d_s);

  const Index weak_first = config.d_s - config.d_overlap;  // 0-based
  model.cov_w.ambient_dim = config.d;
  model.cov_w.eigenvalues = lambda_star.segment(weak_first, config.d_w);
  model.cov_w.basis = canonical_basis(config.d, weak_first, config.d_w);

  model.task.validate();
  model.cov_s.validate();
  model.cov_w.validate();
  return model;
}

Dataset sample_dataset_split(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                             Index m, Rng latent_rng, Rng noise_rng, LatentKind latent) {
  if (m < 0) throw std::invalid_argument("sample_dataset: negative sample count");
  if (cov_s.ambient_dim != task.ambient_dim || cov_w.ambient_dim != task.ambient_dim)
    throw std::invalid_argument("sample_dataset: ambient dimensions disagree");

  Dataset ds;
  ds.ambient_inputs = Matrix(m, task.ambient_dim);
  fill_latent(ds.ambient_inputs, latent_rng, latent);

  ds.weak_features = project_features(ds.ambient_inputs, cov_w);
  ds.strong_features = project_features(ds.ambient_inputs, cov_s);

  // f = x^T Sigma*^{1/2} theta*, with the weight vector formed once.
  Vector weight = task.ground_truth_basis *
                  (task.ground_truth_eigenvalues.cwiseSqrt().asDiagonal() *
                   (task.ground_truth_basis.transpose() * task.theta_star));
  ds.clean_labels = ds.ambient_inputs * weight;

  Vector noise(m);
  noise_rng.fill_gaussian(noise);
  ds.noisy_labels = ds.clean_labels + std::sqrt(task.noise_variance) * noise;
  return ds;
}

Dataset sample_dataset(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                       Index m, Rng rng, LatentKind latent) {
  return sample_dataset_split(task, cov_s, cov_w, m, rng.fork(0), rng.fork(1), latent);
}

Dataset sample_dataset(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                       Index m, std::uint64_t seed, LatentKind latent) {
  return sample_dataset(task, cov_s, cov_w, m, Rng(seed), latent);
}

double ft_approx_error(const TaskSpec& task, const CovarianceSpec& cov, Index m_probe, std::uint64_t seed) {
  if (cov.ambient_dim != task.ambient_dim) throw std::invalid_argument("ft_approx_error: ambient dimensions disagree");

  // Keep only directions the features actually carry.
  Index r = 0;
  while (r < cov.rank() && cov.eigenvalues(r) > 0.0) ++r;

  if (m_probe == 0) m_probe = 50 * std::max<Index>(r, 1);
  if (m_probe < 2 * std::max<Index>(r, 1))
    throw std::invalid_argument("ft_approx_error: singular probe design (probe too small)");

  // The fit only sees the span of [feature basis, ground-truth basis]; sample
  // latent coordinates in that joint span instead of the full ambient space.
  const Index d = task.ambient_dim;
  const Index r_star = task.ground_truth_eigenvalues.size();
  Matrix joint(d, r + r_star);
  if (r > 0) joint.leftCols(r) = cov.basis.leftCols(r);
  joint.rightCols(r_star) = task.ground_truth_basis;
  Eigen::ColPivHouseholderQR<Matrix> qr(joint);
  const Index k = qr.rank();
  Matrix b = qr.householderQ() * Matrix::Identity(d, k);

  // Feature coordinates z = Lambda^{1/2} V^T x and targets f in the reduced span.
  Matrix feature_map;  // k x r
  if (r > 0) feature_map = (b.transpose() * cov.basis.leftCols(r)) * cov.eigenvalues.head(r).cwiseSqrt().asDiagonal();
  Vector weight = task.ground_truth_basis *
                  (task.ground_truth_eigenvalues.cwiseSqrt().asDiagonal() *
                   (task.ground_truth_basis.transpose() * task.theta_star));
  Vector target_map = b.transpose() * weight;  // k

  Rng rng(seed);
  auto draw = [&](Rng probe_rng) {
    Matrix c(m_probe, k);
    probe_rng.fill_gaussian(c);
    Matrix z = r > 0 ? Matrix(c * feature_map) : Matrix(m_probe, 0);
    Vector f = c * target_map;
    return std::pair<Matrix, Vector>(std::move(z), std::move(f));
  };

  auto [z_train, f_train] = draw(rng.fork(0));
  auto [z_eval, f_eval] = draw(rng.fork(1));

  if (r == 0) return f_eval.squaredNorm() / static_cast<double>(m_probe);

  Vector coeff = MinNormSolver(z_train).solve(f_train);
  return (z_eval * coeff - f_eval).squaredNorm() / static_cast<double>(m_probe);
}

}  // namespace w2s
