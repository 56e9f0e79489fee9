#pragma once

#include <cstdint>
#include <vector>

#include "w2s/linalg.hpp"
#include "w2s/rng.hpp"

namespace w2s {

/// Eigenbasis and eigenvalues of one model's feature covariance
/// Sigma = basis * diag(eigenvalues) * basis^T. The rank of Sigma is the
/// model's intrinsic dimension.
struct CovarianceSpec {
  Index ambient_dim = 0;
  Vector eigenvalues;  // nonincreasing, >= 0
  Matrix basis;        // ambient_dim x rank, orthonormal columns

  Index rank() const { return eigenvalues.size(); }
  double trace() const { return eigenvalues.sum(); }
  void validate() const;
};

/// Downstream regression task: f(x) = x^T Sigma*^{1/2} theta_star with
/// Gaussian label noise of variance noise_variance.
struct TaskSpec {
  Index ambient_dim = 0;
  Vector ground_truth_eigenvalues;  // length d_star, nonincreasing
  Matrix ground_truth_basis;        // ambient_dim x d_star
  Vector theta_star;                // length ambient_dim, unit norm
  double noise_variance = 0.0;

  /// Var of the noiseless target over the input distribution; reported, not
  /// normalized away.
  double signal_variance() const;
  void validate() const;
};

/// One sampled set: weak and strong feature views of the same latent inputs,
/// plus clean and noisy labels.
struct Dataset {
  Matrix ambient_inputs;   // m x d latent isotropic draws
  Matrix weak_features;    // m x d
  Matrix strong_features;  // m x d
  Vector clean_labels;
  Vector noisy_labels;

  Index size() const { return ambient_inputs.rows(); }
};

enum class EigenvalueProfile { inverse_index, custom };
enum class LatentKind { gaussian, rademacher };

/// Geometry of the synthetic task: ground truth spans canonical coordinates
/// 1..d_star with the chosen spectrum; the strong model spans 1..d_s and the
/// weak model spans d_s-d_overlap+1 .. d_s-d_overlap+d_w, so the two feature
/// subspaces share exactly d_overlap coordinates.
struct SyntheticConfig {
  Index d = 0;
  Index d_star = 0;
  Index d_s = 0;
  Index d_w = 0;
  Index d_overlap = 0;
  double sigma2 = 0.0;
  EigenvalueProfile profile = EigenvalueProfile::inverse_index;
  std::vector<double> custom_eigenvalues;
  LatentKind latent = LatentKind::gaussian;

  void validate() const;
};

struct SyntheticModel {
  TaskSpec task;
  CovarianceSpec cov_s;
  CovarianceSpec cov_w;
};

SyntheticModel build_synthetic(const SyntheticConfig& config, std::uint64_t seed);

Dataset sample_dataset(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                       Index m, Rng rng, LatentKind latent = LatentKind::gaussian);
Dataset sample_dataset(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                       Index m, std::uint64_t seed, LatentKind latent = LatentKind::gaussian);

/// Same draw with the latent inputs and the label noise on separate streams,
/// so a design can be held fixed while noise is redrawn (and vice versa).
Dataset sample_dataset_split(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                             Index m, Rng latent_rng, Rng noise_rng, LatentKind latent = LatentKind::gaussian);

/// Monte-Carlo estimate of the population least-squares error of the best
/// linear predictor over cov's features: fit on a probe sample of size
/// m_probe (default 50 * rank when 0), evaluate on a fresh probe.
double ft_approx_error(const TaskSpec& task, const CovarianceSpec& cov, Index m_probe, std::uint64_t seed);

}  // namespace w2s
