#pragma once

#include <cstdint>

#include "w2s/feature_model.hpp"
#include "w2s/linalg.hpp"

namespace w2s {

enum class FeatureKind { weak, strong };

struct FitCoefficients {
  Vector theta;
  FeatureKind which_features = FeatureKind::weak;
  SolverConfig solver;
};

/// Weak teacher fit on the labeled set's weak features and noisy labels.
FitCoefficients fit_weak(const Dataset& labeled, const SolverConfig& cfg);

/// Teacher predictions on the unlabeled set's weak features.
Vector pseudo_label(const FitCoefficients& teacher, const Dataset& unlabeled);

/// Student fit on the unlabeled set's strong features against pseudo-labels.
FitCoefficients fit_w2s(const Dataset& unlabeled, const Vector& pseudo, const SolverConfig& cfg);

/// Strong baseline fit on the labeled set's strong features and noisy labels.
FitCoefficients fit_strong_sft(const Dataset& labeled, const SolverConfig& cfg);

/// Ceiling fit on strong features over the concatenated labeled + unlabeled
/// sets, using the true (noisy) labels of both.
FitCoefficients fit_ceiling(const Dataset& labeled, const Dataset& unlabeled_with_true_labels,
                            const SolverConfig& cfg);

Vector predict(const FitCoefficients& fit, const Dataset& data);

/// One end-to-end draw: a labeled set of size n, an unlabeled set of size N,
/// and all four fits. The unlabeled set doubles as the test set for the weak,
/// W2S, and strong-SFT models; the ceiling model is scored on the union.
struct PipelineRun {
  Dataset labeled_set;
  Dataset unlabeled_set;
  FitCoefficients weak;
  FitCoefficients w2s;
  FitCoefficients strong_sft;
  FitCoefficients ceiling;

  const Dataset& test_set() const { return unlabeled_set; }
};

PipelineRun run_pipeline(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                         Index n, Index N, const SolverConfig& cfg, std::uint64_t seed);

}  // namespace w2s
