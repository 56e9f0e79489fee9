#include "w2s/pipeline.hpp"

#include <stdexcept>
#include <utility>

namespace w2s {

namespace {

FitCoefficients fit_linear(const Matrix& phi, const Vector& y, FeatureKind kind, const SolverConfig& cfg) {
  cfg.validate();
  Vector theta = cfg.ridge_alpha > 0.0 ? RidgeSolver(phi, cfg.ridge_alpha).solve(y)
                                       : MinNormSolver(phi, cfg.rcond).solve(y);
  return FitCoefficients{std::move(theta), kind, cfg};
}

}  // namespace

FitCoefficients fit_weak(const Dataset& labeled, const SolverConfig& cfg) {
  if (labeled.size() < 1) throw std::invalid_argument("fit_weak: needs at least one labeled sample");
  return fit_linear(labeled.weak_features, labeled.noisy_labels, FeatureKind::weak, cfg);
}

Vector pseudo_label(const FitCoefficients& teacher, const Dataset& unlabeled) {
  if (teacher.which_features != FeatureKind::weak)
    throw std::invalid_argument("pseudo_label: teacher must be a weak-feature fit");
  if (teacher.theta.size() != unlabeled.weak_features.cols())
    throw std::invalid_argument("pseudo_label: coefficient length does not match features");
  return unlabeled.weak_features * teacher.theta;
}

FitCoefficients fit_w2s(const Dataset& unlabeled, const Vector& pseudo, const SolverConfig& cfg) {
  if (unlabeled.size() < 1) throw std::invalid_argument("fit_w2s: needs at least one pseudo-labeled sample");
  if (pseudo.size() != unlabeled.size()) throw std::invalid_argument("fit_w2s: pseudo-label length mismatch");
  return fit_linear(unlabeled.strong_features, pseudo, FeatureKind::strong, cfg);
}

FitCoefficients fit_strong_sft(const Dataset& labeled, const SolverConfig& cfg) {
  if (labeled.size() < 1) throw std::invalid_argument("fit_strong_sft: needs at least one labeled sample");
  return fit_linear(labeled.strong_features, labeled.noisy_labels, FeatureKind::strong, cfg);
}

FitCoefficients fit_ceiling(const Dataset& labeled, const Dataset& unlabeled_with_true_labels,
                            const SolverConfig& cfg) {
  const Index n = labeled.size();
  const Index big_n = unlabeled_with_true_labels.size();
  if (n + big_n < 1) throw std::invalid_argument("fit_ceiling: empty training data");
  Matrix phi(n + big_n, labeled.strong_features.cols());
  phi.topRows(n) = labeled.strong_features;
  phi.bottomRows(big_n) = unlabeled_with_true_labels.strong_features;
  Vector y(n + big_n);
  y.head(n) = labeled.noisy_labels;
  y.tail(big_n) = unlabeled_with_true_labels.noisy_labels;
  return fit_linear(phi, y, FeatureKind::strong, cfg);
}

Vector predict(const FitCoefficients& fit, const Dataset& data) {
  const Matrix& phi = fit.which_features == FeatureKind::weak ? data.weak_features : data.strong_features;
  if (fit.theta.size() != phi.cols()) throw std::invalid_argument("predict: coefficient length does not match features");
  return phi * fit.theta;
}

PipelineRun run_pipeline(const TaskSpec& task, const CovarianceSpec& cov_s, const CovarianceSpec& cov_w,
                         Index n, Index N, const SolverConfig& cfg, std::uint64_t seed) {
  if (n < 1 || N < 1) throw std::invalid_argument("run_pipeline: n and N must be at least 1");
  Rng rng(seed);
  PipelineRun run;
  run.labeled_set = sample_dataset(task, cov_s, cov_w, n, rng.fork(0));
  run.unlabeled_set = sample_dataset(task, cov_s, cov_w, N, rng.fork(1));
  run.weak = fit_weak(run.labeled_set, cfg);
  run.w2s = fit_w2s(run.unlabeled_set, pseudo_label(run.weak, run.unlabeled_set), cfg);
  run.strong_sft = fit_strong_sft(run.labeled_set, cfg);
  run.ceiling = fit_ceiling(run.labeled_set, run.unlabeled_set, cfg);
  return run;
}

}  // namespace w2s
