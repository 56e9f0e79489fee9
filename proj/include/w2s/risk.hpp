#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "w2s/feature_model.hpp"
#include "w2s/pipeline.hpp"

namespace w2s {

enum class Model { weak, w2s, strong_sft, ceiling };
inline constexpr std::array<Model, 4> kAllModels{Model::weak, Model::w2s, Model::strong_sft, Model::ceiling};
inline constexpr const char* model_name(Model m) {
  switch (m) {
    case Model::weak: return "weak";
    case Model::w2s: return "w2s";
    case Model::strong_sft: return "strong_sft";
    default: return "ceiling";
  }
}

/// Monte-Carlo excess risk with its exact conditional variance/bias split.
/// excess_risk == variance + bias by construction; variance and bias are
/// nonnegative averages of squares.
struct RiskEstimate {
  double excess_risk = 0.0;
  double variance = 0.0;
  double bias = 0.0;
  long trials = 0;
  double se_excess_risk = 0.0;
  double se_variance = 0.0;
  double se_bias = 0.0;
};

struct MetricPair {
  double pgr = 0.0;
  double opr = 0.0;
};

/// One experiment to repeat: fixed task and feature models, labeled size n,
/// pseudo-labeled size N, and a solver configuration. The student stage may
/// carry its own penalty (the ridge analysis tunes the teacher and student
/// penalties separately); when unset it shares `solver`.
struct PipelineConfig {
  TaskSpec task;
  CovarianceSpec cov_s;
  CovarianceSpec cov_w;
  Index n = 0;
  Index N = 0;
  SolverConfig solver;
  LatentKind latent = LatentKind::gaussian;
  std::optional<SolverConfig> w2s_solver;

  const SolverConfig& student_solver() const { return w2s_solver ? *w2s_solver : solver; }
};

/// Per-trial variance/bias contributions for all four models, indexed by
/// Model. The conditional mean given the feature draw is computed exactly by
/// refitting the identical designs on noiseless labels (all four estimators
/// are linear in their label vector), so no nested noise loop is needed.
struct TrialDecomposition {
  std::array<double, 4> var_contrib{};
  std::array<double, 4> bias_contrib{};
};

TrialDecomposition decompose_trial(const PipelineConfig& config, Rng design_rng, Rng noise_rng);
TrialDecomposition decompose_trial(const PipelineConfig& config, Rng trial_rng);

/// Checks the superposition property theta(y1 + y2) = theta(y1) + theta(y2)
/// on one draw; throws std::logic_error if any fit is not linear in labels.
void assert_label_linearity(const PipelineConfig& config, Rng rng);

enum class Exec { serial, openmp };

struct RiskSummary {
  std::array<RiskEstimate, 4> per_model{};
  const RiskEstimate& operator[](Model m) const { return per_model[static_cast<std::size_t>(m)]; }
  RiskEstimate& operator[](Model m) { return per_model[static_cast<std::size_t>(m)]; }
};

/// Averages decompose_trial over `trials` fresh (design, noise) draws. All
/// four models share draws. Trials are keyed by index, so the serial and
/// OpenMP paths return bit-identical results.
RiskSummary estimate_all_risks(const PipelineConfig& config, long trials, std::uint64_t seed,
                               Exec exec = Exec::openmp);

RiskEstimate estimate_risk(const PipelineConfig& config, Model which, long trials, std::uint64_t seed,
                           Exec exec = Exec::openmp);

/// Performance gap recovery (er_w - er_w2s) / (er_w - er_c).
double pgr(double er_w, double er_w2s, double er_c);
/// Outperforming ratio er_s / er_w2s; > 1 means W2S beats direct strong SFT.
double opr(double er_s, double er_w2s);

MetricPair metrics_from(const RiskSummary& s);

}  // namespace w2s
