#include "w2s/risk.hpp"

#include <cmath>
#include <exception>
#include <memory>
#include <stdexcept>
#include <vector>

namespace w2s {

namespace {

// One factorization per design, reused for the noisy and noiseless labels.
struct FactoredFit {
  FactoredFit(const Matrix& phi, const SolverConfig& cfg) {
    if (cfg.ridge_alpha > 0.0)
      ridge = std::make_unique<RidgeSolver>(phi, cfg.ridge_alpha);
    else
      min_norm = std::make_unique<MinNormSolver>(phi, cfg.rcond);
  }
  Vector solve(const Vector& y) const { return ridge ? ridge->solve(y) : min_norm->solve(y); }

  std::unique_ptr<MinNormSolver> min_norm;
  std::unique_ptr<RidgeSolver> ridge;
};

double mean_sq(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.squaredNorm() / static_cast<double>(v.size());
}

struct TrialData {
  Dataset labeled;
  Dataset unlabeled;
};

TrialData draw_trial(const PipelineConfig& c, Rng design_rng, Rng noise_rng) {
  TrialData t;
  t.labeled = sample_dataset_split(c.task, c.cov_s, c.cov_w, c.n, design_rng.fork(0), noise_rng.fork(0), c.latent);
  t.unlabeled = sample_dataset_split(c.task, c.cov_s, c.cov_w, c.N, design_rng.fork(1), noise_rng.fork(1), c.latent);
  return t;
}

// Predictions for all four models under an arbitrary labeled-noise label
// vector; used by decompose_trial (noisy vs clean) and the linearity check.
struct PipelinePredictions {
  Vector weak, w2s, strong_sft, ceiling;  // each on its test set
};

struct FactoredTrial {
  FactoredTrial(const TrialData& t, const PipelineConfig& cfg)
      : teacher(t.labeled.weak_features, cfg.solver),
        student(t.unlabeled.strong_features, cfg.student_solver()),
        strong(t.labeled.strong_features, cfg.solver),
        data(&t) {
    const Index n = t.labeled.size();
    const Index big_n = t.unlabeled.size();
    ceiling_phi.resize(n + big_n, t.labeled.strong_features.cols());
    ceiling_phi.topRows(n) = t.labeled.strong_features;
    ceiling_phi.bottomRows(big_n) = t.unlabeled.strong_features;
    ceiling = std::make_unique<FactoredFit>(ceiling_phi, cfg.solver);
  }

  // labeled_y drives the weak, W2S, and strong fits; unlabeled_y only enters
  // the ceiling fit (the W2S path never reads it).
  PipelinePredictions predict(const Vector& labeled_y, const Vector& unlabeled_y) const {
    PipelinePredictions p;
    Vector theta_w = teacher.solve(labeled_y);
    p.weak = data->unlabeled.weak_features * theta_w;
    Vector theta_w2s = student.solve(p.weak);  // pseudo-labels are the teacher outputs on S
    p.w2s = data->unlabeled.strong_features * theta_w2s;
    Vector theta_s = strong.solve(labeled_y);
    p.strong_sft = data->unlabeled.strong_features * theta_s;
    Vector y_all(labeled_y.size() + unlabeled_y.size());
    y_all.head(labeled_y.size()) = labeled_y;
    y_all.tail(unlabeled_y.size()) = unlabeled_y;
    Vector theta_c = ceiling->solve(y_all);
    p.ceiling = ceiling_phi * theta_c;
    return p;
  }

  FactoredFit teacher;
  FactoredFit student;
  FactoredFit strong;
  std::unique_ptr<FactoredFit> ceiling;
  Matrix ceiling_phi;
  const TrialData* data;
};

}  // namespace

TrialDecomposition decompose_trial(const PipelineConfig& config, Rng design_rng, Rng noise_rng) {
  if (config.n < 1 || config.N < 1) throw std::invalid_argument("decompose_trial: n and N must be at least 1");
  TrialData t = draw_trial(config, design_rng, noise_rng);
  FactoredTrial fit(t, config);

  PipelinePredictions noisy = fit.predict(t.labeled.noisy_labels, t.unlabeled.noisy_labels);
  PipelinePredictions clean = fit.predict(t.labeled.clean_labels, t.unlabeled.clean_labels);

  Vector target_ceiling(t.labeled.size() + t.unlabeled.size());
  target_ceiling.head(t.labeled.size()) = t.labeled.clean_labels;
  target_ceiling.tail(t.unlabeled.size()) = t.unlabeled.clean_labels;

  TrialDecomposition out;
  auto fill = [&](Model m, const Vector& py, const Vector& pc, const Vector& target) {
    out.var_contrib[static_cast<std::size_t>(m)] = mean_sq(py - pc);
    out.bias_contrib[static_cast<std::size_t>(m)] = mean_sq(pc - target);
  };
  fill(Model::weak, noisy.weak, clean.weak, t.unlabeled.clean_labels);
  fill(Model::w2s, noisy.w2s, clean.w2s, t.unlabeled.clean_labels);
  fill(Model::strong_sft, noisy.strong_sft, clean.strong_sft, t.unlabeled.clean_labels);
  fill(Model::ceiling, noisy.ceiling, clean.ceiling, target_ceiling);
  return out;
}

TrialDecomposition decompose_trial(const PipelineConfig& config, Rng trial_rng) {
  return decompose_trial(config, trial_rng.fork(0), trial_rng.fork(1));
}

void assert_label_linearity(const PipelineConfig& config, Rng rng) {
  TrialData t = draw_trial(config, rng.fork(0), rng.fork(1));
  FactoredTrial fit(t, config);

  Rng label_rng = rng.fork(2);
  auto draw_labels = [&](Index m) {
    Vector v(m);
    label_rng.fill_gaussian(v);
    return v;
  };
  Vector a1 = draw_labels(config.n), a2 = draw_labels(config.n);
  Vector b1 = draw_labels(config.N), b2 = draw_labels(config.N);

  PipelinePredictions p1 = fit.predict(a1, b1);
  PipelinePredictions p2 = fit.predict(a2, b2);
  PipelinePredictions ps = fit.predict(a1 + a2, b1 + b2);

  auto check = [&](const Vector& x1, const Vector& x2, const Vector& xs, const char* who) {
    const double scale = std::max(1.0, std::max(x1.norm(), x2.norm()));
    if ((xs - x1 - x2).norm() > 1e-8 * scale)
      throw std::logic_error(std::string("estimator is not linear in its labels: ") + who);
  };
  check(p1.weak, p2.weak, ps.weak, "weak");
  check(p1.w2s, p2.w2s, ps.w2s, "w2s");
  check(p1.strong_sft, p2.strong_sft, ps.strong_sft, "strong_sft");
  check(p1.ceiling, p2.ceiling, ps.ceiling, "ceiling");
}

RiskSummary estimate_all_risks(const PipelineConfig& config, long trials, std::uint64_t seed, Exec exec) {
  if (trials < 2) throw std::invalid_argument("estimate_all_risks: trials must be at least 2");
  Rng base(seed);
  assert_label_linearity(config, base.fork(2 * static_cast<std::uint64_t>(trials)));

  std::vector<TrialDecomposition> rows(static_cast<std::size_t>(trials));
  std::exception_ptr failure;
  if (exec == Exec::openmp) {
#pragma omp parallel for schedule(dynamic)
    for (long t = 0; t < trials; ++t) {
      try {
        rows[static_cast<std::size_t>(t)] =
            decompose_trial(config, base.fork(2 * static_cast<std::uint64_t>(t)),
                            base.fork(2 * static_cast<std::uint64_t>(t) + 1));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (long t = 0; t < trials; ++t)
      rows[static_cast<std::size_t>(t)] =
          decompose_trial(config, base.fork(2 * static_cast<std::uint64_t>(t)),
                          base.fork(2 * static_cast<std::uint64_t>(t) + 1));
  }
  if (failure) std::rethrow_exception(failure);

  // Sequential reduction keeps the result independent of the thread schedule.
  RiskSummary summary;
  for (std::size_t m = 0; m < 4; ++m) {
    double var_mean = 0.0, bias_mean = 0.0, er_mean = 0.0;
    for (const auto& r : rows) {
      var_mean += r.var_contrib[m];
      bias_mean += r.bias_contrib[m];
      er_mean += r.var_contrib[m] + r.bias_contrib[m];
    }
    const double t = static_cast<double>(trials);
    var_mean /= t;
    bias_mean /= t;
    er_mean /= t;
    double var_ss = 0.0, bias_ss = 0.0, er_ss = 0.0;
    for (const auto& r : rows) {
      const double er = r.var_contrib[m] + r.bias_contrib[m];
      var_ss += (r.var_contrib[m] - var_mean) * (r.var_contrib[m] - var_mean);
      bias_ss += (r.bias_contrib[m] - bias_mean) * (r.bias_contrib[m] - bias_mean);
      er_ss += (er - er_mean) * (er - er_mean);
    }
    RiskEstimate& est = summary.per_model[m];
    est.variance = var_mean;
    est.bias = bias_mean;
    est.excess_risk = var_mean + bias_mean;
    est.trials = trials;
    est.se_variance = std::sqrt(var_ss / (t * (t - 1.0)));
    est.se_bias = std::sqrt(bias_ss / (t * (t - 1.0)));
    est.se_excess_risk = std::sqrt(er_ss / (t * (t - 1.0)));
  }
  return summary;
}

RiskEstimate estimate_risk(const PipelineConfig& config, Model which, long trials, std::uint64_t seed, Exec exec) {
  return estimate_all_risks(config, trials, seed, exec)[which];
}

double pgr(double er_w, double er_w2s, double er_c) {
  if (!(std::isfinite(er_w) && std::isfinite(er_w2s) && std::isfinite(er_c)))
    throw std::invalid_argument("pgr: non-finite excess risk");
  if (er_w == er_c) throw std::domain_error("pgr: degenerate denominator (er_w == er_c)");
  return (er_w - er_w2s) / (er_w - er_c);
}

double opr(double er_s, double er_w2s) {
  if (!(std::isfinite(er_s) && std::isfinite(er_w2s))) throw std::invalid_argument("opr: non-finite excess risk");
  if (er_w2s == 0.0) throw std::domain_error("opr: zero denominator");
  return er_s / er_w2s;
}

MetricPair metrics_from(const RiskSummary& s) {
  return MetricPair{pgr(s[Model::weak].excess_risk, s[Model::w2s].excess_risk, s[Model::ceiling].excess_risk),
                    opr(s[Model::strong_sft].excess_risk, s[Model::w2s].excess_risk)};
}

}  // namespace w2s
