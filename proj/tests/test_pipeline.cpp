#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "w2s/pipeline.hpp"
#include "w2s/risk.hpp"

using w2s::Dataset;
using w2s::Matrix;
using w2s::SolverConfig;
using w2s::SyntheticConfig;
using w2s::Vector;

namespace {

SyntheticConfig config(w2s::Index d, w2s::Index d_star, w2s::Index d_s, w2s::Index d_w, w2s::Index overlap,
                       double sigma2) {
  SyntheticConfig c;
  c.d = d;
  c.d_star = d_star;
  c.d_s = d_s;
  c.d_w = d_w;
  c.d_overlap = overlap;
  c.sigma2 = sigma2;
  return c;
}

// Truth lies inside the weak span: with overlap = d_s the weak span starts at
// the first coordinate, and d_star = d_w makes it cover all of the truth.
w2s::SyntheticModel weak_representable(double sigma2, std::uint64_t seed) {
  return w2s::build_synthetic(config(40, 12, 8, 12, 8, sigma2), seed);
}

double mean_sq(const Vector& v) { return v.size() ? v.squaredNorm() / static_cast<double>(v.size()) : 0.0; }

}  // namespace

TEST_CASE("noiseless representable weak fit predicts exactly") {
  auto model = weak_representable(0.0, 2);
  auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 30, 5);
  auto test = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 50, 6);
  auto fit = w2s::fit_weak(labeled, SolverConfig{});
  CHECK((w2s::predict(fit, test) - test.clean_labels).norm() < 1e-8);
}

TEST_CASE("ridgeless underdetermined weak fit interpolates") {
  auto model = w2s::build_synthetic(config(60, 30, 10, 20, 0, 1.0), 3);
  auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 12, 7);  // n < d_w
  auto fit = w2s::fit_weak(labeled, SolverConfig{});
  CHECK((labeled.weak_features * fit.theta - labeled.noisy_labels).norm() < 1e-8);
}

TEST_CASE("weak teacher variance matches the inverse-Wishart mean") {
  // n=6, d_w=4, sigma2=1, canonical d=4: expected variance 4.
  SyntheticConfig c = config(4, 4, 4, 4, 4, 1.0);
  auto model = w2s::build_synthetic(c, 11);
  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, 6, 400, SolverConfig{}, w2s::LatentKind::gaussian};
  auto est = w2s::estimate_risk(pc, w2s::Model::weak, 2000, 13);
  CHECK(est.variance == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("pseudo labels") {
  auto model = weak_representable(0.0, 17);
  auto unlabeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 25, 19);

  w2s::FitCoefficients zero{Vector::Zero(40), w2s::FeatureKind::weak, SolverConfig{}};  // ambient d = 40
  CHECK(w2s::pseudo_label(zero, unlabeled).norm() == 0.0);

  auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 30, 23);
  auto teacher = w2s::fit_weak(labeled, SolverConfig{});
  CHECK((w2s::pseudo_label(teacher, unlabeled) - unlabeled.clean_labels).norm() < 1e-8);

  auto empty = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 0, 29);
  CHECK(w2s::pseudo_label(teacher, empty).size() == 0);

  w2s::FitCoefficients strong_tagged{Vector::Zero(40), w2s::FeatureKind::strong, SolverConfig{}};
  CHECK_THROWS_AS((void)w2s::pseudo_label(strong_tagged, unlabeled), std::invalid_argument);
}

TEST_CASE("student with clean pseudo-labels and representable truth is exact") {
  // truth inside the strong span: d_star = d_s
  auto model = w2s::build_synthetic(config(40, 12, 12, 10, 10, 0.0), 31);
  auto unlabeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 36, 37);
  auto fit = w2s::fit_w2s(unlabeled, unlabeled.clean_labels, SolverConfig{});
  auto test = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 40, 41);
  CHECK((w2s::predict(fit, test) - test.clean_labels).norm() < 1e-8);
}

TEST_CASE("nested weak span makes the student mimic the teacher variance") {
  // weak span inside the strong span: overlap = d_w
  auto model = w2s::build_synthetic(config(40, 16, 10, 6, 6, 1.0), 43);
  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, 12, 300, SolverConfig{}, w2s::LatentKind::gaussian};
  auto all = w2s::estimate_all_risks(pc, 2000, 47);
  CHECK(all[w2s::Model::w2s].variance ==
        doctest::Approx(all[w2s::Model::weak].variance).epsilon(0.10));
}

TEST_CASE("student variance matches the closed form") {
  // d=40, d_s=10, d_w=20, overlap=5, n=26, N=200, sigma2=1: var = 1.15
  auto model = w2s::build_synthetic(config(40, 25, 10, 20, 5, 1.0), 53);
  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, 26, 200, SolverConfig{}, w2s::LatentKind::gaussian};
  auto est = w2s::estimate_risk(pc, w2s::Model::w2s, 2000, 59);
  CHECK(est.variance == doctest::Approx(1.15).epsilon(0.10));
}

TEST_CASE("strong baseline variance matches the closed form") {
  // n=6, d_s=2, sigma2=1: var = 2/3
  auto model = w2s::build_synthetic(config(8, 4, 2, 2, 0, 1.0), 61);
  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, 6, 400, SolverConfig{}, w2s::LatentKind::gaussian};
  auto est = w2s::estimate_risk(pc, w2s::Model::strong_sft, 2000, 67);
  CHECK(est.variance == doctest::Approx(2.0 / 3.0).epsilon(0.10));
}

TEST_CASE("heavy shrinkage sends the strong fit to zero") {
  auto model = w2s::build_synthetic(config(20, 8, 4, 4, 0, 1.0), 71);
  auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 10, 73);
  SolverConfig heavy;
  heavy.ridge_alpha = 1e8;
  auto fit = w2s::fit_strong_sft(labeled, heavy);
  CHECK(fit.theta.norm() < 1e-6);
}

TEST_CASE("ceiling variance matches the fixed-design rate") {
  // n=6, N=14, d_s=2, sigma2=1: var = 2/20 = 0.1
  auto model = w2s::build_synthetic(config(8, 4, 2, 2, 0, 1.0), 79);
  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, 6, 14, SolverConfig{}, w2s::LatentKind::gaussian};
  auto est = w2s::estimate_risk(pc, w2s::Model::ceiling, 2000, 83);
  CHECK(est.variance == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("ceiling with an empty unlabeled set degenerates to strong SFT") {
  auto model = weak_representable(0.5, 89);
  auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 20, 97);
  auto empty = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 0, 101);
  auto ceiling = w2s::fit_ceiling(labeled, empty, SolverConfig{});
  auto strong = w2s::fit_strong_sft(labeled, SolverConfig{});
  CHECK(ceiling.theta == strong.theta);
}

TEST_CASE("run_pipeline is deterministic and exact in the noiseless representable case") {
  auto model = w2s::build_synthetic(config(40, 12, 12, 12, 12, 0.0), 103);
  auto a = w2s::run_pipeline(model.task, model.cov_s, model.cov_w, 20, 60, SolverConfig{}, 107);
  auto b = w2s::run_pipeline(model.task, model.cov_s, model.cov_w, 20, 60, SolverConfig{}, 107);
  CHECK(a.weak.theta == b.weak.theta);
  CHECK(a.w2s.theta == b.w2s.theta);
  CHECK(a.strong_sft.theta == b.strong_sft.theta);
  CHECK(a.ceiling.theta == b.ceiling.theta);

  const Dataset& test = a.test_set();
  for (const auto* fit : {&a.weak, &a.w2s, &a.strong_sft, &a.ceiling})
    CHECK(mean_sq(w2s::predict(*fit, test) - test.clean_labels) < 1e-16);
}

TEST_CASE("variance-dominated ordering: ceiling <= w2s <= weak on average") {
  auto model = w2s::build_synthetic(config(200, 30, 10, 20, 1, 0.01), 109);
  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, 26, 100, SolverConfig{}, w2s::LatentKind::gaussian};
  auto all = w2s::estimate_all_risks(pc, 200, 113);
  CHECK(all[w2s::Model::ceiling].excess_risk <= all[w2s::Model::w2s].excess_risk);
  CHECK(all[w2s::Model::w2s].excess_risk <= all[w2s::Model::weak].excess_risk);
}

TEST_CASE("label hygiene: the W2S fit never reads the unlabeled true labels") {
  auto model = w2s::build_synthetic(config(60, 30, 10, 20, 0, 1.0), 127);
  auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 26, 131);
  auto unlabeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 80, 137);
  auto teacher = w2s::fit_weak(labeled, SolverConfig{});
  Vector pseudo = w2s::pseudo_label(teacher, unlabeled);

  Dataset swapped = unlabeled;
  swapped.noisy_labels = Vector::Constant(80, 1e6);
  auto a = w2s::fit_w2s(unlabeled, pseudo, SolverConfig{});
  auto b = w2s::fit_w2s(swapped, pseudo, SolverConfig{});
  CHECK(a.theta == b.theta);
}

TEST_CASE("every fit is linear in its label vector") {
  auto model = w2s::build_synthetic(config(30, 15, 5, 10, 0, 1.0), 139);
  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, 14, 40, SolverConfig{}, w2s::LatentKind::gaussian};
  CHECK_NOTHROW(w2s::assert_label_linearity(pc, w2s::Rng(149)));

  auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 14, 151);
  Dataset y1 = labeled, y2 = labeled, ys = labeled;
  w2s::Rng rng(157);
  Vector a(14), b(14);
  rng.fill_gaussian(a);
  rng.fill_gaussian(b);
  y1.noisy_labels = a;
  y2.noisy_labels = b;
  ys.noisy_labels = a + b;
  Vector sum = w2s::fit_weak(y1, SolverConfig{}).theta + w2s::fit_weak(y2, SolverConfig{}).theta;
  Vector joint = w2s::fit_weak(ys, SolverConfig{}).theta;
  CHECK((joint - sum).norm() < 1e-8 * (1.0 + sum.norm()));
}

TEST_CASE("ridgeless fits interpolate whenever samples fit inside the rank") {
  for (std::uint64_t seed : {163u, 167u}) {
    auto model = w2s::build_synthetic(config(50, 25, 10, 16, 1, 1.0), seed);
    auto labeled = w2s::sample_dataset(model.task, model.cov_s, model.cov_w, 9, seed + 1);  // n <= d_s
    auto strong = w2s::fit_strong_sft(labeled, SolverConfig{});
    CHECK((labeled.strong_features * strong.theta - labeled.noisy_labels).norm() < 1e-8);
    auto weak = w2s::fit_weak(labeled, SolverConfig{});
    CHECK((labeled.weak_features * weak.theta - labeled.noisy_labels).norm() < 1e-8);
  }
}

TEST_CASE("run_pipeline rejects empty sample sizes") {
  auto model = weak_representable(0.1, 173);
  CHECK_THROWS_AS((void)w2s::run_pipeline(model.task, model.cov_s, model.cov_w, 0, 10, SolverConfig{}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)w2s::run_pipeline(model.task, model.cov_s, model.cov_w, 10, 0, SolverConfig{}, 1),
                  std::invalid_argument);
}
