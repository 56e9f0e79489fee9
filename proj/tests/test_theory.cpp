#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "w2s/feature_model.hpp"
#include "w2s/linalg.hpp"
#include "w2s/risk.hpp"
#include "w2s/rng.hpp"
#include "w2s/theory.hpp"

using w2s::theory::DimProfile;
using w2s::theory::RidgeProfile;

namespace {

DimProfile profile(int d_s, int d_w, double overlap, long n, long N, double sigma2, double rho_s = 0.0,
                   double rho_w = 0.0) {
  DimProfile p;
  p.d_s = d_s;
  p.d_w = d_w;
  p.d_overlap = overlap;
  p.n = n;
  p.N = N;
  p.sigma2 = sigma2;
  p.rho_s = rho_s;
  p.rho_w = rho_w;
  return p;
}

DimProfile random_feasible(w2s::Rng& rng) {
  const int d_s = 2 + static_cast<int>(rng.uniform() * 38);
  const int d_w = 2 + static_cast<int>(rng.uniform() * 58);
  DimProfile p = profile(d_s, d_w, rng.uniform() * std::min(d_s, d_w),
                         std::max(d_s, d_w) + 2 + static_cast<long>(rng.uniform() * 200),
                         1 + static_cast<long>(rng.uniform() * 1000), 0.01 + rng.uniform() * 2.0);
  p.rho_s = rng.uniform() * 0.2 * p.sigma2;
  p.rho_w = rng.uniform() * 0.2 * p.sigma2;
  return p;
}

}  // namespace

TEST_CASE("w2s variance closed form") {
  CHECK(w2s::theory::var_w2s(profile(2, 4, 0, 6, 2, 1.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(w2s::theory::var_w2s(profile(100, 200, 10, 302, 1000, 0.01)) ==
        doctest::Approx(0.01 * 29.0 / 101.0).epsilon(1e-12));
}

TEST_CASE("saturated overlap collapses the w2s variance onto the teacher") {
  for (long N : {10L, 100L, 100000L}) {
    DimProfile p = profile(12, 8, 8, 24, N, 0.7);
    CHECK(w2s::theory::var_w2s(p) == doctest::Approx(w2s::theory::var_weak(p)).epsilon(1e-14));
  }
}

TEST_CASE("reference variances") {
  CHECK(w2s::theory::var_weak(profile(2, 4, 0, 6, 2, 1.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(w2s::theory::var_strong_sft(profile(2, 4, 0, 6, 2, 1.0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(w2s::theory::var_ceiling(profile(2, 4, 0, 6, 14, 1.0)) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("degenerate denominators are signaled") {
  CHECK_THROWS_AS((void)w2s::theory::var_w2s(profile(2, 4, 0, 5, 2, 1.0)), std::domain_error);
  CHECK_THROWS_AS((void)w2s::theory::var_weak(profile(2, 4, 0, 5, 2, 1.0)), std::domain_error);
  CHECK_THROWS_AS((void)w2s::theory::var_strong_sft(profile(4, 4, 0, 5, 2, 1.0)), std::domain_error);
}

TEST_CASE("bias bounds") {
  auto zero = w2s::theory::bias_bounds(profile(2, 4, 0, 6, 2, 1.0));
  CHECK(zero.w2s == 0.0);
  CHECK(zero.weak == 0.0);
  CHECK(zero.strong_sft == 0.0);
  CHECK(zero.ceiling == 0.0);

  auto b = w2s::theory::bias_bounds(profile(2, 4, 0, 6, 2, 1.0, 0.01, 0.1));
  CHECK(b.w2s == doctest::Approx(0.11).epsilon(1e-12));
  CHECK(b.weak == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(b.ceiling == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("simple lower bounds") {
  CHECK(w2s::theory::pgr_lower(profile(100, 200, 10, 302, 1000, 1.0)) == doctest::Approx(0.855).epsilon(1e-12));
  CHECK(w2s::theory::opr_lower(profile(100, 200, 10, 302, 1000, 1.0)) ==
        doctest::Approx(1.0 / (302.0 / 101.0 * 0.29)).epsilon(1e-12));
  // vanishing overlap and unlimited pseudo-labels drive the PGR bound to 1
  CHECK(w2s::theory::pgr_lower(profile(100, 200, 0, 302, 2000000000L, 1.0)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("tight bounds at zero approximation error") {
  DimProfile p = profile(100, 200, 0, 302, 2000000000L, 1.0);
  CHECK(w2s::theory::pgr_lower_tight(p, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  // saturated overlap with rho = 0: the variance gap vanishes as N grows
  DimProfile q = profile(100, 200, 200, 302, 2000000000L, 1.0);
  CHECK(w2s::theory::pgr_lower_tight(q, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("tight bounds dominate the simple bounds on random feasible profiles") {
  w2s::Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    DimProfile p = random_feasible(rng);
    const double bias_w = p.o_constant * p.rho_w;
    CHECK(w2s::theory::pgr_lower_tight(p, bias_w) >= w2s::theory::pgr_lower(p) - 1e-12);
    CHECK(w2s::theory::opr_lower_tight(p) >= w2s::theory::opr_lower(p) - 1e-12);
  }
}

TEST_CASE("optimal q for the metric bounds") {
  DimProfile p = profile(100, 200, 10, 302, 1000, 1.0, 0.01, 0.0);  // varrho = 0.01, d_w2s = 29
  auto o = w2s::theory::optimal_q(p);
  CHECK(o.q_pgr == 0.0);
  CHECK(o.q_opr == doctest::Approx(std::sqrt(201.0 * 29.0 / 0.01)).epsilon(1e-12));
  CHECK(o.q_opr == doctest::Approx(763.48).epsilon(1e-4));
  const double root = std::sqrt(29.0) + std::sqrt(0.01 * 201.0);
  CHECK(o.opr_at_opt == doctest::Approx(100.0 / (root * root)).epsilon(1e-12));
  CHECK(o.opr_at_opt == doctest::Approx(2.1608).epsilon(1e-4));

  // vanishing overlap, huge N, tiny varrho: the optimal PGR bound approaches 1
  DimProfile q = profile(100, 200, 0, 302, 2000000000L, 1.0, 1e-12, 0.0);
  CHECK(w2s::theory::optimal_q(q).pgr_at_opt == doctest::Approx(1.0).epsilon(1e-6));

  DimProfile z = profile(100, 200, 10, 302, 1000, 1.0);  // varrho = 0
  CHECK_THROWS_AS((void)w2s::theory::optimal_q(z), std::domain_error);
}

TEST_CASE("the opr bound is locally maximal at the optimal q") {
  DimProfile p = profile(100, 200, 10, 0, 1000, 1.0, 0.01, 0.0);
  const auto o = w2s::theory::optimal_q(p);
  auto at_q = [&](long q) {
    DimProfile r = p;
    r.n = r.d_w + q + 1;
    return w2s::theory::opr_lower(r);
  };
  const long lo = static_cast<long>(std::floor(o.q_opr));
  const long best = at_q(lo) >= at_q(lo + 1) ? lo : lo + 1;
  CHECK(at_q(best) >= at_q(best - 1));
  CHECK(at_q(best) >= at_q(best + 1));
  CHECK(at_q(best) <= o.opr_at_opt + 1e-12);
}

TEST_CASE("w2s variance is monotone in N and in the overlap") {
  w2s::Rng rng(103);
  for (int i = 0; i < 200; ++i) {
    DimProfile p = random_feasible(rng);
    DimProfile more_data = p;
    more_data.N = p.N * 2;
    CHECK(w2s::theory::var_w2s(more_data) <= w2s::theory::var_w2s(p) + 1e-15);
    if (p.N >= p.d_s && p.d_overlap + 1.0 <= std::min(p.d_s, p.d_w)) {
      DimProfile more_overlap = p;
      more_overlap.d_overlap = p.d_overlap + 1.0;
      CHECK(w2s::theory::var_w2s(more_overlap) >= w2s::theory::var_w2s(p) - 1e-15);
    }
  }
}

TEST_CASE("ridge bound arithmetic") {
  RidgeProfile r{10.0, 10.0, 1.0, 1.0, 1.0, 100, 100, 1.0, 1.0, 1.0};
  auto b = w2s::theory::ridge_bound(r);
  CHECK(b.var_ub == doctest::Approx((1.01 + 1.0) / 40000.0).epsilon(1e-12));
  CHECK(b.bias_ub == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(b.er_ub == doctest::Approx(b.var_ub + b.bias_ub).epsilon(1e-15));

  RidgeProfile noiseless = r;
  noiseless.sigma2 = 0.0;
  CHECK(w2s::theory::ridge_bound(noiseless).var_ub == 0.0);
}

TEST_CASE("optimal ridge penalties") {
  RidgeProfile r{10.0, 10.0, 1.0, 1.0, 1.0, 100, 100, 1.0, 0.0, 0.0};
  auto o = w2s::theory::optimal_ridge_alphas(r);
  CHECK(o.er_opt == doctest::Approx(3.0 * std::cbrt(2.01 / 40000.0)).epsilon(1e-12));
  CHECK(o.er_opt == doctest::Approx(0.1107).epsilon(1e-3));
  CHECK(o.alpha_w == doctest::Approx(o.alpha_w2s).epsilon(1e-12));  // symmetric varrho

  // the stated minimizer beats randomly perturbed penalty pairs
  RidgeProfile asym{3.0, 7.0, 0.4, 2.0, 0.5, 50, 200, 0.5, 0.0, 0.0};
  auto opt = w2s::theory::optimal_ridge_alphas(asym);
  RidgeProfile at_opt = asym;
  at_opt.alpha_w = opt.alpha_w;
  at_opt.alpha_w2s = opt.alpha_w2s;
  const double er_star = w2s::theory::ridge_bound(at_opt).er_ub;
  CHECK(er_star == doctest::Approx(opt.er_opt).epsilon(1e-10));
  w2s::Rng rng(107);
  for (int i = 0; i < 100; ++i) {
    RidgeProfile perturbed = at_opt;
    perturbed.alpha_w *= std::exp(2.0 * (rng.uniform() - 0.5));
    perturbed.alpha_w2s *= std::exp(2.0 * (rng.uniform() - 0.5));
    CHECK(w2s::theory::ridge_bound(perturbed).er_ub >= er_star - 1e-12);
  }
}

TEST_CASE("ridge bound upper-bounds the monte-carlo excess risk") {
  // full-rank fast-decay spectra; strong aligned with the truth, weak rotated
  const w2s::Index d = 30;
  w2s::Vector lambda(d);
  for (w2s::Index i = 0; i < d; ++i) lambda(i) = 1.0 / static_cast<double>((i + 1) * (i + 1));

  w2s::TaskSpec task;
  task.ambient_dim = d;
  task.ground_truth_eigenvalues = lambda;
  task.ground_truth_basis = w2s::Matrix::Identity(d, d);
  task.theta_star = w2s::gaussian_matrix(d, 1, 211).col(0);
  task.theta_star /= task.theta_star.norm();
  task.noise_variance = 1.0;

  w2s::CovarianceSpec cov_s{d, lambda, w2s::Matrix::Identity(d, d)};
  w2s::CovarianceSpec cov_w{d, lambda, w2s::random_orthonormal(d, d, 223)};

  RidgeProfile r;
  r.tr_ss = r.tr_sw = lambda.sum();
  w2s::Matrix sigma_s = cov_s.basis * lambda.asDiagonal() * cov_s.basis.transpose();
  w2s::Matrix sigma_w = cov_w.basis * lambda.asDiagonal() * cov_w.basis.transpose();
  r.tr_cross = (sigma_s * sigma_w).trace();
  w2s::Vector sqrt_star_theta = lambda.cwiseSqrt().asDiagonal() * task.theta_star;
  r.varrho_s = (lambda.cwiseSqrt().cwiseInverse().asDiagonal() * (cov_s.basis.transpose() * sqrt_star_theta))
                   .squaredNorm();
  r.varrho_w = (lambda.cwiseSqrt().cwiseInverse().asDiagonal() * (cov_w.basis.transpose() * sqrt_star_theta))
                   .squaredNorm();
  r.n = 40;
  r.N = 120;
  r.sigma2 = 1.0;
  r.alpha_w = 0.05;
  r.alpha_w2s = 0.1;

  w2s::SolverConfig solver;
  solver.ridge_alpha = r.alpha_w;  // same penalty both stages here
  r.alpha_w2s = r.alpha_w;
  w2s::PipelineConfig pc{task, cov_s, cov_w, r.n, r.N, solver, w2s::LatentKind::gaussian};
  auto est = w2s::estimate_risk(pc, w2s::Model::w2s, 400, 227);

  const auto bound = w2s::theory::ridge_bound(r);
  CHECK(est.excess_risk <= bound.er_ub + 3.0 * est.se_excess_risk);
}
