#pragma once

namespace w2s::theory {

/// Dimension profile for the exact Gaussian-case formulas. d_overlap is a
/// real number because empirical estimates of the correlation dimension are
/// not integers; the formulas are evaluated as written. o_constant is the
/// otherwise-unspecified constant multiplying rho_w in the bias bounds
/// (heuristic, default 1).
struct DimProfile {
  int d_s = 0;
  int d_w = 0;
  double d_overlap = 0.0;
  long n = 0;
  long N = 0;
  double sigma2 = 0.0;
  double rho_s = 0.0;
  double rho_w = 0.0;
  double o_constant = 1.0;

  long q() const { return n - d_w - 1; }
  /// Effective variance dimension of the W2S model,
  /// d_overlap + (d_w - d_overlap) * d_s / N.
  double d_w2s() const;
  /// (o_constant * rho_w + rho_s) / sigma2.
  double varrho() const;
  void validate() const;
};

// Exact Gaussian-case variances. var_w2s and var_weak require n > d_w + 1;
// var_strong_sft requires n > d_s + 1.
double var_w2s(const DimProfile& p);
double var_weak(const DimProfile& p);
double var_strong_sft(const DimProfile& p);
double var_ceiling(const DimProfile& p);

/// Bias upper bounds with the rho_w constant set to o_constant (heuristic).
struct BiasBounds {
  double w2s = 0.0;
  double weak = 0.0;
  double strong_sft = 0.0;
  double ceiling = 0.0;
};
BiasBounds bias_bounds(const DimProfile& p);

// Simple lower bounds (fully relaxed forms). Require q >= 1.
double pgr_lower(const DimProfile& p);
double opr_lower(const DimProfile& p);

// Tighter ratio forms the simple bounds are relaxations of. pgr_lower_tight
// takes the weak-model bias (measured, or o_constant * rho_w as its bound)
// in the denominator.
double pgr_lower_tight(const DimProfile& p, double bias_w);
double opr_lower_tight(const DimProfile& p);

/// Optimizers of the lower bounds over q = n - d_w - 1. The PGR bound is
/// maximized at q = 0; the OPR bound at q = sqrt((d_w+1) d_w2s(N) / varrho),
/// which requires varrho > 0.
struct OptimalQ {
  double q_pgr = 0.0;
  double q_opr = 0.0;
  double pgr_at_opt = 0.0;
  double opr_at_opt = 0.0;
};
OptimalQ optimal_q(const DimProfile& p);

/// Inputs for the ridge-regression bound: covariance traces, the alignment
/// norms varrho_s = |Sigma_s^{-1/2} Sigma*^{1/2} theta*|^2 (same for w), and
/// the two ridge penalties.
struct RidgeProfile {
  double tr_ss = 0.0;     // tr Sigma_s
  double tr_sw = 0.0;     // tr Sigma_w
  double tr_cross = 0.0;  // tr Sigma_s Sigma_w
  double varrho_s = 0.0;
  double varrho_w = 0.0;
  long n = 0;
  long N = 0;
  double sigma2 = 0.0;
  double alpha_w = 0.0;
  double alpha_w2s = 0.0;
};

struct RidgeBound {
  double var_ub = 0.0;
  double bias_ub = 0.0;
  double er_ub = 0.0;
};
RidgeBound ridge_bound(const RidgeProfile& r);

/// The penalty pair that minimizes the ridge excess-risk bound, and the
/// resulting optimal bound value. r's alpha fields are ignored.
struct OptimalRidge {
  double alpha_w = 0.0;
  double alpha_w2s = 0.0;
  double er_opt = 0.0;
};
OptimalRidge optimal_ridge_alphas(const RidgeProfile& r);

/// Everything the closed forms say about one profile, bundled for reporting.
struct TheoryReport {
  double var_weak = 0.0;
  double var_w2s = 0.0;
  double var_strong_sft = 0.0;
  double var_ceiling = 0.0;
  BiasBounds bias;
  double pgr_lower = 0.0;
  double opr_lower = 0.0;
  double pgr_lower_tight = 0.0;  // evaluated with bias_w = o_constant * rho_w
  double opr_lower_tight = 0.0;
};
TheoryReport make_report(const DimProfile& p);

}  // namespace w2s::theory
