#include "w2s/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace w2s::theory {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

double DimProfile::d_w2s() const {
  return d_overlap + (static_cast<double>(d_w) - d_overlap) * static_cast<double>(d_s) / static_cast<double>(N);
}

double DimProfile::varrho() const {
  require(sigma2 > 0.0, "DimProfile: varrho needs sigma2 > 0");
  return (o_constant * rho_w + rho_s) / sigma2;
}

void DimProfile::validate() const {
  if (d_s <= 0 || d_w <= 0) throw std::invalid_argument("DimProfile: dimensions must be positive");
  if (d_overlap < 0.0 || d_overlap > static_cast<double>(std::min(d_s, d_w)))
    throw std::invalid_argument("DimProfile: d_overlap must lie in [0, min(d_s, d_w)]");
  if (n < 1 || N < 1) throw std::invalid_argument("DimProfile: n and N must be at least 1");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("DimProfile: sigma2 must be nonnegative");
  if (rho_s < 0.0 || rho_w < 0.0) throw std::invalid_argument("DimProfile: approximation errors must be nonnegative");
}

double var_w2s(const DimProfile& p) {
  require(p.n > p.d_w + 1, "var_w2s: undefined for n <= d_w + 1");
  return p.sigma2 / static_cast<double>(p.n - p.d_w - 1) * p.d_w2s();
}

double var_weak(const DimProfile& p) {
  require(p.n > p.d_w + 1, "var_weak: undefined for n <= d_w + 1");
  return p.sigma2 * static_cast<double>(p.d_w) / static_cast<double>(p.n - p.d_w - 1);
}

double var_strong_sft(const DimProfile& p) {
  require(p.n > p.d_s + 1, "var_strong_sft: undefined for n <= d_s + 1");
  return p.sigma2 * static_cast<double>(p.d_s) / static_cast<double>(p.n - p.d_s - 1);
}

double var_ceiling(const DimProfile& p) {
  require(p.n + p.N > 0, "var_ceiling: empty sample");
  return p.sigma2 * static_cast<double>(p.d_s) / static_cast<double>(p.N + p.n);
}

BiasBounds bias_bounds(const DimProfile& p) {
  BiasBounds b;
  b.weak = p.o_constant * p.rho_w;
  b.w2s = b.weak + p.rho_s;
  b.strong_sft = p.rho_s;
  b.ceiling = p.rho_s;
  return b;
}

double pgr_lower(const DimProfile& p) {
  require(p.q() >= 1, "pgr_lower: needs n >= d_w + 2");
  const double dw = static_cast<double>(p.d_w);
  return 1.0 - p.d_overlap / dw -
         static_cast<double>(p.d_s) / static_cast<double>(p.N) * (dw - p.d_overlap) / dw -
         static_cast<double>(p.q()) / dw * p.varrho();
}

double opr_lower(const DimProfile& p) {
  require(p.q() >= 1, "opr_lower: needs n >= d_w + 2");
  const double n = static_cast<double>(p.n);
  const double ds = static_cast<double>(p.d_s);
  const double denom = n / static_cast<double>(p.q()) * p.d_w2s() / ds + n / ds * p.varrho();
  require(denom > 0.0, "opr_lower: nonpositive denominator");
  return 1.0 / denom;
}

double pgr_lower_tight(const DimProfile& p, double bias_w) {
  require(p.q() >= 1, "pgr_lower_tight: needs n >= d_w + 2");
  require(std::isfinite(bias_w) && bias_w >= 0.0, "pgr_lower_tight: bias_w must be a finite nonnegative real");
  const double vw = var_weak(p);
  const double denom = vw + bias_w;
  require(denom > 0.0, "pgr_lower_tight: nonpositive denominator");
  return (vw - var_w2s(p) - p.rho_s) / denom;
}

double opr_lower_tight(const DimProfile& p) {
  require(p.q() >= 1, "opr_lower_tight: needs n >= d_w + 2");
  require(p.n > p.d_s + 1, "opr_lower_tight: needs n >= d_s + 2");
  const double denom = var_w2s(p) + p.o_constant * p.rho_w + p.rho_s;
  require(denom > 0.0, "opr_lower_tight: nonpositive denominator");
  return var_strong_sft(p) / denom;
}

OptimalQ optimal_q(const DimProfile& p) {
  OptimalQ o;
  o.q_pgr = 0.0;
  o.pgr_at_opt = 1.0 - p.d_w2s() / static_cast<double>(p.d_w);
  const double vr = p.varrho();
  require(vr > 0.0, "optimal_q: q_opr unbounded when varrho = 0");
  const double dw1 = static_cast<double>(p.d_w) + 1.0;
  o.q_opr = std::sqrt(dw1 * p.d_w2s() / vr);
  const double root = std::sqrt(p.d_w2s()) + std::sqrt(vr * dw1);
  o.opr_at_opt = static_cast<double>(p.d_s) / (root * root);
  return o;
}

RidgeBound ridge_bound(const RidgeProfile& r) {
  require(r.alpha_w > 0.0 && r.alpha_w2s > 0.0, "ridge_bound: penalties must be positive");
  require(r.n >= 1 && r.N >= 1, "ridge_bound: n and N must be at least 1");
  const double n = static_cast<double>(r.n);
  const double big_n = static_cast<double>(r.N);
  RidgeBound b;
  b.var_ub = r.sigma2 / (4.0 * (r.alpha_w * n) * (r.alpha_w2s * big_n)) *
             ((1.0 + 1.0 / big_n) * r.tr_cross + r.tr_ss * r.tr_sw / big_n);
  b.bias_ub = r.alpha_w * r.varrho_w + r.alpha_w2s * r.varrho_s;
  b.er_ub = b.var_ub + b.bias_ub;
  return b;
}

OptimalRidge optimal_ridge_alphas(const RidgeProfile& r) {
  require(r.varrho_s > 0.0 && r.varrho_w > 0.0, "optimal_ridge_alphas: zero alignment norms");
  require(r.n >= 1 && r.N >= 1, "optimal_ridge_alphas: n and N must be at least 1");
  const double n = static_cast<double>(r.n);
  const double big_n = static_cast<double>(r.N);
  const double trace_term = (1.0 + 1.0 / big_n) * r.tr_cross + r.tr_ss * r.tr_sw / big_n;
  const double k = r.sigma2 / (4.0 * n * big_n) * trace_term;
  OptimalRidge o;
  o.alpha_w = std::cbrt(k * r.varrho_s / (r.varrho_w * r.varrho_w));
  o.alpha_w2s = std::cbrt(k * r.varrho_w / (r.varrho_s * r.varrho_s));
  o.er_opt = 3.0 * std::cbrt(k * r.varrho_s * r.varrho_w);
  return o;
}

TheoryReport make_report(const DimProfile& p) {
  TheoryReport t;
  t.var_weak = var_weak(p);
  t.var_w2s = var_w2s(p);
  t.var_strong_sft = var_strong_sft(p);
  t.var_ceiling = var_ceiling(p);
  t.bias = bias_bounds(p);
  t.pgr_lower = pgr_lower(p);
  t.opr_lower = opr_lower(p);
  t.pgr_lower_tight = pgr_lower_tight(p, t.bias.weak);
  t.opr_lower_tight = opr_lower_tight(p);
  return t;
}

}  // namespace w2s::theory
