// Command-line front end: parameter sweeps, closed-form calculators, the
// dimension toolkit, and single-config risk decompositions.

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "w2s/dimension.hpp"
#include "w2s/risk.hpp"
#include "w2s/sweep.hpp"
#include "w2s/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitCheckFailed = 2;

void print_risk_line(const char* name, const w2s::RiskEstimate& e) {
  std::printf("  %-11s er=%-12.6g var=%-12.6g bias=%-12.6g (se %.2g / %.2g / %.2g)\n", name, e.excess_risk,
              e.variance, e.bias, e.se_excess_risk, e.se_variance, e.se_bias);
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_dir, long trials, int workers,
                  std::uint64_t seed, bool svg, double tolerance, bool have_trials, bool have_seed,
                  bool have_tol) {
  w2s::sweep::SweepConfig cfg = config_path.empty() ? w2s::sweep::desk_preset() : w2s::sweep::load_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (have_trials) cfg.trials = trials;
  if (workers > 0) cfg.workers = workers;
  if (have_seed) cfg.seed = seed;
  if (svg) cfg.emit_svg = true;
  if (have_tol) cfg.tolerance = tolerance;

  auto rows = w2s::sweep::run_sweep(cfg);
  std::printf("wrote %zu rows to %s/sweep.csv\n", rows.size(), cfg.out_dir.c_str());
  auto rep = w2s::sweep::compare_theory(rows, cfg.tolerance);
  if (rep.cells_checked > 0)
    std::printf("theory agreement: %ld/%ld variance cells within %.3g relative error (worst %.3g)\n",
                rep.cells_passed, rep.cells_checked, cfg.tolerance, rep.worst_rel_error);
  return kExitOk;
}

int theory_cmd(const w2s::theory::DimProfile& p) {
  p.validate();
  const auto t = w2s::theory::make_report(p);
  std::printf("closed-form variances (exact, Gaussian features):\n");
  std::printf("  var_weak       = %.10g\n", t.var_weak);
  std::printf("  var_w2s        = %.10g\n", t.var_w2s);
  std::printf("  var_strong_sft = %.10g\n", t.var_strong_sft);
  std::printf("  var_ceiling    = %.10g\n", t.var_ceiling);
  std::printf("bias upper bounds (rho_w constant c=%g, heuristic):\n", p.o_constant);
  std::printf("  bias_w2s <= %.10g   bias_weak <= %.10g   bias_strong <= %.10g   bias_ceiling <= %.10g\n",
              t.bias.w2s, t.bias.weak, t.bias.strong_sft, t.bias.ceiling);
  std::printf("metric lower bounds:\n");
  std::printf("  pgr_lower = %.10g   pgr_lower_tight = %.10g\n", t.pgr_lower, t.pgr_lower_tight);
  std::printf("  opr_lower = %.10g   opr_lower_tight = %.10g\n", t.opr_lower, t.opr_lower_tight);
  if (p.sigma2 > 0.0 && p.varrho() > 0.0) {
    const auto o = w2s::theory::optimal_q(p);
    std::printf("bound optima over q = n - d_w - 1:\n");
    std::printf("  pgr: q=0 with pgr >= %.10g\n", o.pgr_at_opt);
    std::printf("  opr: q=%.6g with opr >= %.10g\n", o.q_opr, o.opr_at_opt);
  }
  return kExitOk;
}

int ridge_bound_cmd(w2s::theory::RidgeProfile r, bool have_alphas) {
  if (!have_alphas) {
    const auto o = w2s::theory::optimal_ridge_alphas(r);
    r.alpha_w = o.alpha_w;
    r.alpha_w2s = o.alpha_w2s;
    std::printf("optimal penalties: alpha_w = %.10g, alpha_w2s = %.10g, er_opt = %.10g\n", o.alpha_w, o.alpha_w2s,
                o.er_opt);
  }
  const auto b = w2s::theory::ridge_bound(r);
  std::printf("at alpha_w = %.10g, alpha_w2s = %.10g:\n", r.alpha_w, r.alpha_w2s);
  std::printf("  var_ub  = %.10g\n  bias_ub = %.10g\n  er_ub   = %.10g\n", b.var_ub, b.bias_ub, b.er_ub);
  return kExitOk;
}

int dims_cmd(const std::string& strong_path, const std::string& weak_path, double tau, double fraction,
             long rank_s, long rank_w, std::uint64_t seed, bool center) {
  const w2s::Matrix phi_s = w2s::dims::load_feature_dump(strong_path);
  const w2s::Matrix phi_w = w2s::dims::load_feature_dump(weak_path);

  const auto sum_s = w2s::dims::empirical_covariance(phi_s, center);
  const auto sum_w = w2s::dims::empirical_covariance(phi_w, center);
  const auto d_s = rank_s > 0 ? rank_s : w2s::dims::intrinsic_dimension(sum_s, tau);
  const auto d_w = rank_w > 0 ? rank_w : w2s::dims::intrinsic_dimension(sum_w, tau);

  const w2s::Matrix vs = sum_s.basis.leftCols(d_s);
  const w2s::Matrix vw = sum_w.basis.leftCols(d_w);
  const double overlap = phi_s.cols() == phi_w.cols() ? w2s::dims::correlation_dimension(vs, vw)
                                                      : w2s::dims::correlation_dimension_mismatched(vs, vw, seed);

  w2s::dims::SketchConfig sk;
  sk.common_dim_fraction = fraction;
  sk.target_rank_s = d_s;
  sk.target_rank_w = d_w;
  sk.seed = seed;
  double sketched = std::numeric_limits<double>::quiet_NaN();
  try {
    sketched = w2s::dims::sketched_correlation_dimension(phi_s, phi_w, sk);
  } catch (const std::exception&) {
    // infeasible sketch sizes for these dumps; reported as NA
  }

  std::string angles;
  if (phi_s.cols() == phi_w.cols()) {
    const w2s::Vector cos = w2s::dims::canonical_cosines(vs, vw);
    char buf[32];
    for (w2s::Index i = 0; i < cos.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.6g", cos(i));
      angles += (i ? ";" : "") + std::string(buf);
    }
  }

  std::printf("ambient_s,ambient_w,intrinsic_s,intrinsic_w,tau,corr_dim,corr_dim_sketched,canonical_cosines\n");
  std::printf("%lld,%lld,%lld,%lld,%g,%.10g,", static_cast<long long>(phi_s.cols()),
              static_cast<long long>(phi_w.cols()), static_cast<long long>(d_s), static_cast<long long>(d_w), tau,
              overlap);
  if (std::isnan(sketched))
    std::printf("NA,");
  else
    std::printf("%.10g,", sketched);
  std::printf("%s\n", angles.c_str());
  return kExitOk;
}

int decompose_cmd(const std::string& config_path, long n, long big_n, double sigma2, long overlap, long trials,
                  std::uint64_t seed, int workers) {
  w2s::sweep::SweepConfig cfg = config_path.empty() ? w2s::sweep::desk_preset() : w2s::sweep::load_config(config_path);
  if (overlap >= 0) cfg.base.d_overlap = overlap;
  if (sigma2 >= 0.0) cfg.base.sigma2 = sigma2;
  cfg.base.validate();
#ifdef _OPENMP
  if (workers > 0) cfg.workers = workers;
#endif
  (void)workers;

  const auto model = w2s::build_synthetic(cfg.base, seed);
  const double rho_s = w2s::ft_approx_error(model.task, model.cov_s, 0, w2s::derive_seed(seed, 1));
  const double rho_w = w2s::ft_approx_error(model.task, model.cov_w, 0, w2s::derive_seed(seed, 2));

  w2s::PipelineConfig pc{model.task, model.cov_s, model.cov_w, n, big_n, cfg.solver, cfg.base.latent};
  const auto mc = w2s::estimate_all_risks(pc, trials, w2s::derive_seed(seed, 3));

  std::printf("config: d=%lld d_star=%lld d_s=%lld d_w=%lld overlap=%lld sigma2=%g n=%ld N=%ld trials=%ld\n",
              static_cast<long long>(cfg.base.d), static_cast<long long>(cfg.base.d_star),
              static_cast<long long>(cfg.base.d_s), static_cast<long long>(cfg.base.d_w),
              static_cast<long long>(cfg.base.d_overlap), cfg.base.sigma2, n, big_n, trials);
  std::printf("task: signal variance %.6g; probe estimates rho_s=%.4g rho_w=%.4g\n", model.task.signal_variance(),
              rho_s, rho_w);
  std::printf("monte carlo (per-model, %ld trials):\n", trials);
  for (auto m : w2s::kAllModels) print_risk_line(w2s::model_name(m), mc[m]);

  w2s::theory::DimProfile p;
  p.d_s = static_cast<int>(cfg.base.d_s);
  p.d_w = static_cast<int>(cfg.base.d_w);
  p.d_overlap = static_cast<double>(cfg.base.d_overlap);
  p.n = n;
  p.N = big_n;
  p.sigma2 = cfg.base.sigma2;
  p.rho_s = rho_s;
  p.rho_w = rho_w;
  p.o_constant = cfg.theory_constant_c;
  try {
    const auto t = w2s::theory::make_report(p);
    std::printf("theory variances: weak=%.6g w2s=%.6g strong=%.6g ceiling=%.6g\n", t.var_weak, t.var_w2s,
                t.var_strong_sft, t.var_ceiling);
    std::printf("metric bounds: pgr >= %.4g (tight %.4g), opr >= %.4g (tight %.4g)\n", t.pgr_lower,
                t.pgr_lower_tight, t.opr_lower, t.opr_lower_tight);
  } catch (const std::exception& e) {
    std::printf("theory columns unavailable: %s\n", e.what());
  }
  try {
    const auto m = w2s::metrics_from(mc);
    std::printf("monte-carlo metrics: pgr=%.6g opr=%.6g\n", m.pgr, m.opr);
  } catch (const std::exception& e) {
    std::printf("monte-carlo metrics degenerate: %s\n", e.what());
  }
  return kExitOk;
}

int compare_theory_cmd(const std::string& csv_path, double tolerance, double min_fraction, bool check) {
  const auto rows = w2s::sweep::parse_csv(csv_path);
  const auto rep = w2s::sweep::compare_theory(rows, tolerance);
  std::printf("checked %ld variance cells: %ld within %.4g relative error (fraction %.4g, worst %.4g)\n",
              rep.cells_checked, rep.cells_passed, tolerance, rep.fraction, rep.worst_rel_error);
  const char* names[4] = {"weak", "w2s", "strong_sft", "ceiling"};
  for (int m = 0; m < 4; ++m)
    if (!std::isnan(rep.fraction_by_model[m]))
      std::printf("  %-11s fraction %.4g\n", names[m], rep.fraction_by_model[m]);
  for (const auto& f : rep.flagged) std::printf("  flagged: %s\n", f.c_str());
  if (check && !rep.pass(min_fraction)) {
    std::printf("FAIL: fraction %.4g below required %.4g\n", rep.fraction, min_fraction);
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak-to-strong regression laboratory"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the full pipeline over a parameter grid, streaming CSV");
  std::string config_path, out_dir;
  long trials = 40;
  int workers = 0;
  std::uint64_t seed = 0;
  bool svg = false;
  double tolerance = 0.1;
  sweep->add_option("--config", config_path, "config file (key = value with [sections])");
  sweep->add_option("--out", out_dir, "output directory");
  auto* trials_opt = sweep->add_option("--trials", trials, "Monte-Carlo trials per grid point");
  sweep->add_option("--workers", workers, "worker thread count");
  auto* seed_opt = sweep->add_option("--seed", seed, "master seed");
  sweep->add_flag("--svg", svg, "emit SVG charts next to the CSV");
  auto* tol_opt = sweep->add_option("--tolerance", tolerance, "relative tolerance for the theory comparison");

  // theory
  auto* theory = app.add_subcommand("theory", "closed-form variances and PGR/OPR bounds");
  w2s::theory::DimProfile prof;
  theory->add_option("--d-s", prof.d_s, "strong intrinsic dimension")->required();
  theory->add_option("--d-w", prof.d_w, "weak intrinsic dimension")->required();
  theory->add_option("--overlap", prof.d_overlap, "correlation dimension")->required();
  theory->add_option("--n", prof.n, "labeled sample size")->required();
  theory->add_option("--N", prof.N, "pseudo-labeled sample size")->required();
  theory->add_option("--sigma2", prof.sigma2, "label noise variance")->required();
  theory->add_option("--rho-s", prof.rho_s, "strong approximation error");
  theory->add_option("--rho-w", prof.rho_w, "weak approximation error");
  theory->add_option("--constant", prof.o_constant, "heuristic constant on rho_w");

  // ridge-bound
  auto* ridge = app.add_subcommand("ridge-bound", "ridge-regression bound calculator");
  w2s::theory::RidgeProfile rp;
  ridge->add_option("--tr-ss", rp.tr_ss, "tr Sigma_s")->required();
  ridge->add_option("--tr-sw", rp.tr_sw, "tr Sigma_w")->required();
  ridge->add_option("--tr-cross", rp.tr_cross, "tr Sigma_s Sigma_w")->required();
  ridge->add_option("--varrho-s", rp.varrho_s, "strong alignment norm")->required();
  ridge->add_option("--varrho-w", rp.varrho_w, "weak alignment norm")->required();
  ridge->add_option("--n", rp.n, "labeled sample size")->required();
  ridge->add_option("--N", rp.N, "pseudo-labeled sample size")->required();
  ridge->add_option("--sigma2", rp.sigma2, "label noise variance")->required();
  auto* aw = ridge->add_option("--alpha-w", rp.alpha_w, "weak-fit penalty (omit for optimal)");
  auto* aws = ridge->add_option("--alpha-w2s", rp.alpha_w2s, "student-fit penalty (omit for optimal)");

  // dims
  auto* dims = app.add_subcommand("dims", "intrinsic/correlation dimension of feature dumps");
  std::string strong_path, weak_path;
  double tau = 0.01, fraction = 0.01;
  long rank_s = 0, rank_w = 0;
  std::uint64_t dims_seed = 0;
  bool center = false;
  dims->add_option("--strong", strong_path, "strong feature dump (binary or text)")->required();
  dims->add_option("--weak", weak_path, "weak feature dump (binary or text)")->required();
  dims->add_option("--tau", tau, "trace threshold for the intrinsic dimension");
  dims->add_option("--fraction", fraction, "common-dimension fraction for sketching");
  dims->add_option("--rank-s", rank_s, "override the strong target rank");
  dims->add_option("--rank-w", rank_w, "override the weak target rank");
  dims->add_option("--seed", dims_seed, "seed for the matcher / sketches");
  dims->add_flag("--center", center, "subtract column means before the covariance");

  // decompose
  auto* dec = app.add_subcommand("decompose", "single-config Monte-Carlo risk decomposition vs theory");
  std::string dec_config;
  long dec_n = 46, dec_N = 400, dec_overlap = -1, dec_trials = 40;
  double dec_sigma2 = -1.0;
  std::uint64_t dec_seed = 0;
  int dec_workers = 0;
  dec->add_option("--config", dec_config, "config file for the geometry");
  dec->add_option("--n", dec_n, "labeled sample size");
  dec->add_option("--N", dec_N, "pseudo-labeled sample size");
  dec->add_option("--sigma2", dec_sigma2, "label noise variance override");
  dec->add_option("--overlap", dec_overlap, "correlation dimension override");
  dec->add_option("--trials", dec_trials, "Monte-Carlo trials");
  dec->add_option("--seed", dec_seed, "seed");
  dec->add_option("--workers", dec_workers, "worker thread count");

  // compare-theory
  auto* cmp = app.add_subcommand("compare-theory", "check a sweep CSV against the closed forms");
  std::string cmp_csv;
  double cmp_tol = 0.1, cmp_min_fraction = 0.9;
  bool cmp_check = false;
  cmp->add_option("--csv", cmp_csv, "sweep CSV to check")->required();
  cmp->add_option("--tolerance", cmp_tol, "relative tolerance per variance cell");
  cmp->add_option("--min-fraction", cmp_min_fraction, "required passing fraction with --check");
  cmp->add_flag("--check", cmp_check, "exit 2 when the passing fraction is too low");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (sweep->parsed())
      return run_sweep_cmd(config_path, out_dir, trials, workers, seed, svg, tolerance, trials_opt->count() > 0,
                           seed_opt->count() > 0, tol_opt->count() > 0);
    if (theory->parsed()) return theory_cmd(prof);
    if (ridge->parsed()) {
      const bool have_alphas = aw->count() > 0 && aws->count() > 0;
      if ((aw->count() > 0) != (aws->count() > 0))
        throw w2s::sweep::ConfigError("ridge-bound: pass both --alpha-w and --alpha-w2s, or neither");
      return ridge_bound_cmd(rp, have_alphas);
    }
    if (dims->parsed()) return dims_cmd(strong_path, weak_path, tau, fraction, rank_s, rank_w, dims_seed, center);
    if (dec->parsed())
      return decompose_cmd(dec_config, dec_n, dec_N, dec_sigma2, dec_overlap, dec_trials, dec_seed, dec_workers);
    if (cmp->parsed()) return compare_theory_cmd(cmp_csv, cmp_tol, cmp_min_fraction, cmp_check);
  } catch (const w2s::sweep::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitOk;
}
