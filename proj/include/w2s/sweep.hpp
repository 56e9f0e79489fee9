#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "w2s/feature_model.hpp"
#include "w2s/risk.hpp"

namespace w2s::sweep {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full sweep description: one synthetic geometry plus grids over
/// (overlap, sigma2, n, N). theory_constant_c is the heuristic constant
/// multiplying rho_w inside the bias-dependent bounds.
struct SweepConfig {
  SyntheticConfig base;
  std::vector<Index> n_grid;
  std::vector<Index> N_grid;
  std::vector<double> sigma2_grid;
  std::vector<Index> overlap_grid;
  long trials = 40;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool emit_svg = false;
  SolverConfig solver;
  double theory_constant_c = 1.0;
  int workers = 0;  // 0 = library default
  double tolerance = 0.1;
  Exec exec = Exec::openmp;

  void validate() const;
};

/// The shrunk default geometry: d=400, d_star=60, d_s=20, d_w=40,
/// overlaps {2, 10, 18}, sigma2=0.01.
SweepConfig desk_preset();

/// One grid point: swept parameters, Monte-Carlo estimates for the four
/// models, closed-form variance predictions, and the metric bounds.
/// Absent values (infeasible theory, degenerate ratios) are NaN and are
/// serialized as NA.
struct SweepRow {
  Index overlap = 0;
  double sigma2 = 0.0;
  Index n = 0;
  Index N = 0;
  long trials = 0;
  std::uint64_t seed = 0;

  std::array<RiskEstimate, 4> mc{};  // indexed by Model

  double theory_var_weak = 0.0;
  double theory_var_w2s = 0.0;
  double theory_var_strong_sft = 0.0;
  double theory_var_ceiling = 0.0;

  double rho_s = 0.0;
  double rho_w = 0.0;

  double pgr = 0.0;
  double opr = 0.0;
  double pgr_lower = 0.0;
  double opr_lower = 0.0;
  double pgr_lower_tight = 0.0;
  double opr_lower_tight = 0.0;
};

/// Runs every grid point, streaming rows to <out_dir>/sweep.csv as they
/// finish. Rerunning against an existing CSV reuses rows whose
/// (overlap, sigma2, n, N, trials, seed) key matches instead of recomputing.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> parse_csv(const std::string& path);

/// Per-row relative error of the Monte-Carlo variances against the
/// closed-form predictions. Rows without theory values or with sigma2 = 0
/// are excluded.
struct CompareReport {
  long cells_checked = 0;
  long cells_passed = 0;
  double fraction = 0.0;
  std::array<double, 4> fraction_by_model{};  // NaN where nothing was checked
  double worst_rel_error = 0.0;
  std::vector<std::string> flagged;  // human-readable failures

  bool pass(double min_fraction = 0.9) const { return cells_checked > 0 && fraction >= min_fraction; }
};
CompareReport compare_theory(const std::vector<SweepRow>& rows, double tolerance);

/// Line charts (MC solid, theory/bounds dashed, one series per overlap) for
/// excess risk, PGR, and OPR against n and against N.
void emit_svg(const std::vector<SweepRow>& rows, const std::string& dir);

/// Line-oriented `key = value` config with [synthetic] / [sweep] / [solver]
/// sections. Unknown keys are errors.
SweepConfig load_config(const std::string& path);

}  // namespace w2s::sweep
