#include "w2s/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "w2s/theory.hpp"

namespace w2s::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kCsvHeader =
    "overlap,sigma2,n,N,trials,seed,"
    "er_weak,var_weak,bias_weak,se_er_weak,se_var_weak,se_bias_weak,"
    "er_w2s,var_w2s,bias_w2s,se_er_w2s,se_var_w2s,se_bias_w2s,"
    "er_strong_sft,var_strong_sft,bias_strong_sft,se_er_strong_sft,se_var_strong_sft,se_bias_strong_sft,"
    "er_ceiling,var_ceiling,bias_ceiling,se_er_ceiling,se_var_ceiling,se_bias_ceiling,"
    "theory_var_weak,theory_var_w2s,theory_var_strong_sft,theory_var_ceiling,"
    "rho_s,rho_w,pgr,opr,pgr_lower,opr_lower,pgr_lower_tight,opr_lower_tight";

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_value(const std::string& tok, const std::string& path) {
  if (tok == "NA") return kNaN;
  std::size_t used = 0;
  double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::runtime_error("parse_csv: bad numeric field '" + tok + "' in " + path);
  return v;
}

std::string format_row(const SweepRow& r) {
  std::ostringstream os;
  os << r.overlap << ',' << fmt(r.sigma2) << ',' << r.n << ',' << r.N << ',' << r.trials << ',' << r.seed;
  for (const RiskEstimate& e : r.mc)
    os << ',' << fmt(e.excess_risk) << ',' << fmt(e.variance) << ',' << fmt(e.bias) << ','
       << fmt(e.se_excess_risk) << ',' << fmt(e.se_variance) << ',' << fmt(e.se_bias);
  os << ',' << fmt(r.theory_var_weak) << ',' << fmt(r.theory_var_w2s) << ',' << fmt(r.theory_var_strong_sft)
     << ',' << fmt(r.theory_var_ceiling);
  os << ',' << fmt(r.rho_s) << ',' << fmt(r.rho_w) << ',' << fmt(r.pgr) << ',' << fmt(r.opr) << ','
     << fmt(r.pgr_lower) << ',' << fmt(r.opr_lower) << ',' << fmt(r.pgr_lower_tight) << ','
     << fmt(r.opr_lower_tight);
  return os.str();
}

using RowKey = std::tuple<Index, double, Index, Index, long, std::uint64_t>;
RowKey key_of(const SweepRow& r) { return {r.overlap, r.sigma2, r.n, r.N, r.trials, r.seed}; }

}  // namespace

void SweepConfig::validate() const {
  base.validate();
  solver.validate();
  if (n_grid.empty() || N_grid.empty() || sigma2_grid.empty() || overlap_grid.empty())
    throw ConfigError("SweepConfig: all grids must be nonempty");
  if (trials < 2) throw ConfigError("SweepConfig: trials must be at least 2");
  if (!(tolerance > 0.0)) throw ConfigError("SweepConfig: tolerance must be positive");
  if (!(theory_constant_c >= 0.0)) throw ConfigError("SweepConfig: theory constant must be nonnegative");
  for (Index n : n_grid)
    if (n < 1) throw ConfigError("SweepConfig: n grid entries must be at least 1");
  for (Index big_n : N_grid)
    if (big_n < 1) throw ConfigError("SweepConfig: N grid entries must be at least 1");
  for (double s2 : sigma2_grid)
    if (!(s2 >= 0.0)) throw ConfigError("SweepConfig: sigma2 grid entries must be nonnegative");
  for (Index o : overlap_grid) {
    SyntheticConfig probe = base;
    probe.d_overlap = o;
    probe.validate();  // throws on infeasible overlap geometry
  }
}

SweepConfig desk_preset() {
  SweepConfig cfg;
  cfg.base.d = 400;
  cfg.base.d_star = 60;
  cfg.base.d_s = 20;
  cfg.base.d_w = 40;
  cfg.base.d_overlap = 2;
  cfg.base.sigma2 = 0.01;
  cfg.overlap_grid = {2, 10, 18};
  cfg.sigma2_grid = {0.01};
  cfg.n_grid = {46, 60, 90, 140, 220, 340, 520};
  cfg.N_grid = {100, 200, 400, 800};
  cfg.trials = 40;
  cfg.out_dir = "out";
  return cfg;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << kCsvHeader << '\n';
  for (const SweepRow& r : rows) out << format_row(r) << '\n';
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<SweepRow> parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("parse_csv: empty file " + path);
  if (line != kCsvHeader) throw std::runtime_error("parse_csv: unexpected header in " + path);

  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> toks;
    std::string tok;
    std::istringstream ls(line);
    while (std::getline(ls, tok, ',')) toks.push_back(tok);
    if (toks.size() != 42) continue;  // tolerate a truncated trailing row from an interrupted run

    SweepRow r;
    std::size_t i = 0;
    r.overlap = static_cast<Index>(std::stoll(toks[i++]));
    r.sigma2 = parse_value(toks[i++], path);
    r.n = static_cast<Index>(std::stoll(toks[i++]));
    r.N = static_cast<Index>(std::stoll(toks[i++]));
    r.trials = std::stol(toks[i++]);
    r.seed = std::stoull(toks[i++]);
    for (RiskEstimate& e : r.mc) {
      e.excess_risk = parse_value(toks[i++], path);
      e.variance = parse_value(toks[i++], path);
      e.bias = parse_value(toks[i++], path);
      e.se_excess_risk = parse_value(toks[i++], path);
      e.se_variance = parse_value(toks[i++], path);
      e.se_bias = parse_value(toks[i++], path);
      e.trials = r.trials;
    }
    r.theory_var_weak = parse_value(toks[i++], path);
    r.theory_var_w2s = parse_value(toks[i++], path);
    r.theory_var_strong_sft = parse_value(toks[i++], path);
    r.theory_var_ceiling = parse_value(toks[i++], path);
    r.rho_s = parse_value(toks[i++], path);
    r.rho_w = parse_value(toks[i++], path);
    r.pgr = parse_value(toks[i++], path);
    r.opr = parse_value(toks[i++], path);
    r.pgr_lower = parse_value(toks[i++], path);
    r.opr_lower = parse_value(toks[i++], path);
    r.pgr_lower_tight = parse_value(toks[i++], path);
    r.opr_lower_tight = parse_value(toks[i++], path);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
#ifdef _OPENMP
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
#endif
  std::filesystem::create_directories(cfg.out_dir);
  const std::string csv_path = cfg.out_dir + "/sweep.csv";

  std::map<RowKey, SweepRow> existing;
  if (std::filesystem::exists(csv_path)) {
    try {
      for (SweepRow& r : parse_csv(csv_path)) existing.emplace(key_of(r), std::move(r));
    } catch (const std::exception&) {
      // unreadable partial output; recompute everything
    }
  }

  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw std::runtime_error("run_sweep: cannot open " + csv_path);
  out << kCsvHeader << '\n';

  std::vector<SweepRow> rows;
  std::uint64_t row_index = 0;
  double rho_s = kNaN;

  for (std::size_t oi = 0; oi < cfg.overlap_grid.size(); ++oi) {
    SyntheticConfig geom = cfg.base;
    geom.d_overlap = cfg.overlap_grid[oi];
    SyntheticModel model = build_synthetic(geom, cfg.seed);

    // cov_s and the task do not depend on the overlap; probe rho_s once.
    if (std::isnan(rho_s)) rho_s = ft_approx_error(model.task, model.cov_s, 0, derive_seed(cfg.seed, 1));
    const double rho_w = ft_approx_error(model.task, model.cov_w, 0, derive_seed(cfg.seed, 2 + oi));

    for (double sigma2 : cfg.sigma2_grid) {
      for (Index n : cfg.n_grid) {
        for (Index big_n : cfg.N_grid) {
          SweepRow row;
          row.overlap = geom.d_overlap;
          row.sigma2 = sigma2;
          row.n = n;
          row.N = big_n;
          row.trials = cfg.trials;
          row.seed = cfg.seed;

          const auto it = existing.find(key_of(row));
          if (it != existing.end()) {
            row = it->second;
          } else {
            PipelineConfig pc{model.task, model.cov_s, model.cov_w, n, big_n, cfg.solver, cfg.base.latent};
            pc.task.noise_variance = sigma2;
            RiskSummary mc = estimate_all_risks(pc, cfg.trials, derive_seed(cfg.seed, 4096 + row_index), cfg.exec);
            row.mc = mc.per_model;
            row.rho_s = rho_s;
            row.rho_w = rho_w;

            theory::DimProfile p;
            p.d_s = static_cast<int>(geom.d_s);
            p.d_w = static_cast<int>(geom.d_w);
            p.d_overlap = static_cast<double>(geom.d_overlap);
            p.n = n;
            p.N = big_n;
            p.sigma2 = sigma2;
            p.rho_s = rho_s;
            p.rho_w = rho_w;
            p.o_constant = cfg.theory_constant_c;

            auto guarded = [](auto&& f) {
              try {
                return f();
              } catch (const std::exception&) {
                return kNaN;
              }
            };
            row.theory_var_weak = guarded([&] { return theory::var_weak(p); });
            row.theory_var_w2s = guarded([&] { return theory::var_w2s(p); });
            row.theory_var_strong_sft = guarded([&] { return theory::var_strong_sft(p); });
            row.theory_var_ceiling = guarded([&] { return theory::var_ceiling(p); });
            row.pgr = guarded([&] { return metrics_from(mc).pgr; });
            row.opr = guarded([&] { return metrics_from(mc).opr; });
            row.pgr_lower = guarded([&] { return theory::pgr_lower(p); });
            row.opr_lower = guarded([&] { return theory::opr_lower(p); });
            row.pgr_lower_tight = guarded([&] { return theory::pgr_lower_tight(p, p.o_constant * p.rho_w); });
            row.opr_lower_tight = guarded([&] { return theory::opr_lower_tight(p); });
          }

          out << format_row(row) << '\n';
          out.flush();
          rows.push_back(std::move(row));
          ++row_index;
        }
      }
    }
  }
  if (!out) throw std::runtime_error("run_sweep: write failed for " + csv_path);

  if (cfg.emit_svg) emit_svg(rows, cfg.out_dir);
  return rows;
}

CompareReport compare_theory(const std::vector<SweepRow>& rows, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("compare_theory: tolerance must be positive");
  CompareReport rep;
  rep.fraction_by_model.fill(kNaN);
  std::array<long, 4> checked{};
  std::array<long, 4> passed{};

  for (const SweepRow& r : rows) {
    if (!(r.sigma2 > 0.0)) continue;  // 0/0, excluded
    const std::array<double, 4> theory_var{r.theory_var_weak, r.theory_var_w2s, r.theory_var_strong_sft,
                                           r.theory_var_ceiling};
    for (std::size_t m = 0; m < 4; ++m) {
      if (std::isnan(theory_var[m]) || !(theory_var[m] > 0.0)) continue;
      const double rel = std::abs(r.mc[m].variance - theory_var[m]) / theory_var[m];
      ++checked[m];
      ++rep.cells_checked;
      rep.worst_rel_error = std::max(rep.worst_rel_error, rel);
      if (rel <= tolerance) {
        ++passed[m];
        ++rep.cells_passed;
      } else {
        std::ostringstream os;
        os << "overlap=" << r.overlap << " sigma2=" << r.sigma2 << " n=" << r.n << " N=" << r.N << " "
           << model_name(static_cast<Model>(m)) << " rel_error=" << rel;
        rep.flagged.push_back(os.str());
      }
    }
  }
  for (std::size_t m = 0; m < 4; ++m)
    if (checked[m] > 0) rep.fraction_by_model[m] = static_cast<double>(passed[m]) / static_cast<double>(checked[m]);
  rep.fraction = rep.cells_checked > 0 ? static_cast<double>(rep.cells_passed) / static_cast<double>(rep.cells_checked)
                                       : kNaN;
  return rep;
}

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;
  bool dashed = false;
  int color = 0;
};

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void write_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                 const std::string& ylabel, std::vector<Series> series, bool log_y) {
  for (auto& s : series) {
    std::erase_if(s.pts, [&](const auto& p) {
      return !std::isfinite(p.first) || !std::isfinite(p.second) || (log_y && p.second <= 0.0);
    });
    std::sort(s.pts.begin(), s.pts.end());
  }
  std::erase_if(series, [](const Series& s) { return s.pts.size() < 2; });
  if (series.empty()) return;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      const double yv = log_y ? std::log10(y) : y;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) {
    const double yv = log_y ? std::log10(y) : y;
    return h - mb - (yv - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_svg: cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "' viewBox='0 0 " << w
      << " " << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb << "' stroke='black'/>\n";
  out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12 << "' text-anchor='middle' font-size='12'>" << xlabel
      << "</text>\n";
  out << "<text x='16' y='" << (mt + h - mb) / 2 << "' font-size='12' transform='rotate(-90 16 "
      << (mt + h - mb) / 2 << ")' text-anchor='middle'>" << ylabel << (log_y ? " (log scale)" : "")
      << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    char xbuf[32], ybuf[32];
    std::snprintf(xbuf, sizeof(xbuf), "%.4g", fx);
    std::snprintf(ybuf, sizeof(ybuf), "%.4g", log_y ? std::pow(10.0, fy) : fy);
    out << "<text x='" << px(fx) << "' y='" << h - mb + 16 << "' text-anchor='middle' font-size='10'>" << xbuf
        << "</text>\n";
    out << "<text x='" << ml - 6 << "' y='" << h - mb - (h - mt - mb) * t / 4.0 + 4
        << "' text-anchor='end' font-size='10'>" << ybuf << "</text>\n";
  }
  double ly = mt + 6;
  for (const auto& s : series) {
    out << "<polyline fill='none' stroke='" << kPalette[s.color % 6] << "'"
        << (s.dashed ? " stroke-dasharray='6,4'" : "") << " stroke-width='1.6' points='";
    for (auto [x, y] : s.pts) out << px(x) << ',' << py(y) << ' ';
    out << "'/>\n";
    out << "<line x1='" << w - mr - 150 << "' y1='" << ly << "' x2='" << w - mr - 120 << "' y2='" << ly
        << "' stroke='" << kPalette[s.color % 6] << "'" << (s.dashed ? " stroke-dasharray='6,4'" : "")
        << " stroke-width='1.6'/>\n";
    out << "<text x='" << w - mr - 114 << "' y='" << ly + 4 << "' font-size='11'>" << s.label << "</text>\n";
    ly += 15;
  }
  out << "</svg>\n";
}

}  // namespace

void emit_svg(const std::vector<SweepRow>& rows, const std::string& dir) {
  if (rows.empty()) return;
  std::filesystem::create_directories(dir);

  std::vector<Index> overlaps;
  for (const auto& r : rows)
    if (std::find(overlaps.begin(), overlaps.end(), r.overlap) == overlaps.end()) overlaps.push_back(r.overlap);
  std::sort(overlaps.begin(), overlaps.end());
  const double sigma2 = rows.front().sigma2;
  Index n_pin = 0, big_n_pin = 0;
  for (const auto& r : rows) {
    n_pin = std::max(n_pin, r.n);
    big_n_pin = std::max(big_n_pin, r.N);
  }

  struct MetricDef {
    const char* name;
    double (*mc)(const SweepRow&);
    double (*dashed)(const SweepRow&);
    bool log_y;
  };
  const MetricDef metrics[3] = {
      {"er_w2s", [](const SweepRow& r) { return r.mc[1].excess_risk; },
       [](const SweepRow& r) { return r.theory_var_w2s; }, true},
      {"pgr", [](const SweepRow& r) { return r.pgr; }, [](const SweepRow& r) { return r.pgr_lower_tight; }, false},
      {"opr", [](const SweepRow& r) { return r.opr; }, [](const SweepRow& r) { return r.opr_lower_tight; }, false},
  };

  for (const auto& m : metrics) {
    for (int axis = 0; axis < 2; ++axis) {  // 0: vs n at N = max, 1: vs N at n = max
      std::vector<Series> series;
      int color = 0;
      for (Index o : overlaps) {
        Series mc_s, th_s;
        mc_s.label = "overlap=" + std::to_string(o) + " mc";
        th_s.label = "overlap=" + std::to_string(o) + " theory";
        mc_s.color = th_s.color = color;
        th_s.dashed = true;
        for (const auto& r : rows) {
          if (r.overlap != o || r.sigma2 != sigma2) continue;
          if (axis == 0 && r.N != big_n_pin) continue;
          if (axis == 1 && r.n != n_pin) continue;
          const double x = static_cast<double>(axis == 0 ? r.n : r.N);
          mc_s.pts.emplace_back(x, m.mc(r));
          th_s.pts.emplace_back(x, m.dashed(r));
        }
        series.push_back(std::move(mc_s));
        series.push_back(std::move(th_s));
        ++color;
      }
      const std::string xname = axis == 0 ? "n" : "N";
      const std::string pin = axis == 0 ? "N=" + std::to_string(big_n_pin) : "n=" + std::to_string(n_pin);
      write_chart(dir + "/" + m.name + "_vs_" + xname + ".svg",
                  std::string(m.name) + " vs " + xname + " (" + pin + ")", xname, m.name, std::move(series),
                  m.log_y);
    }
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::string t = s;
  for (auto& c : t)
    if (c == ',') c = ' ';
  std::istringstream is(t);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

long to_long(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': " + v);
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

}  // namespace

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);

  SweepConfig cfg = desk_preset();
  bool n_grid_set = false, N_grid_set = false, sigma2_grid_set = false, overlap_grid_set = false;

  std::string section = "sweep";
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "synthetic" && section != "sweep" && section != "solver")
        throw ConfigError("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("config: empty value for '" + key + "'");

    if (section == "synthetic") {
      if (key == "d") cfg.base.d = to_long(value, key);
      else if (key == "d_star") cfg.base.d_star = to_long(value, key);
      else if (key == "d_s") cfg.base.d_s = to_long(value, key);
      else if (key == "d_w") cfg.base.d_w = to_long(value, key);
      else if (key == "overlap") cfg.base.d_overlap = to_long(value, key);
      else if (key == "sigma2") cfg.base.sigma2 = to_double(value, key);
      else if (key == "profile") {
        if (value == "inverse_index") cfg.base.profile = EigenvalueProfile::inverse_index;
        else if (value == "custom") cfg.base.profile = EigenvalueProfile::custom;
        else throw ConfigError("config: unknown profile '" + value + "'");
      } else if (key == "custom_eigenvalues") {
        cfg.base.custom_eigenvalues.clear();
        for (const auto& t : split_list(value)) cfg.base.custom_eigenvalues.push_back(to_double(t, key));
      } else if (key == "latent") {
        if (value == "gaussian") cfg.base.latent = LatentKind::gaussian;
        else if (value == "rademacher") cfg.base.latent = LatentKind::rademacher;
        else throw ConfigError("config: unknown latent '" + value + "'");
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [synthetic]");
      }
    } else if (section == "sweep") {
      if (key == "n_grid") {
        cfg.n_grid.clear();
        for (const auto& t : split_list(value)) cfg.n_grid.push_back(to_long(t, key));
        n_grid_set = true;
      } else if (key == "N_grid") {
        cfg.N_grid.clear();
        for (const auto& t : split_list(value)) cfg.N_grid.push_back(to_long(t, key));
        N_grid_set = true;
      } else if (key == "sigma2_grid") {
        cfg.sigma2_grid.clear();
        for (const auto& t : split_list(value)) cfg.sigma2_grid.push_back(to_double(t, key));
        sigma2_grid_set = true;
      } else if (key == "overlap_grid") {
        cfg.overlap_grid.clear();
        for (const auto& t : split_list(value)) cfg.overlap_grid.push_back(to_long(t, key));
        overlap_grid_set = true;
      } else if (key == "trials") cfg.trials = to_long(value, key);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_long(value, key));
      else if (key == "out_dir") cfg.out_dir = value;
      else if (key == "svg") cfg.emit_svg = to_bool(value, key);
      else if (key == "workers") cfg.workers = static_cast<int>(to_long(value, key));
      else if (key == "tolerance") cfg.tolerance = to_double(value, key);
      else if (key == "theory_constant") cfg.theory_constant_c = to_double(value, key);
      else throw ConfigError("config: unknown key '" + key + "' in [sweep]");
    } else {  // solver
      if (key == "ridge_alpha") cfg.solver.ridge_alpha = to_double(value, key);
      else if (key == "rcond") cfg.solver.rcond = to_double(value, key);
      else throw ConfigError("config: unknown key '" + key + "' in [solver]");
    }
  }

  // A config that changes the geometry keeps grids consistent unless it sets
  // them explicitly.
  if (!sigma2_grid_set) cfg.sigma2_grid = {cfg.base.sigma2};
  if (!overlap_grid_set) cfg.overlap_grid = {cfg.base.d_overlap};
  if (!n_grid_set && cfg.base.d_w != 40) cfg.n_grid = {cfg.base.d_w + 6, 2 * cfg.base.d_w, 4 * cfg.base.d_w};
  if (!N_grid_set && cfg.base.d_s != 20) cfg.N_grid = {10 * cfg.base.d_s, 20 * cfg.base.d_s};

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace w2s::sweep
