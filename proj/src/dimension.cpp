#include "w2s/dimension.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "w2s/rng.hpp"

namespace w2s::dims {

namespace {

void require_orthonormal(const Matrix& v, const char* who) {
  if (v.cols() == 0) return;
  const double dev = (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm();
  if (dev > 1e-6) throw std::invalid_argument(std::string(who) + ": basis columns are not orthonormal");
}

std::vector<Index> uniform_subsample(Index total, Index keep, Rng rng) {
  // Partial Fisher-Yates, then sorted so column order stays stable.
  std::vector<Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < keep; ++i) {
    const Index j = i + static_cast<Index>(rng.uniform() * static_cast<double>(total - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(std::min(j, total - 1))]);
  }
  idx.resize(static_cast<std::size_t>(keep));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// ortho(Phi^T G^T) with Gaussian G of `rank` rows: a one-pass randomized
// rangefinder for the top right-singular subspace of Phi.
Matrix rangefinder_right(const Matrix& phi, Index rank, Rng rng) {
  const Index m = phi.rows();
  Matrix g(rank, m);
  rng.fill_gaussian(g);
  Matrix sketch = phi.transpose() * g.transpose();  // D x rank
  Eigen::HouseholderQR<Matrix> qr(sketch);
  return qr.householderQ() * Matrix::Identity(sketch.rows(), rank);
}

bool looks_binary(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size < 16) return false;
  std::ifstream in(path, std::ios::binary);
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  if (!in) return false;
  return rows > 0 && cols > 0 && size == 16 + rows * cols * 8;
}

}  // namespace

SpectralSummary empirical_covariance(const Matrix& features, bool center) {
  const Index m = features.rows();
  if (m < 1) throw std::invalid_argument("empirical_covariance: needs at least one sample");
  if (!features.allFinite()) throw std::invalid_argument("empirical_covariance: non-finite features");
  Matrix cov;
  if (center) {
    Matrix shifted = features.rowwise() - features.colwise().mean();
    cov = shifted.transpose() * shifted / static_cast<double>(m);
  } else {
    cov = features.transpose() * features / static_cast<double>(m);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("empirical_covariance: eigendecomposition failed");

  SpectralSummary s;
  s.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
  s.basis = eig.eigenvectors().rowwise().reverse();
  s.trace = cov.trace();
  return s;
}

Index intrinsic_dimension(const SpectralSummary& s, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("intrinsic_dimension: tau must lie in (0, 1)");
  const double trace = s.eigenvalues.sum();
  if (!(trace > 0.0)) throw std::invalid_argument("intrinsic_dimension: zero trace");
  double kept = 0.0;
  for (Index k = 1; k <= s.eigenvalues.size(); ++k) {
    kept += s.eigenvalues(k - 1);
    if ((trace - kept) / trace < tau) return k;
  }
  return s.eigenvalues.size();
}

double correlation_dimension(const Matrix& vs, const Matrix& vw) {
  if (vs.rows() != vw.rows()) throw std::invalid_argument("correlation_dimension: ambient dimensions disagree");
  require_orthonormal(vs, "correlation_dimension");
  require_orthonormal(vw, "correlation_dimension");
  return (vs.transpose() * vw).squaredNorm();
}

Vector canonical_cosines(const Matrix& vs, const Matrix& vw) {
  if (vs.rows() != vw.rows()) throw std::invalid_argument("canonical_cosines: ambient dimensions disagree");
  require_orthonormal(vs, "canonical_cosines");
  require_orthonormal(vw, "canonical_cosines");
  if (vs.cols() == 0 || vw.cols() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(vs.transpose() * vw);
  return svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
}

double correlation_dimension_mismatched(const Matrix& vs, const Matrix& vw, const Matrix& gamma) {
  require_orthonormal(vs, "correlation_dimension_mismatched");
  require_orthonormal(vw, "correlation_dimension_mismatched");
  if (gamma.rows() != vs.rows() || gamma.cols() != vw.rows())
    throw std::invalid_argument("correlation_dimension_mismatched: matcher shape must be rows(vs) x rows(vw)");
  if (vs.cols() == 0 || vw.cols() == 0) return 0.0;
  return (vs.transpose() * gamma * vw).squaredNorm();
}

double correlation_dimension_mismatched(const Matrix& vs, const Matrix& vw, std::uint64_t seed) {
  const Index ds_amb = vs.rows();
  const Index dw_amb = vw.rows();
  Matrix gamma = ds_amb >= dw_amb ? random_orthonormal(ds_amb, dw_amb, seed)
                                  : Matrix(random_orthonormal(dw_amb, ds_amb, seed).transpose());
  return correlation_dimension_mismatched(vs, vw, gamma);
}

double sketched_correlation_dimension(const Matrix& phi_s, const Matrix& phi_w, const SketchConfig& cfg) {
  if (!(cfg.common_dim_fraction > 0.0 && cfg.common_dim_fraction <= 1.0))
    throw std::invalid_argument("sketched_correlation_dimension: fraction must lie in (0, 1]");
  if (cfg.target_rank_s < 1 || cfg.target_rank_w < 1)
    throw std::invalid_argument("sketched_correlation_dimension: target ranks must be positive");

  const Index d_min = std::min(phi_s.cols(), phi_w.cols());
  const Index max_rank = std::max(cfg.target_rank_s, cfg.target_rank_w);
  Index common = static_cast<Index>(std::ceil(cfg.common_dim_fraction * static_cast<double>(d_min)));
  common = std::max(common, max_rank);
  if (common > d_min)
    throw std::invalid_argument("sketched_correlation_dimension: common dimension exceeds a feature dimension");
  if (phi_s.rows() < max_rank || phi_w.rows() < max_rank)
    throw std::invalid_argument("sketched_correlation_dimension: fewer samples than target rank");

  Rng rng(cfg.seed);
  // Matching ambient dimensions share one column subset so both sketched
  // bases live in the same coordinates; otherwise each side subsamples its
  // own columns and the selection doubles as the dimension matcher.
  const bool shared_columns = phi_s.cols() == phi_w.cols();
  auto sketch_side = [&](const Matrix& phi, Index rank, Rng subsample_rng, Rng sketch_rng) {
    Matrix sub(phi.rows(), common);
    if (common == phi.cols()) {
      sub = phi;
    } else {
      const auto cols = uniform_subsample(phi.cols(), common, subsample_rng);
      for (Index j = 0; j < common; ++j) sub.col(j) = phi.col(cols[static_cast<std::size_t>(j)]);
    }
    return rangefinder_right(sub, rank, sketch_rng);
  };
  Matrix vs = sketch_side(phi_s, cfg.target_rank_s, rng.fork(0), rng.fork(2));
  Matrix vw = sketch_side(phi_w, cfg.target_rank_w, shared_columns ? rng.fork(0) : rng.fork(1), rng.fork(3));
  return (vs.transpose() * vw).squaredNorm();
}

Matrix load_feature_dump(const std::string& path) {
  if (looks_binary(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_feature_dump: cannot open " + path);
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    std::vector<double> row(cols);
    for (std::uint64_t i = 0; i < rows; ++i) {
      in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(cols * 8));
      if (!in) throw std::runtime_error("load_feature_dump: truncated binary dump " + path);
      for (std::uint64_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
    }
    return m;
  }

  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_feature_dump: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    double v = 0.0;
    while (ls >> v) row.push_back(v);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("load_feature_dump: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_feature_dump: no data in " + path);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void save_feature_dump_binary(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_feature_dump_binary: cannot open " + path);
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
  if (!out) throw std::runtime_error("save_feature_dump_binary: write failed for " + path);
}

void save_feature_dump_text(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_feature_dump_text: cannot open " + path);
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_feature_dump_text: write failed for " + path);
}

}  // namespace w2s::dims
