#pragma once

#include <cstdint>
#include <string>

#include "w2s/linalg.hpp"

namespace w2s::dims {

/// Eigendecomposition of a covariance: eigenvalues nonincreasing, basis
/// columns orthonormal, trace = sum of eigenvalues.
struct SpectralSummary {
  Vector eigenvalues;
  Matrix basis;
  double trace = 0.0;
};

/// Eigendecomposition of (1/m) Phi^T Phi. Features are assumed zero-mean;
/// pass center = true to subtract the empirical column means first.
SpectralSummary empirical_covariance(const Matrix& features, bool center = false);

/// Smallest k whose best rank-k approximation loses less than tau of the
/// trace: min { k : (trace - sum_{i<=k} lambda_i) / trace < tau }.
Index intrinsic_dimension(const SpectralSummary& s, double tau);

/// |Vs^T Vw|_F^2, the summed squared cosines of the canonical angles between
/// the two column spans. Both bases must be orthonormal (within 1e-6) and
/// share the ambient dimension.
double correlation_dimension(const Matrix& vs, const Matrix& vw);

/// Cosines of the canonical angles: the singular values of Vs^T Vw,
/// descending, clamped to [0, 1].
Vector canonical_cosines(const Matrix& vs, const Matrix& vw);

/// Correlation dimension across mismatched ambient dimensions,
/// |Vs^T Gamma Vw|_F^2 with Gamma a seeded random partial isometry that maps
/// the smaller ambient space isometrically into the larger.
double correlation_dimension_mismatched(const Matrix& vs, const Matrix& vw, std::uint64_t seed);
/// Same with an explicit dimension matcher (rows(vs) x rows(vw)).
double correlation_dimension_mismatched(const Matrix& vs, const Matrix& vw, const Matrix& gamma);

struct SketchConfig {
  double common_dim_fraction = 0.01;  // of min(D_s, D_w), floored at max rank
  Index target_rank_s = 0;
  Index target_rank_w = 0;
  std::uint64_t seed = 0;
};

/// Sketched estimate from raw feature matrices (rows = samples): subsample
/// columns of each matrix uniformly to a common dimension, approximate the
/// top right-singular subspaces with a randomized rangefinder, and return
/// |Vs^T Vw|_F^2 of the two sketched bases.
double sketched_correlation_dimension(const Matrix& phi_s, const Matrix& phi_w, const SketchConfig& cfg);

// Feature dumps: rows = samples, columns = feature dimensions. Binary layout
// is two little-endian uint64 (rows, cols) followed by row-major
// little-endian float64; text is one row per line, comma or whitespace
// separated. load_feature_dump sniffs the format.
Matrix load_feature_dump(const std::string& path);
void save_feature_dump_binary(const Matrix& m, const std::string& path);
void save_feature_dump_text(const Matrix& m, const std::string& path);

}  // namespace w2s::dims
