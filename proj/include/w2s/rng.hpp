#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace w2s {

/// Splittable seeded generator (xoshiro256++ core, SplitMix64 expansion).
///
/// A stream is a pure function of (seed, fork path): `fork(k)` yields an
/// independent substream that does not depend on how much the parent has
/// already drawn. Trials keyed by index therefore replay identically no
/// matter in which order, or on how many threads, they execute.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent substream addressed by `stream`.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t next_u64();
  double uniform();     // [0, 1)
  double normal();      // N(0, 1), Box-Muller
  double rademacher();  // +1 or -1 with equal probability

  // Row-major fill order; part of the bit-reproducibility contract.
  void fill_gaussian(Eigen::Ref<Eigen::MatrixXd> out);
  void fill_rademacher(Eigen::Ref<Eigen::MatrixXd> out);

 private:
  std::uint64_t key_;
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// The seed Rng(seed).fork(stream) is built from; for handing substreams to
/// APIs that take a plain seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace w2s
