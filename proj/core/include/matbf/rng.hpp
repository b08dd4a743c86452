#pragma once

#include <cstdint>
#include <limits>

#include "matbf/linalg.hpp"

namespace matbf {

/// Counter-based SplitMix64: the i-th output is mix64(key + (i+1)*gamma).
/// Streams are addressed by (seed, stream id) so parallel replications draw
/// from disjoint, reproducible sequences.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  std::uint64_t counter() const { return counter_; }

  double uniform();  // (0, 1)
  double normal();   // N(0, 1)
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// p x n matrix of i.i.d. N(0, 1).
  Mat normal_matrix(Eigen::Index p, Eigen::Index n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);
/// Seed for replication `index` of a run with master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace matbf
