#pragma once

#include <cstdint>
#include <limits>

namespace debias {

/// Counter-based generator: the n-th draw is a pure function of
/// (seed, stream_id, n), so results never depend on iteration order or on
/// how work is split across threads.
///
/// Distributions are implemented here rather than through <random> because
/// the standard distributions are not specified bit-for-bit across library
/// implementations and the file outputs must be byte-reproducible.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();

  /// Uniform integer in [0, bound), unbiased (Lemire's multiply-shift with
  /// rejection). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal deviate (Box-Muller, one draw per call).
  double normal();

  /// Child stream keyed by this stream's identity and a sub-index.
  RngStream child(std::uint64_t sub) const;

  // UniformRandomBitGenerator surface
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace debias
