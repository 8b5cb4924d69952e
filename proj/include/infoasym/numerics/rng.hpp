#pragma once

#include <cstdint>
#include <span>

namespace infoasym {

/// Counter-based generator: output i is a pure function of (seed, i), so a
/// seed plus a call sequence reproduces the same stream on every platform.
/// Distributions are derived here rather than through <random> because the
/// standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() noexcept;
  /// Index drawn from a probability vector by inverse CDF.
  std::size_t categorical(std::span<const double> probs) noexcept;

  /// Independent child stream; does not advance this stream.
  Rng split(std::uint64_t stream) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace infoasym
