#pragma once

// Counter-based random streams.
//
// A stream is a key plus a 64-bit counter; draw i is splitmix64(key + i*phi),
// so any (seed, stream id) pair yields the same sequence on every platform and
// independent of scheduling. Normals use the Box-Muller transform on our own
// uniforms; no std:: distribution is involved because their output is
// implementation-defined.

#include <cstdint>

namespace tailclust {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic child seed for the pair (a, b) under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + a) ^ (b + 0x3c6ef372fe94f82bULL));
}

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key_(derive_seed(seed, stream_id, 0x5eed)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0,1): (m + 0.5) * 2^-53 for a 53-bit m.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tailclust
