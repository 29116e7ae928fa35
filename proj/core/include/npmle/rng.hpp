#pragma once

#include <cstdint>
#include <string_view>

namespace npmle {

/// SplitMix64 stream generator.  Cross-platform deterministic: uniform
/// doubles are built from the top 53 bits, never from std:: distributions.
/// Stream discipline: every sampling operation derives its own stream from
/// (seed, op tag) via stream(), so adding draws to one op never perturbs
/// another.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * next_unit(); }

  /// Standard normal via Box-Muller on deterministic uniforms.
  double normal();

  /// Derived stream for one operation: seed mixed with an FNV-1a hash of
  /// the op tag.
  static SplitMix64 stream(std::uint64_t seed, std::string_view op_tag);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace npmle
