#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rkhawkes {

/// MT19937-64 with platform-independent variate transforms.
///
/// The standard library leaves distribution algorithms unspecified, so the
/// uniform and exponential draws are derived from raw 64-bit outputs here to
/// keep trajectories identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }

  double exponential(double rate) { return -std::log(uniform_open_closed()) / rate; }

  /// Uniform integer in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = 0;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rkhawkes
