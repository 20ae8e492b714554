#pragma once

#include <cstdint>
#include <random>

namespace hjbac {

/// splitmix64 step; used to whiten tag words when deriving stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent stream seed from a master seed and up to three
/// tag words (purpose id, cycle/step index, chunk/path index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag_a,
                          std::uint64_t tag_b = 0, std::uint64_t tag_c = 0);

/// Seeded random stream with explicit double transforms. mt19937_64 output is
/// fixed by the standard and the transforms below are spelled out here, so
/// identical seeds give identical samples on any conforming toolchain.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so the log is finite.
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hjbac
