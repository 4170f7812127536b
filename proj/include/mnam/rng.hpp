#pragma once

#include <cmath>
#include <cstdint>

namespace mnam {

// Splittable counter-style generator built on the splitmix64 finalizer.
//
// Standard-library distributions are implementation-defined, which would make
// seeded runs differ across toolchains. Everything here is spelled out so a
// seed pins the exact byte stream on any platform. split(key) derives an
// independent stream, so replications can run in any order (or on any thread)
// and still reproduce.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(mix(seed ^ kStreamSalt)) {}

  SplitRng split(std::uint64_t key) const {
    return SplitRng(mix(state_ + kGolden * (key + 1)), RawTag{});
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Box-Muller; the sine branch is discarded to keep the stream splittable
  // without hidden state.
  double normal(double mean, double sd) {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * kPi * u2);
  }

  // Knuth's product-of-uniforms inversion; exact and fine for the small
  // rates used here (cost grows linearly with the rate).
  int poisson(double rate) {
    const double limit = std::exp(-rate);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_double();
    } while (p > limit);
    return k - 1;
  }

  // Fisher-Yates support: uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // Multiply-shift; bias is < 2^-64 per draw, irrelevant at these sizes,
    // and it keeps the draw count per call fixed (determinism).
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  struct RawTag {};
  SplitRng(std::uint64_t raw, RawTag) : state_(raw) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamSalt = 0x8e2ab5cf02a4b17dULL;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::uint64_t state_;
};

}
