#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fowt {

// SplitMix64 finalizer. Used to mix (base seed, run index, stream tag) into
// independent per-run seeds. Algorithm name recorded in run manifests.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index,
                              std::uint64_t stream_tag) {
  return splitmix64(splitmix64(splitmix64(base) ^ index) ^ stream_tag);
}

// Stream tags for the independent wind and wave random streams.
inline constexpr std::uint64_t kWindStream = 0x57494e44ull;  // "WIND"
inline constexpr std::uint64_t kWaveStream = 0x57415645ull;  // "WAVE"

// Uniform doubles in [0, 1) from mt19937_64. The mapping (x >> 11) * 2^-53
// is fixed here rather than delegated to std::uniform_real_distribution so
// that streams replay bit-for-bit on any standard library.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : gen_(seed) {}

  double next() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Box-Muller pair, one value returned per call.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = next();
    double u2 = next();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.141592653589793 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fowt
