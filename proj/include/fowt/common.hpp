#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fowt {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Configuration problems: bad keys, bad values, inconsistent settings.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem and serialization problems.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical or physical failure during a run (capsize, singular system).
struct SimulationError : std::runtime_error {
  SimulationError(const std::string& cause, double time)
      : std::runtime_error(cause), cause(cause), time(time) {}
  std::string cause;
  double time = 0.0;
};

// FNV-1a 64-bit, used for file checksums and parameter fingerprints.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }
inline double rpm_to_rad_s(double rpm) { return rpm * kPi / 30.0; }

}  // namespace fowt
