#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fowt {

// Stochastic streamwise wind described by a Von Karman spectrum around a
// steady mean. The sampled series is fully determined by (spec, seed).
struct WindSpec {
  double mean_speed = 20.0;       // m/s (U_ref)
  double turbulence_std = 2.0;    // m/s (sigma_u)
  double length_scale = 340.2;    // m (L_u)
  double dt = 0.05;               // s, sample interval
  double duration = 1500.0;       // s
  std::uint64_t seed = 1;
};

// One-sided Von Karman power spectral density at frequency f in Hz.
double von_karman_psd(double f, const WindSpec& spec);

struct WindSeries {
  std::vector<double> t;
  std::vector<double> v;
  WindSpec spec;

  // Linear interpolation; clamps outside the sampled span.
  double value_at(double time) const;
};

// Inverse-FFT synthesis: deterministic bin amplitudes sqrt(2 S df) with
// uniformly random phases from the seeded generator.
WindSeries synthesize_wind(const WindSpec& spec);

// Fully developed sea driven by a reference wind speed. Components are
// log-spaced across [omega_min, omega_max]; a zero bound selects the
// default band [0.1, 10] times the spectral peak.
struct WaveSpec {
  double wind_speed = 20.0;       // m/s (U_wave)
  int n_components = 128;
  double omega_min = 0.0;         // rad/s
  double omega_max = 0.0;         // rad/s
  double gravity = 9.81;          // m/s^2
  std::uint64_t seed = 1;
};

// Pierson-Moskowitz elevation spectrum at angular frequency omega.
double pierson_moskowitz_psd(double omega, const WaveSpec& spec);

// Peak of the PM spectrum, (4 beta / 5)^(1/4) g / U.
double pm_peak_frequency(const WaveSpec& spec);

struct WaveComponent {
  double amplitude = 0.0;   // m
  double omega = 0.0;       // rad/s
  double wavenumber = 0.0;  // rad/m, deep water omega^2 / g
  double phase = 0.0;       // rad
};

// Fluid state at a point. Axes: x along wave propagation (downwind),
// z upward with z = 0 at the mean surface, so submerged points have z < 0.
struct FluidState {
  double elevation = 0.0;     // m, surface at this x
  double u = 0.0;             // m/s, horizontal fluid velocity
  double w = 0.0;             // m/s, vertical fluid velocity
  double du = 0.0;            // m/s^2
  double dw = 0.0;            // m/s^2
  double pressure_head = 0.0; // m, dynamic pressure / (rho g) at depth
};

struct WaveField {
  std::vector<WaveComponent> components;
  WaveSpec spec;

  double elevation(double x, double t) const;
  // Airy kinematics with exp(k z) depth decay; requires z <= 0.
  FluidState kinematics(double x, double z, double t) const;
};

WaveField synthesize_waves(const WaveSpec& spec);

// Zero-amplitude field used for still-water runs; keeps the spec so
// manifests stay complete.
WaveField still_water(const WaveSpec& spec);

// Two-column delimited series files (time, value) for export and replay.
void write_series(const std::string& path, const std::vector<double>& t,
                  const std::vector<double>& v, const std::string& header);
WindSeries read_wind_series(const std::string& path);

}  // namespace fowt
