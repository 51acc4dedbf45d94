#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fowt/config_text.hpp"
#include "fowt/dynamics.hpp"

namespace fowt {

enum class WindMode { kConstant, kSynthetic, kReplay };
enum class WaveMode { kNone, kSea };

// One closed-loop run description. Scenario files map onto this through
// sim_config_from_text; see configs/ for the key list.
struct SimConfig {
  double dt = 0.05;          // s
  double duration = 1500.0;  // s
  int decimation = 1;        // record every n-th step

  bool controller_on = false;
  double fixed_blade_pitch = 0.0;  // rad, controller off
  double fixed_gen_torque = 0.0;   // N*m generator side, controller off
  bool region3_torque = true;      // constant-power torque when controlled

  WindMode wind_mode = WindMode::kConstant;
  double wind_constant = 20.0;     // m/s
  WindSpec wind;
  std::string wind_file;

  WaveMode wave_mode = WaveMode::kNone;
  WaveSpec wave;

  // Empty means start from the solved static equilibrium. The reported
  // variant comes from config files and is converted once the parameter
  // set (and its heave offset) is known.
  std::optional<StateVector> initial_state;
  std::optional<ReportedState> initial_reported;
  // Controller pitch start; empty means trim at the mean wind.
  std::optional<double> initial_blade_pitch;
};

SimConfig sim_config_from_text(const ConfigText& cfg);
void sim_config_to_text(const SimConfig& sc, ConfigText& out);

// Trajectory column order; names in kColumnNames. State channels are
// written in the reporting frame.
enum Column : int {
  kColT = 0,
  kColSurge,
  kColSurgeRate,
  kColHeave,
  kColHeaveRate,
  kColPitch,
  kColPitchRate,
  kColRotorSpeed,
  kColBladePitch,
  kColGenTorque,
  kColAeroPower,
  kColWindSpeed,
  kColWaveElevation,
  kColWaveForceSurge,
  kColWaveForceHeave,
  kColWaveForcePitch,
  kColDragForceSurge,
  kColDragForceHeave,
  kColDragForcePitch,
  kNumColumns
};

extern const std::array<const char*, kNumColumns> kColumnNames;

struct FailureRecord {
  std::string cause;
  double time = 0.0;
};

struct Trajectory {
  std::array<std::vector<double>, kNumColumns> cols;
  ConfigText manifest;
  std::optional<FailureRecord> failure;

  std::size_t rows() const { return cols[kColT].size(); }
  const std::vector<double>& col(Column c) const { return cols[c]; }
  std::vector<double>& col(Column c) { return cols[c]; }
};

// Classical fixed-step fourth-order Runge-Kutta update.
template <typename Deriv>
std::array<double, 7> rk4_step(const std::array<double, 7>& x, double t,
                               double dt, Deriv&& f) {
  auto add = [](const std::array<double, 7>& a, double h,
                const std::array<double, 7>& b) {
    std::array<double, 7> r;
    for (int i = 0; i < 7; ++i) r[i] = a[i] + h * b[i];
    return r;
  };
  auto k1 = f(t, x);
  auto k2 = f(t + 0.5 * dt, add(x, 0.5 * dt, k1));
  auto k3 = f(t + 0.5 * dt, add(x, 0.5 * dt, k2));
  auto k4 = f(t + dt, add(x, dt, k3));
  std::array<double, 7> out;
  for (int i = 0; i < 7; ++i) {
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// Closed-loop run. Capsize (|pitch| >= pi/2) and numerical failures
// truncate the trajectory and are recorded first class, not thrown.
Trajectory simulate(const SimConfig& sc, const ParameterSet& p,
                    const Surfaces& surfaces);

struct SteadyReport {
  StateVector final_state;
  double settling_time = 0.0;  // s, last exit from the 1 percent band
  bool converged = false;
  double blade_pitch = 0.0;
  double gen_torque = 0.0;
};

// Constant wind, still water, controller off. Starts at the solved
// equilibrium for the given setting.
struct SteadyResult {
  Trajectory trajectory;
  SteadyReport report;
};
SteadyResult steady_state_run(const ParameterSet& p, const Surfaces& surfaces,
                              double wind_speed, double blade_pitch,
                              double gen_torque, double duration = 600.0,
                              double dt = 0.05);

// Largest rotor speed at which captured power balances the rotor-side
// torque at fixed inflow and pitch. Throws SimulationError if no balance
// exists inside the coefficient grid.
double solve_rotor_balance(const ParameterSet& p, const Surfaces& surfaces,
                           double wind_speed, double blade_pitch,
                           double rotor_side_torque);

// Position equilibrium (surge, heave, pitch) under steady wind with the
// rotor spinning at the given speed. Velocities are zero.
StateVector find_static_equilibrium(const ParameterSet& p,
                                    const Surfaces& surfaces,
                                    double wind_speed, double blade_pitch,
                                    double rotor_speed);

// Blade pitch at which captured power equals rated power at rated rotor
// speed for the given wind; pitch_min when the wind cannot reach rated.
double trim_pitch(const ParameterSet& p, const Surfaces& surfaces,
                  double wind_speed);

}  // namespace fowt
