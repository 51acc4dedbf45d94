#pragma once

#include <Eigen/Dense>
#include <array>

#include "fowt/aero.hpp"
#include "fowt/environment.hpp"
#include "fowt/params.hpp"

namespace fowt {

// Model state in the internal frame: surge axis horizontal pointing upwind,
// heave axis vertical pointing down with zero at the mean water line, pitch
// positive when the tower top moves upwind. Rotor speed rides along as the
// seventh state.
struct StateVector {
  double surge = 0.0;        // m
  double surge_rate = 0.0;   // m/s
  double heave = 0.0;        // m
  double heave_rate = 0.0;   // m/s
  double pitch = 0.0;        // rad
  double pitch_rate = 0.0;   // rad/s
  double rotor_speed = 0.0;  // rad/s

  std::array<double, 7> as_array() const {
    return {surge, surge_rate, heave, heave_rate, pitch, pitch_rate, rotor_speed};
  }
  static StateVector from_array(const std::array<double, 7>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
};

// Reporting frame used by trajectory files: surge positive downwind, heave
// positive up and zeroed at the equilibrium depth, pitch positive downwind.
struct ReportedState {
  double surge = 0.0;
  double surge_rate = 0.0;
  double heave = 0.0;
  double heave_rate = 0.0;
  double pitch = 0.0;
  double pitch_rate = 0.0;
  double rotor_speed = 0.0;
};

ReportedState to_reporting_frame(const StateVector& s, double heave_offset);
StateVector from_reporting_frame(const ReportedState& r, double heave_offset);

// Generalized force on the three rigid-body channels.
struct Channels {
  double surge = 0.0;  // N
  double heave = 0.0;  // N
  double pitch = 0.0;  // N*m
};

struct ForceBreakdown {
  Channels weight;
  Channels buoyancy;
  Channels wind;
  Channels tie_rod;
  Channels wave;       // inertial wave excitation and keel pressure
  Channels hydro_drag; // quadratic drag on the submerged column
  Channels total() const;
};

// Environment seen at one instant. A null wave field means still water.
struct EnvSample {
  double wind_speed = 0.0;
  const WaveField* waves = nullptr;
  double time = 0.0;
};

using MassMatrix = Eigen::Matrix<double, 6, 6>;
using ForceVector = Eigen::Matrix<double, 6, 1>;

// Symmetric mass matrix of the implicit rigid-body system. Unit rows on the
// kinematic equations; pitch couples to surge and heave through the first
// mass moment.
MassMatrix mass_matrix(const StateVector& s, const ParameterSet& p);

Channels weight_forces(const StateVector& s, const ParameterSet& p);
Channels buoyancy_forces(const StateVector& s, const ParameterSet& p);
Channels tie_rod_forces(const StateVector& s, const ParameterSet& p);

// Net submerged weight per unit length of a mooring line.
double tie_rod_linear_weight(double mass_per_length, double radius,
                             double water_density, double gravity);

// Wave excitation and quadratic drag on the platform column, returned as
// separate channels so still-water drag stays distinguishable.
struct WaveHydroForces {
  Channels wave;
  Channels drag;
};
WaveHydroForces wave_hydro_forces(const StateVector& s, const EnvSample& env,
                                  const ParameterSet& p);

struct Assembly {
  MassMatrix E;
  ForceVector F;
  ForceBreakdown breakdown;
};

Assembly assemble(const StateVector& s, const EnvSample& env,
                  double blade_pitch, const ParameterSet& p,
                  const Surfaces& surfaces);

// Full 7-state derivative: direct dense solve of the 6x6 implicit system
// plus the drivetrain equation with the generator-side torque reflected
// through the gear ratio. Throws SimulationError when the mass matrix is
// singular or ill conditioned (1-norm condition estimate above 1e12).
std::array<double, 7> state_derivative(const StateVector& s,
                                       const EnvSample& env,
                                       double blade_pitch,
                                       double generator_torque,
                                       const ParameterSet& p,
                                       const Surfaces& surfaces);

inline bool capsized(const StateVector& s) {
  return std::abs(s.pitch) >= 1.5707963267948966;
}

}  // namespace fowt
