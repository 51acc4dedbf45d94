#pragma once

#include "fowt/params.hpp"

namespace fowt {

// Tip speed ratio omega R / v. Zero inflow has no defined ratio; callers
// that need a total force substitute a clamped value (see clamped_tsr).
double tip_speed_ratio(double rotor_speed, double radius, double inflow);

// Tip speed ratio clamped into the coefficient grid; well defined for any
// inflow including zero, where it saturates at the grid edge.
double clamped_tsr(double rotor_speed, double radius, double inflow,
                   const CoefficientSurface& surface);

// Streamwise inflow seen by each element: wind plus the element's own
// streamwise motion from surge rate and pitch rotation.
struct ElementInflow {
  double tower = 0.0;
  double nacelle = 0.0;
  double blade = 0.0;
};
ElementInflow relative_inflow(double wind_speed, double surge_rate,
                              double pitch, double pitch_rate,
                              const ParameterSet& p);

// Drag force on a parasitic element, -0.5 rho C A v |v|. Negative values
// push the structure downwind.
double parasitic_thrust(double rho, double drag_coeff, double area, double inflow);

struct WindForceBreakdown {
  double tower = 0.0;    // N
  double nacelle = 0.0;  // N
  double blade = 0.0;    // N
  double tsr = 0.0;
  bool surface_clamped = false;
  double total() const { return tower + nacelle + blade; }
};

WindForceBreakdown total_wind_force(const ParameterSet& p,
                                    const CoefficientSurface& thrust,
                                    double rotor_speed, double blade_pitch,
                                    const ElementInflow& inflow);

// Captured aerodynamic power 0.5 rho A Cp v^3.
double aero_power(const ParameterSet& p, const CoefficientSurface& power,
                  double rotor_speed, double blade_pitch, double blade_inflow,
                  bool* clamped = nullptr);

// Constant-power generator torque, rated power / (gear ratio * rotor
// speed). This is the generator-side torque; the rotor equation sees it
// multiplied by the gear ratio. Below the stall floor the torque is held
// at the floor value and flagged.
struct TorqueResult {
  double torque = 0.0;  // N*m, generator side
  bool clamped = false;
};
TorqueResult region3_torque(double rated_power, double gear_ratio,
                            double rotor_speed, double speed_floor);

// Rotor speed derivative (P_A / omega - torque) / drivetrain inertia, with
// the rotor-side torque and the same stall floor on the division.
double rotor_accel(double aero_power_w, double rotor_speed,
                   double rotor_side_torque, double drivetrain_inertia,
                   double speed_floor);

// Analytic power coefficient fallback for tests, the standard exponential
// single-expression fit with the usual constants (0.5176, 116, 0.4, 5, 21,
// 0.0068) and pitch in degrees, clamped to [0, 0.593].
double reference_power_coefficient(double tsr, double pitch_rad);
CoefficientSurface reference_power_surface(const std::vector<double>& tsr_grid,
                                           const std::vector<double>& pitch_grid_rad);

}  // namespace fowt
