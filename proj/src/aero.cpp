#include "fowt/aero.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fowt/common.hpp"

namespace fowt {

double tip_speed_ratio(double rotor_speed, double radius, double inflow) {
  if (inflow == 0.0) {
    throw std::domain_error("tip speed ratio undefined at zero inflow");
  }
  return rotor_speed * radius / inflow;
}

double clamped_tsr(double rotor_speed, double radius, double inflow,
                   const CoefficientSurface& surface) {
  double lo = surface.tsr_grid.front();
  double hi = surface.tsr_grid.back();
  if (inflow == 0.0) return hi;
  return std::clamp(rotor_speed * radius / inflow, lo, hi);
}

ElementInflow relative_inflow(double wind_speed, double surge_rate,
                              double pitch, double pitch_rate,
                              const ParameterSet& p) {
  // Streamwise velocity of a point a signed arm above the center of mass is
  // surge_rate + arm * pitch_rate * cos(pitch). Positive inflow means the
  // air approaches head on.
  double c = std::cos(pitch);
  ElementInflow in;
  in.tower = wind_speed + surge_rate + p.tower_arm * pitch_rate * c;
  in.nacelle = wind_speed + surge_rate + p.nacelle_drag_arm * pitch_rate * c;
  in.blade = wind_speed + surge_rate + p.hub_arm * pitch_rate * c;
  return in;
}

double parasitic_thrust(double rho, double drag_coeff, double area,
                        double inflow) {
  return -0.5 * rho * drag_coeff * area * inflow * std::abs(inflow);
}

WindForceBreakdown total_wind_force(const ParameterSet& p,
                                    const CoefficientSurface& thrust,
                                    double rotor_speed, double blade_pitch,
                                    const ElementInflow& inflow) {
  WindForceBreakdown out;
  out.tower = parasitic_thrust(p.air_density, p.tower_drag_coeff, p.tower_area,
                               inflow.tower);
  out.nacelle = parasitic_thrust(p.air_density, p.nacelle_drag_coeff,
                                 p.nacelle_area, inflow.nacelle);
  out.tsr = clamped_tsr(rotor_speed, p.rotor_radius, inflow.blade, thrust);
  auto ct = thrust.interpolate(out.tsr, blade_pitch);
  out.surface_clamped = ct.clamped;
  out.blade = -0.5 * p.air_density * p.rotor_area * ct.value * inflow.blade *
              std::abs(inflow.blade);
  return out;
}

double aero_power(const ParameterSet& p, const CoefficientSurface& power,
                  double rotor_speed, double blade_pitch, double blade_inflow,
                  bool* clamped) {
  double tsr = clamped_tsr(rotor_speed, p.rotor_radius, blade_inflow, power);
  auto cp = power.interpolate(tsr, blade_pitch);
  if (clamped) *clamped = cp.clamped;
  return 0.5 * p.air_density * p.rotor_area * cp.value * blade_inflow *
         blade_inflow * blade_inflow;
}

TorqueResult region3_torque(double rated_power, double gear_ratio,
                            double rotor_speed, double speed_floor) {
  TorqueResult out;
  double w = rotor_speed;
  if (w < speed_floor) {
    w = speed_floor;
    out.clamped = true;
  }
  out.torque = rated_power / (gear_ratio * w);
  return out;
}

double rotor_accel(double aero_power_w, double rotor_speed,
                   double rotor_side_torque, double drivetrain_inertia,
                   double speed_floor) {
  double w = std::max(rotor_speed, speed_floor);
  return (aero_power_w / w - rotor_side_torque) / drivetrain_inertia;
}

double reference_power_coefficient(double tsr, double pitch_rad) {
  double b = rad_to_deg(pitch_rad);
  double li_inv = 1.0 / (tsr + 0.08 * b) - 0.035 / (1.0 + b * b * b);
  double cp = 0.5176 * (116.0 * li_inv - 0.4 * b - 5.0) *
                  std::exp(-21.0 * li_inv) +
              0.0068 * tsr;
  return std::clamp(cp, 0.0, 0.593);
}

CoefficientSurface reference_power_surface(
    const std::vector<double>& tsr_grid,
    const std::vector<double>& pitch_grid_rad) {
  CoefficientSurface s;
  s.kind = SurfaceKind::kPower;
  s.tsr_grid = tsr_grid;
  s.pitch_grid = pitch_grid_rad;
  s.values.reserve(tsr_grid.size() * pitch_grid_rad.size());
  for (double l : tsr_grid) {
    for (double b : pitch_grid_rad) {
      s.values.push_back(reference_power_coefficient(l, b));
    }
  }
  return s;
}

}  // namespace fowt
