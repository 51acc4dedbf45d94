#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fowt/config_text.hpp"

namespace fowt {

// One mooring line. Geometry is split between the platform body frame
// (attachment, origin at the combined center of mass, x toward upwind surge,
// z down) and the fixed frame (anchor, z down from the mean water line).
struct TieRodSpec {
  double attach_x = 0.0;   // m, body frame
  double attach_z = 0.0;   // m, body frame
  double anchor_x = 0.0;   // m, fixed frame
  double anchor_z = 0.0;   // m, fixed frame (water depth at the anchor)
  double unstretched_length = 0.0;  // m
  double stiffness = 0.0;           // N/m, axial
  double mass_per_length = 0.0;     // kg/m
  double radius = 0.0;              // m, displacement radius
};

enum class IntegralMode {
  kRunningAverage,  // integral divided by elapsed time
  kPlain,           // standard accumulating integral
};

// Full physical and control description of one turbine configuration.
// Loaded from flat key = value text; see configs/turbine.cfg for the
// documented key list and units.
struct ParameterSet {
  // Effective translational masses and inertia, added mass included.
  double surge_mass = 0.0;          // kg            (key M_X)
  double heave_mass = 0.0;          // kg            (key M_Y)
  double coupled_moment = 0.0;      // kg*m          (key M_d)
  double nacelle_mass = 0.0;        // kg            (key M_n)
  double platform_mass = 0.0;       // kg            (key M_p)
  double structure_mass = 0.0;      // kg            (key M_s)
  double total_inertia = 0.0;       // kg*m^2        (key J_TOT)

  // Signed lever arms from the center of mass, positive above it.
  double nacelle_arm_v = 0.0;       // m   (key d_nv)
  double nacelle_arm_h = 0.0;       // m   (key d_nh)
  double platform_arm_v = 0.0;      // m   (key d_pv)
  double platform_arm_h = 0.0;      // m   (key d_ph)
  double buoyancy_arm = 0.0;        // m   (key d_G)
  double hub_arm = 0.0;             // m   (key d_blade), center of mass to hub
  double tower_arm = 0.0;           // m   (key arm_tower), wind pressure center
  double nacelle_drag_arm = 0.0;    // m   (key arm_nacelle)

  double rotor_radius = 0.0;        // m   (key R_rotor)
  double rotor_area = 0.0;          // m^2 (key A_blade)
  double tower_area = 0.0;          // m^2 (key A_tower)
  double nacelle_area = 0.0;        // m^2 (key A_nacelle)
  double submerged_volume = 0.0;    // m^3 (key V_g)

  double air_density = 0.0;         // kg/m^3 (key rho_air)
  double water_density = 0.0;       // kg/m^3 (key rho_water)
  double gravity = 0.0;             // m/s^2  (key g)

  double tower_drag_coeff = 0.0;    // (key C_tower)
  double nacelle_drag_coeff = 0.0;  // (key C_nacelle)

  // Hydrodynamic column model (inertia plus drag on strips of the platform).
  double inertia_coeff = 2.0;       // (key C_m)
  double drag_coeff_surge = 0.7;    // (key C_d_surge)
  double drag_coeff_heave = 1.0;    // (key C_d_heave)
  double platform_radius = 9.0;     // m (key platform_radius)
  double column_top = 0.0;          // m, body frame z of column top (key column_top)
  double column_keel = 0.0;         // m, body frame z of keel (key column_keel)
  int hydro_strips = 8;             // (key hydro_strips)

  std::vector<TieRodSpec> tie_rods;

  // Drivetrain.
  double rotor_inertia = 0.0;       // kg*m^2 (key J_R)
  double generator_inertia = 0.0;   // kg*m^2 (key J_G)
  double gear_ratio = 0.0;          // (key eta_G)
  double rated_power = 0.0;         // W (key P_0)
  double rated_torque = 0.0;        // N*m, generator side (key T_E_rated)

  // Blade pitch controller.
  double rated_rotor_speed = 0.0;   // rad/s (key omega_0 or omega_0_rpm)
  double servo_frequency = 0.6;     // rad/s (key omega_phi)
  double servo_damping = 0.7;       // (key zeta_phi)
  double schedule_pitch = 0.0;      // rad (key beta_k or beta_k_deg)
  double proportional_scale = 0.0;  // (key a_p)
  double integral_scale = 0.0;      // (key a_i)
  double derivative_gain = 0.0;     // s (key K_d)
  double pitch_sensitivity = 0.0;   // W/rad (key pitch_sensitivity)
  double pitch_rate_limit = 0.0;    // rad/s (key pitch_rate_limit_deg)
  double pitch_min = 0.0;           // rad (key pitch_min_deg)
  double pitch_max = 0.0;           // rad (key pitch_max_deg)
  IntegralMode integral_mode = IntegralMode::kRunningAverage;  // (key integral_mode)
  bool anti_windup = true;          // (key anti_windup)
  double derivative_filter_tau = 0.0;  // s, 0 disables (key derivative_filter_tau)

  // Reporting and numerics.
  double heave_offset = 0.0;        // m (key heave_offset)
  double equilibrium_heave = 0.0;   // m (key equilibrium_heave)
  double rotor_speed_floor = 0.1;   // rad/s (key omega_floor)
  double mean_surge_position = 0.0; // m, wave evaluation point (key mean_surge)

  // Rotor-side drivetrain inertia: rotor plus reflected generator.
  double drivetrain_inertia() const {
    return rotor_inertia + gear_ratio * gear_ratio * generator_inertia;
  }
  double total_mass() const {
    return nacelle_mass + platform_mass + structure_mass;
  }
};

ParameterSet load_parameters(const ConfigText& cfg);
ParameterSet load_parameters_text(const std::string& text);
ParameterSet load_parameters_file(const std::string& path);

// Diagnostics for physical invariants; empty means valid. load_parameters
// throws ConfigError with the first diagnostic.
std::vector<std::string> validate(const ParameterSet& p);

// Emits the full key set; load_parameters(serialize(p)) reproduces p.
std::string serialize_parameters(const ParameterSet& p);

std::uint64_t parameter_fingerprint(const ParameterSet& p);

enum class SurfaceKind { kPower, kThrust };

// Gridded aerodynamic coefficient surface over (tip speed ratio, blade
// pitch). Bilinear interpolation, clamped at the grid boundary.
struct CoefficientSurface {
  SurfaceKind kind = SurfaceKind::kPower;
  std::vector<double> tsr_grid;     // strictly increasing
  std::vector<double> pitch_grid;   // rad, strictly increasing
  std::vector<double> values;       // row-major, [i_tsr * n_pitch + j_pitch]

  struct Sample {
    double value = 0.0;
    bool clamped = false;
  };
  Sample interpolate(double tsr, double pitch) const;

  double at(std::size_t i_tsr, std::size_t j_pitch) const {
    return values[i_tsr * pitch_grid.size() + j_pitch];
  }
};

// Table format: '#' comments; first data row is a corner token followed by
// the pitch axis; each following row is a tip speed ratio followed by one
// value per pitch node. A corner token ending in "_rad" declares the pitch
// axis in radians, otherwise degrees are assumed.
CoefficientSurface load_surface(std::istream& in, SurfaceKind kind,
                                const std::string& name);
CoefficientSurface load_surface_file(const std::string& path, SurfaceKind kind);
CoefficientSurface load_surface_text(const std::string& text, SurfaceKind kind);

struct Surfaces {
  CoefficientSurface power;
  CoefficientSurface thrust;
};

}  // namespace fowt
