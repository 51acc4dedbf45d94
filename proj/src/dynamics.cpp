#include "fowt/dynamics.hpp"

#include <cmath>

#include "fowt/common.hpp"

namespace fowt {

namespace {

// Body frame: x toward upwind surge, z down, origin at the center of mass.
struct WorldPoint {
  double x, z;    // fixed-frame position
  double vx, vz;  // fixed-frame velocity
};

WorldPoint body_point(const StateVector& s, double bx, double bz) {
  double c = std::cos(s.pitch);
  double sn = std::sin(s.pitch);
  WorldPoint w;
  w.x = s.surge + bx * c - bz * sn;
  w.z = s.heave + bx * sn + bz * c;
  w.vx = s.surge_rate + (-bx * sn - bz * c) * s.pitch_rate;
  w.vz = s.heave_rate + (bx * c - bz * sn) * s.pitch_rate;
  return w;
}

// Moment about the center of mass; positive pitches the tower top upwind.
double moment_about_cm(const StateVector& s, const WorldPoint& at, double fx,
                       double fz) {
  double rx = at.x - s.surge;
  double rz = at.z - s.heave;
  return rx * fz - rz * fx;
}

}  // namespace

ReportedState to_reporting_frame(const StateVector& s, double heave_offset) {
  ReportedState r;
  r.surge = -s.surge;
  r.surge_rate = -s.surge_rate;
  r.heave = heave_offset - s.heave;
  r.heave_rate = -s.heave_rate;
  r.pitch = -s.pitch;
  r.pitch_rate = -s.pitch_rate;
  r.rotor_speed = s.rotor_speed;
  return r;
}

StateVector from_reporting_frame(const ReportedState& r, double heave_offset) {
  StateVector s;
  s.surge = -r.surge;
  s.surge_rate = -r.surge_rate;
  s.heave = heave_offset - r.heave;
  s.heave_rate = -r.heave_rate;
  s.pitch = -r.pitch;
  s.pitch_rate = -r.pitch_rate;
  s.rotor_speed = r.rotor_speed;
  return s;
}

Channels ForceBreakdown::total() const {
  Channels t;
  for (const Channels* c : {&weight, &buoyancy, &wind, &tie_rod, &wave, &hydro_drag}) {
    t.surge += c->surge;
    t.heave += c->heave;
    t.pitch += c->pitch;
  }
  return t;
}

MassMatrix mass_matrix(const StateVector& s, const ParameterSet& p) {
  MassMatrix e = MassMatrix::Zero();
  double couple_c = p.coupled_moment * std::cos(s.pitch);
  double couple_s = p.coupled_moment * std::sin(s.pitch);
  e(0, 0) = 1.0;
  e(1, 1) = p.surge_mass;
  e(1, 5) = couple_c;
  e(2, 2) = 1.0;
  e(3, 3) = p.heave_mass;
  e(3, 5) = couple_s;
  e(4, 4) = 1.0;
  e(5, 1) = couple_c;
  e(5, 3) = couple_s;
  e(5, 5) = p.total_inertia;
  return e;
}

Channels weight_forces(const StateVector& s, const ParameterSet& p) {
  Channels q;
  q.heave = p.total_mass() * p.gravity;
  double sv = p.nacelle_mass * p.nacelle_arm_v + p.platform_mass * p.platform_arm_v;
  double sh = p.nacelle_mass * p.nacelle_arm_h + p.platform_mass * p.platform_arm_h;
  q.pitch = sv * p.gravity * std::sin(s.pitch) + sh * p.gravity * std::cos(s.pitch);
  return q;
}

Channels buoyancy_forces(const StateVector& s, const ParameterSet& p) {
  Channels q;
  double b = p.water_density * p.submerged_volume * p.gravity;
  q.heave = -b;
  q.pitch = b * p.buoyancy_arm * std::sin(s.pitch);
  return q;
}

double tie_rod_linear_weight(double mass_per_length, double radius,
                             double water_density, double gravity) {
  return mass_per_length * gravity -
         water_density * gravity * kPi * radius * radius;
}

Channels tie_rod_forces(const StateVector& s, const ParameterSet& p) {
  Channels q;
  for (const auto& rod : p.tie_rods) {
    WorldPoint attach = body_point(s, rod.attach_x, rod.attach_z);
    double dx = rod.anchor_x - attach.x;
    double dz = rod.anchor_z - attach.z;
    double len = std::hypot(dx, dz);
    double fx = 0.0;
    double fz = 0.0;
    if (len > 1e-12) {
      // Elastic taut line; slack carries no compression.
      double tension = rod.stiffness * (len - rod.unstretched_length);
      if (tension > 0.0) {
        fx = tension * dx / len;
        fz = tension * dz / len;
      }
    }
    // Net submerged line weight hangs at the attachment.
    fz += tie_rod_linear_weight(rod.mass_per_length, rod.radius,
                                p.water_density, p.gravity) *
          rod.unstretched_length;
    q.surge += fx;
    q.heave += fz;
    q.pitch += moment_about_cm(s, attach, fx, fz);
  }
  return q;
}

WaveHydroForces wave_hydro_forces(const StateVector& s, const EnvSample& env,
                                  const ParameterSet& p) {
  WaveHydroForces out;
  double span = p.column_keel - p.column_top;
  if (span <= 0.0) return out;
  int n = p.hydro_strips;
  double dl = span / n;
  double area_keel = kPi * p.platform_radius * p.platform_radius;
  double strip_volume = area_keel * dl;
  double strip_width = 2.0 * p.platform_radius * dl;

  // The internal origin sits at the equilibrium center of mass, so the mean
  // water line is heave_offset above it (at internal z = -heave_offset).
  for (int i = 0; i < n; ++i) {
    double bz = p.column_top + (i + 0.5) * dl;
    WorldPoint at = body_point(s, 0.0, bz);
    if (at.z < -p.heave_offset) continue;  // strip above the mean surface
    FluidState fluid;
    if (env.waves) {
      // Wave field axes: x downwind, z up with zero at the surface.
      // Internal frame: x upwind, z down.
      fluid = env.waves->kinematics(-at.x, -(at.z + p.heave_offset), env.time);
    }
    double fluid_vx = -fluid.u;
    double fluid_ax = -fluid.du;
    double inertia = p.water_density * p.inertia_coeff * strip_volume * fluid_ax;
    double rel = fluid_vx - at.vx;
    double drag = 0.5 * p.water_density * p.drag_coeff_surge * strip_width *
                  std::abs(rel) * rel;
    out.wave.surge += inertia;
    out.wave.pitch += moment_about_cm(s, at, inertia, 0.0);
    out.drag.surge += drag;
    out.drag.pitch += moment_about_cm(s, at, drag, 0.0);
  }

  // Vertical excitation from dynamic pressure under the keel plus quadratic
  // heave drag on the end face.
  WorldPoint keel = body_point(s, 0.0, p.column_keel);
  FluidState fluid;
  if (env.waves) {
    fluid = env.waves->kinematics(-keel.x, -(keel.z + p.heave_offset), env.time);
  }
  double pressure_force = -p.water_density * p.gravity * fluid.pressure_head *
                          area_keel;
  double fluid_vz = -fluid.w;
  double rel_z = fluid_vz - keel.vz;
  double drag_z = 0.5 * p.water_density * p.drag_coeff_heave * area_keel *
                  std::abs(rel_z) * rel_z;
  out.wave.heave += pressure_force;
  out.wave.pitch += moment_about_cm(s, keel, 0.0, pressure_force);
  out.drag.heave += drag_z;
  out.drag.pitch += moment_about_cm(s, keel, 0.0, drag_z);
  return out;
}

Assembly assemble(const StateVector& s, const EnvSample& env,
                  double blade_pitch, const ParameterSet& p,
                  const Surfaces& surfaces) {
  Assembly a;
  a.breakdown.weight = weight_forces(s, p);
  a.breakdown.buoyancy = buoyancy_forces(s, p);
  a.breakdown.tie_rod = tie_rod_forces(s, p);
  auto wave_hydro = wave_hydro_forces(s, env, p);
  a.breakdown.wave = wave_hydro.wave;
  a.breakdown.hydro_drag = wave_hydro.drag;

  ElementInflow inflow = relative_inflow(env.wind_speed, s.surge_rate, s.pitch,
                                         s.pitch_rate, p);
  WindForceBreakdown wind = total_wind_force(p, surfaces.thrust, s.rotor_speed,
                                             blade_pitch, inflow);
  a.breakdown.wind.surge = wind.total();
  // Horizontal element forces act a lever arm above the center of mass.
  double c = std::cos(s.pitch);
  a.breakdown.wind.pitch = c * (wind.tower * p.tower_arm +
                                wind.nacelle * p.nacelle_drag_arm +
                                wind.blade * p.hub_arm);

  Channels q = a.breakdown.total();
  double w2 = s.pitch_rate * s.pitch_rate;
  a.E = mass_matrix(s, p);
  a.F(0) = s.surge_rate;
  a.F(1) = q.surge + p.coupled_moment * w2 * std::sin(s.pitch);
  a.F(2) = s.heave_rate;
  a.F(3) = q.heave - p.coupled_moment * w2 * std::cos(s.pitch);
  a.F(4) = s.pitch_rate;
  a.F(5) = q.pitch;
  return a;
}

std::array<double, 7> state_derivative(const StateVector& s,
                                       const EnvSample& env,
                                       double blade_pitch,
                                       double generator_torque,
                                       const ParameterSet& p,
                                       const Surfaces& surfaces) {
  Assembly a = assemble(s, env, blade_pitch, p, surfaces);

  Eigen::PartialPivLU<MassMatrix> lu(a.E);
  // 1-norm condition estimate from the exact inverse columns; the system is
  // only 6x6 so this costs six triangular solves.
  double norm_e = 0.0;
  double norm_inv = 0.0;
  for (int j = 0; j < 6; ++j) {
    norm_e = std::max(norm_e, a.E.col(j).cwiseAbs().sum());
    ForceVector unit = ForceVector::Zero();
    unit(j) = 1.0;
    ForceVector col = lu.solve(unit);
    if (!col.allFinite()) {
      throw SimulationError("mass matrix is singular", env.time);
    }
    norm_inv = std::max(norm_inv, col.cwiseAbs().sum());
  }
  if (norm_e * norm_inv > 1e12) {
    throw SimulationError("mass matrix ill conditioned", env.time);
  }

  ForceVector xdot = lu.solve(a.F);

  ElementInflow inflow = relative_inflow(env.wind_speed, s.surge_rate, s.pitch,
                                         s.pitch_rate, p);
  double power = aero_power(p, surfaces.power, s.rotor_speed, blade_pitch,
                            inflow.blade);
  double rotor_side_torque = p.gear_ratio * generator_torque;
  double omega_dot = rotor_accel(power, s.rotor_speed, rotor_side_torque,
                                 p.drivetrain_inertia(), p.rotor_speed_floor);

  return {xdot(0), xdot(1), xdot(2), xdot(3), xdot(4), xdot(5), omega_dot};
}

}  // namespace fowt
