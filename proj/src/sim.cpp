#include "fowt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "fowt/common.hpp"
#include "fowt/control.hpp"

namespace fowt {

const std::array<const char*, kNumColumns> kColumnNames = {
    "t",
    "surge",
    "surge_rate",
    "heave",
    "heave_rate",
    "pitch",
    "pitch_rate",
    "rotor_speed",
    "blade_pitch",
    "gen_torque",
    "aero_power",
    "wind_speed",
    "wave_elevation",
    "wave_force_surge",
    "wave_force_heave",
    "wave_force_pitch",
    "drag_force_surge",
    "drag_force_heave",
    "drag_force_pitch",
};

SimConfig sim_config_from_text(const ConfigText& cfg) {
  SimConfig sc;
  sc.dt = cfg.get_double("dt", sc.dt);
  sc.duration = cfg.get_double("duration", sc.duration);
  sc.decimation = static_cast<int>(cfg.get_int("decimation", sc.decimation));
  if (sc.dt <= 0.0) throw ConfigError("dt must be positive");
  if (sc.duration <= 0.0) throw ConfigError("duration must be positive");
  if (sc.decimation < 1) throw ConfigError("decimation must be at least 1");

  const std::string controller = cfg.get_string("controller", "off");
  if (controller == "on") {
    sc.controller_on = true;
  } else if (controller == "off") {
    sc.controller_on = false;
  } else {
    throw ConfigError("controller must be on or off, got '" + controller + "'");
  }
  sc.fixed_blade_pitch = deg_to_rad(cfg.get_double("blade_pitch_deg", 0.0));
  sc.fixed_gen_torque = cfg.get_double("gen_torque", 0.0);
  const std::string torque = cfg.get_string("torque_mode", "constant_power");
  if (torque == "constant_power") {
    sc.region3_torque = true;
  } else if (torque == "constant") {
    sc.region3_torque = false;
  } else {
    throw ConfigError("torque_mode must be constant_power or constant, got '" +
                      torque + "'");
  }

  const std::string wind = cfg.get_string("wind_mode", "constant");
  if (wind == "constant") {
    sc.wind_mode = WindMode::kConstant;
  } else if (wind == "synthetic") {
    sc.wind_mode = WindMode::kSynthetic;
  } else if (wind == "replay") {
    sc.wind_mode = WindMode::kReplay;
  } else {
    throw ConfigError("wind_mode must be constant, synthetic or replay, got '" +
                      wind + "'");
  }
  sc.wind_constant = cfg.get_double("wind_speed", sc.wind_constant);
  sc.wind.mean_speed = cfg.get_double("U_ref", sc.wind.mean_speed);
  sc.wind.turbulence_std = cfg.get_double("sigma_u", sc.wind.turbulence_std);
  sc.wind.length_scale = cfg.get_double("L_u", sc.wind.length_scale);
  sc.wind.dt = cfg.get_double("wind_dt", sc.dt);
  sc.wind.duration = cfg.get_double("wind_duration", sc.duration);
  sc.wind.seed = cfg.get_uint("wind_seed", sc.wind.seed);
  sc.wind_file = cfg.get_string("wind_file", "");
  if (sc.wind_mode == WindMode::kReplay && sc.wind_file.empty()) {
    throw ConfigError("wind_mode replay requires wind_file");
  }

  const std::string wave = cfg.get_string("wave_mode", "none");
  if (wave == "none") {
    sc.wave_mode = WaveMode::kNone;
  } else if (wave == "sea") {
    sc.wave_mode = WaveMode::kSea;
  } else {
    throw ConfigError("wave_mode must be none or sea, got '" + wave + "'");
  }
  sc.wave.wind_speed = cfg.get_double("U_wave", sc.wave.wind_speed);
  sc.wave.n_components =
      static_cast<int>(cfg.get_int("wave_components", sc.wave.n_components));
  sc.wave.omega_min = cfg.get_double("wave_omega_min", sc.wave.omega_min);
  sc.wave.omega_max = cfg.get_double("wave_omega_max", sc.wave.omega_max);
  sc.wave.seed = cfg.get_uint("wave_seed", sc.wave.seed);

  const std::string init = cfg.get_string("initial_state", "equilibrium");
  if (init == "explicit") {
    ReportedState r;
    r.surge = cfg.get_double("init_surge", 0.0);
    r.surge_rate = cfg.get_double("init_surge_rate", 0.0);
    r.heave = cfg.get_double("init_heave", 0.0);
    r.heave_rate = cfg.get_double("init_heave_rate", 0.0);
    r.pitch = deg_to_rad(cfg.get_double("init_pitch_deg", 0.0));
    r.pitch_rate = deg_to_rad(cfg.get_double("init_pitch_rate_deg", 0.0));
    r.rotor_speed = rpm_to_rad_s(cfg.get_double("init_rotor_rpm", 0.0));
    sc.initial_reported = r;
  } else if (init != "equilibrium") {
    throw ConfigError("initial_state must be equilibrium or explicit, got '" +
                      init + "'");
  }
  if (cfg.has("initial_beta_deg")) {
    sc.initial_blade_pitch = deg_to_rad(cfg.require_double("initial_beta_deg"));
  }
  return sc;
}

void sim_config_to_text(const SimConfig& sc, ConfigText& out) {
  out.set_double("dt", sc.dt);
  out.set_double("duration", sc.duration);
  out.set_int("decimation", sc.decimation);
  out.set("controller", sc.controller_on ? "on" : "off");
  out.set_double("blade_pitch_deg", rad_to_deg(sc.fixed_blade_pitch));
  out.set_double("gen_torque", sc.fixed_gen_torque);
  out.set("torque_mode", sc.region3_torque ? "constant_power" : "constant");
  switch (sc.wind_mode) {
    case WindMode::kConstant:
      out.set("wind_mode", "constant");
      break;
    case WindMode::kSynthetic:
      out.set("wind_mode", "synthetic");
      break;
    case WindMode::kReplay:
      out.set("wind_mode", "replay");
      break;
  }
  out.set_double("wind_speed", sc.wind_constant);
  out.set_double("U_ref", sc.wind.mean_speed);
  out.set_double("sigma_u", sc.wind.turbulence_std);
  out.set_double("L_u", sc.wind.length_scale);
  out.set_double("wind_dt", sc.wind.dt);
  out.set_double("wind_duration", sc.wind.duration);
  out.set_uint("wind_seed", sc.wind.seed);
  if (!sc.wind_file.empty()) out.set("wind_file", sc.wind_file);
  out.set("wave_mode", sc.wave_mode == WaveMode::kSea ? "sea" : "none");
  out.set_double("U_wave", sc.wave.wind_speed);
  out.set_int("wave_components", sc.wave.n_components);
  out.set_double("wave_omega_min", sc.wave.omega_min);
  out.set_double("wave_omega_max", sc.wave.omega_max);
  out.set_uint("wave_seed", sc.wave.seed);
  if (sc.initial_blade_pitch) {
    out.set_double("initial_beta_deg", rad_to_deg(*sc.initial_blade_pitch));
  }
}

double solve_rotor_balance(const ParameterSet& p, const Surfaces& surfaces,
                           double wind_speed, double blade_pitch,
                           double rotor_side_torque) {
  if (wind_speed <= 0.0) {
    throw SimulationError("rotor balance needs positive wind", 0.0);
  }
  // Imbalance between captured torque and the applied resisting torque.
  auto imbalance = [&](double omega) {
    const double pa = aero_power(p, surfaces.power, omega, blade_pitch,
                                 wind_speed, nullptr);
    return pa / std::max(omega, p.rotor_speed_floor) - rotor_side_torque;
  };
  // Scan from the top of the coefficient grid downward; the first sign
  // change met from above is the attracting balance point.
  const double omega_top =
      surfaces.power.tsr_grid.back() * wind_speed / p.rotor_radius;
  const double omega_bot = p.rotor_speed_floor;
  if (omega_top <= omega_bot) {
    throw SimulationError("rotor balance scan range is empty", 0.0);
  }
  const int n = 400;
  double prev_omega = omega_top;
  double prev_g = imbalance(prev_omega);
  if (prev_g > 0.0) {
    throw SimulationError("rotor balance lies above the coefficient grid", 0.0);
  }
  double lo = 0.0, hi = 0.0;
  bool found = false;
  for (int i = 1; i <= n; ++i) {
    const double omega = omega_top + (omega_bot - omega_top) * i / n;
    const double g = imbalance(omega);
    if (g > 0.0) {
      lo = omega;      // imbalance positive: rotor accelerates
      hi = prev_omega; // imbalance negative: rotor decelerates
      found = true;
      break;
    }
    prev_omega = omega;
    prev_g = g;
  }
  (void)prev_g;
  if (!found) {
    throw SimulationError("no rotor torque balance in the coefficient grid", 0.0);
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (imbalance(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

StateVector find_static_equilibrium(const ParameterSet& p,
                                    const Surfaces& surfaces,
                                    double wind_speed, double blade_pitch,
                                    double rotor_speed) {
  StateVector s;
  s.heave = p.equilibrium_heave;
  s.rotor_speed = rotor_speed;
  const EnvSample env{wind_speed, nullptr, 0.0};

  auto residual = [&](const StateVector& st) {
    const auto asm_ = assemble(st, env, blade_pitch, p, surfaces);
    const Channels q = asm_.breakdown.total();
    return Eigen::Vector3d(q.surge, q.heave, q.pitch);
  };

  // Newton iteration on (surge, heave, pitch) with a central-difference
  // Jacobian. Scales chosen against the dominant forces so the stopping
  // test is meaningful across configurations.
  const double force_tol = 1e-6 * std::max(1.0, p.total_mass() * p.gravity * 1e-6);
  const double moment_tol = force_tol * std::max(1.0, std::abs(p.hub_arm));
  for (int iter = 0; iter < 60; ++iter) {
    const Eigen::Vector3d r = residual(s);
    if (std::abs(r(0)) < force_tol && std::abs(r(1)) < force_tol &&
        std::abs(r(2)) < moment_tol) {
      return s;
    }
    Eigen::Matrix3d jac;
    const double h_lin = 1e-4;
    const double h_ang = 1e-6;
    for (int j = 0; j < 3; ++j) {
      StateVector hi = s, lo = s;
      double h = (j == 2) ? h_ang : h_lin;
      if (j == 0) {
        hi.surge += h;
        lo.surge -= h;
      } else if (j == 1) {
        hi.heave += h;
        lo.heave -= h;
      } else {
        hi.pitch += h;
        lo.pitch -= h;
      }
      jac.col(j) = (residual(hi) - residual(lo)) / (2.0 * h);
    }
    const Eigen::Vector3d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) {
      throw SimulationError("equilibrium solve produced a non-finite step", 0.0);
    }
    // Damp very large steps so a poor starting point cannot overshoot
    // into capsize territory.
    double scale = 1.0;
    const double max_lin = 25.0, max_ang = 0.2;
    scale = std::min(scale, max_lin / std::max(max_lin, std::abs(step(0))));
    scale = std::min(scale, max_lin / std::max(max_lin, std::abs(step(1))));
    scale = std::min(scale, max_ang / std::max(max_ang, std::abs(step(2))));
    s.surge += scale * step(0);
    s.heave += scale * step(1);
    s.pitch += scale * step(2);
  }
  throw SimulationError("static equilibrium did not converge", 0.0);
}

double trim_pitch(const ParameterSet& p, const Surfaces& surfaces,
                  double wind_speed) {
  const double omega0 = p.rated_rotor_speed;
  const double tsr = omega0 * p.rotor_radius / wind_speed;
  const double cp_req = p.rated_power / (0.5 * p.air_density * p.rotor_area *
                                         wind_speed * wind_speed * wind_speed);
  auto cp_at = [&](double beta) {
    return surfaces.power.interpolate(tsr, beta).value;
  };
  if (cp_at(p.pitch_min) <= cp_req) {
    return p.pitch_min;  // below rated: full power is not reachable
  }
  // Scan for the first bracket where the captured power drops through the
  // requirement, then bisect inside it.
  const int n = 180;
  double lo = p.pitch_min, hi = p.pitch_max;
  bool found = false;
  double prev = p.pitch_min;
  for (int i = 1; i <= n; ++i) {
    const double beta = p.pitch_min + (p.pitch_max - p.pitch_min) * i / n;
    if (cp_at(beta) <= cp_req) {
      lo = prev;
      hi = beta;
      found = true;
      break;
    }
    prev = beta;
  }
  if (!found) {
    return p.pitch_max;  // even full feather captures more than rated
  }
  for (int i = 0; i < 70; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cp_at(mid) > cp_req) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

// Wind lookup that works for all three modes without branching in the
// integration loop.
struct WindSource {
  WindMode mode = WindMode::kConstant;
  double constant = 0.0;
  WindSeries series;

  double at(double t) const {
    if (mode == WindMode::kConstant) return constant;
    return series.value_at(t);
  }
  double mean() const {
    if (mode == WindMode::kConstant) return constant;
    if (mode == WindMode::kSynthetic) return series.spec.mean_speed;
    if (series.v.empty()) return 0.0;
    return std::accumulate(series.v.begin(), series.v.end(), 0.0) /
           static_cast<double>(series.v.size());
  }
};

void append_row(Trajectory& traj, double t, const StateVector& s,
                double blade_pitch, double gen_torque, const EnvSample& env,
                const ParameterSet& p, const Surfaces& surfaces) {
  const ReportedState r = to_reporting_frame(s, p.heave_offset);
  const auto asm_ = assemble(s, env, blade_pitch, p, surfaces);
  const ElementInflow inflow = relative_inflow(env.wind_speed, s.surge_rate,
                                               s.pitch, s.pitch_rate, p);
  const double power = aero_power(p, surfaces.power, s.rotor_speed, blade_pitch,
                                  inflow.blade, nullptr);
  double elevation = 0.0;
  if (env.waves != nullptr) {
    elevation = env.waves->elevation(p.mean_surge_position, env.time);
  }
  traj.cols[kColT].push_back(t);
  traj.cols[kColSurge].push_back(r.surge);
  traj.cols[kColSurgeRate].push_back(r.surge_rate);
  traj.cols[kColHeave].push_back(r.heave);
  traj.cols[kColHeaveRate].push_back(r.heave_rate);
  traj.cols[kColPitch].push_back(r.pitch);
  traj.cols[kColPitchRate].push_back(r.pitch_rate);
  traj.cols[kColRotorSpeed].push_back(r.rotor_speed);
  traj.cols[kColBladePitch].push_back(blade_pitch);
  traj.cols[kColGenTorque].push_back(gen_torque);
  traj.cols[kColAeroPower].push_back(power);
  traj.cols[kColWindSpeed].push_back(env.wind_speed);
  traj.cols[kColWaveElevation].push_back(elevation);
  traj.cols[kColWaveForceSurge].push_back(asm_.breakdown.wave.surge);
  traj.cols[kColWaveForceHeave].push_back(asm_.breakdown.wave.heave);
  traj.cols[kColWaveForcePitch].push_back(asm_.breakdown.wave.pitch);
  traj.cols[kColDragForceSurge].push_back(asm_.breakdown.hydro_drag.surge);
  traj.cols[kColDragForceHeave].push_back(asm_.breakdown.hydro_drag.heave);
  traj.cols[kColDragForcePitch].push_back(asm_.breakdown.hydro_drag.pitch);
}

void fill_manifest(Trajectory& traj, const SimConfig& sc,
                   const ParameterSet& p, const StateVector& initial,
                   double initial_pitch) {
  ConfigText& m = traj.manifest;
  m.set("format", "fowt-trajectory-1");
  std::string columns;
  for (int i = 0; i < kNumColumns; ++i) {
    if (i > 0) columns += ' ';
    columns += kColumnNames[i];
  }
  m.set("columns", columns);
  m.set("integrator", "rk4");
  m.set("rng", "splitmix64 stream mix, mt19937_64, 53 bit uniforms");
  sim_config_to_text(sc, m);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(parameter_fingerprint(p)));
  m.set("param_fingerprint", buf);
  const ReportedState r0 = to_reporting_frame(initial, p.heave_offset);
  m.set_double("init_surge", r0.surge);
  m.set_double("init_surge_rate", r0.surge_rate);
  m.set_double("init_heave", r0.heave);
  m.set_double("init_heave_rate", r0.heave_rate);
  m.set_double("init_pitch_deg", rad_to_deg(r0.pitch));
  m.set_double("init_pitch_rate_deg", rad_to_deg(r0.pitch_rate));
  m.set_double("init_rotor_rpm", r0.rotor_speed * 60.0 / (2.0 * kPi));
  m.set_double("init_blade_pitch_deg", rad_to_deg(initial_pitch));
  // Full parameter set under a prefix so a trajectory can be re-run from
  // its manifest alone.
  ConfigText params;
  params.merge_text(serialize_parameters(p));
  for (const auto& [k, v] : params.entries()) {
    m.set("param_" + k, v);
  }
}

}  // namespace

Trajectory simulate(const SimConfig& sc, const ParameterSet& p,
                    const Surfaces& surfaces) {
  WindSource wind;
  wind.mode = sc.wind_mode;
  switch (sc.wind_mode) {
    case WindMode::kConstant:
      wind.constant = sc.wind_constant;
      break;
    case WindMode::kSynthetic: {
      WindSpec spec = sc.wind;
      if (spec.duration < sc.duration) spec.duration = sc.duration;
      if (spec.dt <= 0.0) spec.dt = sc.dt;
      wind.series = synthesize_wind(spec);
      break;
    }
    case WindMode::kReplay:
      wind.series = read_wind_series(sc.wind_file);
      break;
  }

  WaveField waves;
  const bool has_waves = sc.wave_mode == WaveMode::kSea;
  if (has_waves) {
    waves = synthesize_waves(sc.wave);
  }
  const WaveField* wave_ptr = has_waves ? &waves : nullptr;

  const double mean_wind = wind.mean();

  // Starting blade pitch and torque policy.
  double beta = sc.fixed_blade_pitch;
  if (sc.controller_on) {
    beta = sc.initial_blade_pitch ? *sc.initial_blade_pitch
                                  : trim_pitch(p, surfaces, mean_wind);
  }

  StateVector state;
  if (sc.initial_state) {
    state = *sc.initial_state;
  } else if (sc.initial_reported) {
    state = from_reporting_frame(*sc.initial_reported, p.heave_offset);
  } else if (sc.controller_on) {
    // Controlled runs start on the rated operating point.
    state = find_static_equilibrium(p, surfaces, mean_wind, beta,
                                    p.rated_rotor_speed);
  } else {
    double omega = p.rated_rotor_speed;
    if (mean_wind > 0.0 && sc.fixed_gen_torque > 0.0) {
      omega = solve_rotor_balance(p, surfaces, mean_wind, beta,
                                  p.gear_ratio * sc.fixed_gen_torque);
    }
    state = find_static_equilibrium(p, surfaces, mean_wind, beta, omega);
  }

  ControllerState cs;
  cs.blade_pitch = beta;

  Trajectory traj;
  fill_manifest(traj, sc, p, state, beta);

  const long long n_steps = std::llround(sc.duration / sc.dt);
  const long long expected_rows = n_steps / sc.decimation + 2;
  for (auto& c : traj.cols) c.reserve(static_cast<std::size_t>(expected_rows));

  for (long long i = 0; i <= n_steps; ++i) {
    const double t = static_cast<double>(i) * sc.dt;
    const double v_w = wind.at(t);

    if (sc.controller_on) {
      const ControlUpdate up = control_update(cs, state.rotor_speed, sc.dt, p);
      beta = up.blade_pitch;
      cs = up.next;
    }
    double gen_torque = sc.fixed_gen_torque;
    if (sc.controller_on && sc.region3_torque) {
      gen_torque = region3_torque(p.rated_power, p.gear_ratio,
                                  state.rotor_speed, p.rotor_speed_floor)
                       .torque;
    }

    const EnvSample env{v_w, wave_ptr, t};
    if (i % sc.decimation == 0 || i == n_steps) {
      append_row(traj, t, state, beta, gen_torque, env, p, surfaces);
    }
    if (i == n_steps) break;

    auto deriv = [&](double ts, const std::array<double, 7>& x) {
      const EnvSample stage{wind.at(ts), wave_ptr, ts};
      return state_derivative(StateVector::from_array(x), stage, beta,
                              gen_torque, p, surfaces);
    };
    std::array<double, 7> next;
    try {
      next = rk4_step(state.as_array(), t, sc.dt, deriv);
    } catch (const SimulationError& e) {
      traj.failure = FailureRecord{e.cause, t};
      break;
    }
    bool finite = true;
    for (double x : next) {
      if (!std::isfinite(x)) finite = false;
    }
    if (!finite) {
      traj.failure = FailureRecord{"non-finite state", t + sc.dt};
      break;
    }
    state = StateVector::from_array(next);
    if (capsized(state)) {
      const double t_next = static_cast<double>(i + 1) * sc.dt;
      const EnvSample env_next{wind.at(t_next), wave_ptr, t_next};
      append_row(traj, t_next, state, beta, gen_torque, env_next, p, surfaces);
      traj.failure = FailureRecord{"capsize", t_next};
      break;
    }
  }

  if (traj.failure) {
    traj.manifest.set("failure_cause", traj.failure->cause);
    traj.manifest.set_double("failure_time", traj.failure->time);
  }
  return traj;
}

SteadyResult steady_state_run(const ParameterSet& p, const Surfaces& surfaces,
                              double wind_speed, double blade_pitch,
                              double gen_torque, double duration, double dt) {
  SimConfig sc;
  sc.dt = dt;
  sc.duration = duration;
  sc.controller_on = false;
  sc.fixed_blade_pitch = blade_pitch;
  sc.fixed_gen_torque = gen_torque;
  sc.wind_mode = WindMode::kConstant;
  sc.wind_constant = wind_speed;
  sc.wave_mode = WaveMode::kNone;

  SteadyResult out;
  out.trajectory = simulate(sc, p, surfaces);
  const Trajectory& traj = out.trajectory;
  SteadyReport& rep = out.report;
  rep.blade_pitch = blade_pitch;
  rep.gen_torque = gen_torque;
  if (traj.rows() == 0 || traj.failure) {
    rep.converged = false;
    rep.settling_time = duration;
    return out;
  }

  const std::size_t last = traj.rows() - 1;
  ReportedState fin;
  fin.surge = traj.col(kColSurge)[last];
  fin.surge_rate = traj.col(kColSurgeRate)[last];
  fin.heave = traj.col(kColHeave)[last];
  fin.heave_rate = traj.col(kColHeaveRate)[last];
  fin.pitch = traj.col(kColPitch)[last];
  fin.pitch_rate = traj.col(kColPitchRate)[last];
  fin.rotor_speed = traj.col(kColRotorSpeed)[last];
  rep.final_state = from_reporting_frame(fin, p.heave_offset);

  // Settling time: last instant any channel leaves its band around the
  // final value. Band is 1 percent of the final magnitude with a small
  // absolute floor per unit family.
  const std::array<Column, 7> chans = {kColSurge,     kColSurgeRate,
                                       kColHeave,     kColHeaveRate,
                                       kColPitch,     kColPitchRate,
                                       kColRotorSpeed};
  const std::array<double, 7> floors = {1e-3, 1e-4, 1e-3, 1e-4,
                                        1e-4, 1e-5, 1e-4};
  double settle = 0.0;
  for (int c = 0; c < 7; ++c) {
    const auto& col = traj.col(chans[c]);
    const double target = col[last];
    const double band = std::max(0.01 * std::abs(target), floors[c]);
    for (std::size_t k = last;; --k) {
      if (std::abs(col[k] - target) > band) {
        settle = std::max(settle, traj.col(kColT)[k]);
        break;
      }
      if (k == 0) break;
    }
  }
  rep.settling_time = settle;
  rep.converged = settle <= 0.9 * duration;
  return out;
}

}  // namespace fowt
