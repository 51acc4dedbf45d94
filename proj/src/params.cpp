#include "fowt/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fowt/common.hpp"

namespace fowt {

namespace {

// Angle-valued keys accept either "<key>" in radians or "<key>_deg".
double angle_key(const ConfigText& cfg, const std::string& key) {
  if (cfg.has(key + "_deg")) return deg_to_rad(cfg.require_double(key + "_deg"));
  return cfg.require_double(key);
}

double angle_key_or(const ConfigText& cfg, const std::string& key,
                    double fallback) {
  if (cfg.has(key + "_deg")) return deg_to_rad(cfg.require_double(key + "_deg"));
  if (cfg.has(key)) return cfg.require_double(key);
  return fallback;
}

void check_finite(const std::string& key, double v) {
  if (!std::isfinite(v)) throw ConfigError(key + ": value is not finite");
}

}  // namespace

ParameterSet load_parameters(const ConfigText& cfg) {
  ParameterSet p;
  auto req = [&](const char* key) {
    double v = cfg.require_double(key);
    check_finite(key, v);
    return v;
  };
  auto opt = [&](const char* key, double fallback) {
    double v = cfg.get_double(key, fallback);
    check_finite(key, v);
    return v;
  };

  p.surge_mass = req("M_X");
  p.heave_mass = req("M_Y");
  p.coupled_moment = req("M_d");
  p.nacelle_mass = req("M_n");
  p.platform_mass = req("M_p");
  p.structure_mass = req("M_s");
  p.total_inertia = req("J_TOT");

  p.nacelle_arm_v = req("d_nv");
  p.nacelle_arm_h = req("d_nh");
  p.platform_arm_v = req("d_pv");
  p.platform_arm_h = req("d_ph");
  p.buoyancy_arm = req("d_G");
  p.hub_arm = req("d_blade");
  p.tower_arm = opt("arm_tower", 0.0);
  p.nacelle_drag_arm = opt("arm_nacelle", p.hub_arm);

  p.rotor_radius = req("R_rotor");
  p.rotor_area = req("A_blade");
  p.tower_area = req("A_tower");
  p.nacelle_area = req("A_nacelle");
  p.submerged_volume = req("V_g");

  p.air_density = req("rho_air");
  p.water_density = req("rho_water");
  p.gravity = req("g");

  p.tower_drag_coeff = req("C_tower");
  p.nacelle_drag_coeff = req("C_nacelle");

  p.inertia_coeff = opt("C_m", 2.0);
  p.drag_coeff_surge = opt("C_d_surge", 0.7);
  p.drag_coeff_heave = opt("C_d_heave", 1.0);
  p.platform_radius = opt("platform_radius", 9.0);
  p.column_top = opt("column_top", 0.0);
  p.column_keel = opt("column_keel", 0.0);
  p.hydro_strips = static_cast<int>(cfg.get_int("hydro_strips", 8));

  int n_rods = static_cast<int>(cfg.get_int("n_tie_rods", 0));
  for (int i = 1; i <= n_rods; ++i) {
    std::string base = "tie_rod_" + std::to_string(i) + "_";
    TieRodSpec rod;
    rod.attach_x = req((base + "attach_x").c_str());
    rod.attach_z = req((base + "attach_z").c_str());
    rod.anchor_x = req((base + "anchor_x").c_str());
    rod.anchor_z = req((base + "anchor_z").c_str());
    rod.unstretched_length = req((base + "L0").c_str());
    rod.stiffness = req((base + "k").c_str());
    rod.mass_per_length = req((base + "lambda_l").c_str());
    rod.radius = req((base + "r_l").c_str());
    p.tie_rods.push_back(rod);
  }

  p.rotor_inertia = req("J_R");
  p.generator_inertia = req("J_G");
  p.gear_ratio = req("eta_G");
  p.rated_power = req("P_0");
  p.rated_torque = req("T_E_rated");

  if (cfg.has("omega_0_rpm")) {
    p.rated_rotor_speed = rpm_to_rad_s(cfg.require_double("omega_0_rpm"));
  } else {
    p.rated_rotor_speed = req("omega_0");
  }
  p.servo_frequency = opt("omega_phi", 0.6);
  p.servo_damping = opt("zeta_phi", 0.7);
  p.schedule_pitch = angle_key(cfg, "beta_k");
  p.proportional_scale = req("a_p");
  p.integral_scale = req("a_i");
  p.derivative_gain = req("K_d");
  p.pitch_sensitivity = req("pitch_sensitivity");
  p.pitch_rate_limit = angle_key(cfg, "pitch_rate_limit");
  p.pitch_min = angle_key_or(cfg, "pitch_min", 0.0);
  p.pitch_max = angle_key_or(cfg, "pitch_max", kPi / 2.0);

  std::string mode = cfg.get_string("integral_mode", "average");
  if (mode == "average") {
    p.integral_mode = IntegralMode::kRunningAverage;
  } else if (mode == "plain") {
    p.integral_mode = IntegralMode::kPlain;
  } else {
    throw ConfigError("integral_mode must be 'average' or 'plain', got '" +
                      mode + "'");
  }
  p.anti_windup = cfg.get_int("anti_windup", 1) != 0;
  p.derivative_filter_tau = opt("derivative_filter_tau", 0.0);

  p.heave_offset = req("heave_offset");
  p.equilibrium_heave = opt("equilibrium_heave", p.heave_offset);
  p.rotor_speed_floor = opt("omega_floor", 0.1);
  p.mean_surge_position = opt("mean_surge", 0.0);

  auto diags = validate(p);
  if (!diags.empty()) throw ConfigError(diags.front());
  return p;
}

ParameterSet load_parameters_text(const std::string& text) {
  ConfigText cfg;
  cfg.merge_text(text);
  return load_parameters(cfg);
}

ParameterSet load_parameters_file(const std::string& path) {
  ConfigText cfg;
  cfg.merge_file(path);
  return load_parameters(cfg);
}

std::vector<std::string> validate(const ParameterSet& p) {
  std::vector<std::string> out;
  auto positive = [&](const char* key, double v) {
    if (!(v > 0.0)) out.push_back(std::string(key) + " must be positive");
  };
  positive("M_X", p.surge_mass);
  positive("M_Y", p.heave_mass);
  positive("M_n", p.nacelle_mass);
  positive("M_p", p.platform_mass);
  positive("M_s", p.structure_mass);
  positive("J_TOT", p.total_inertia);
  positive("R_rotor", p.rotor_radius);
  positive("A_blade", p.rotor_area);
  positive("A_tower", p.tower_area);
  positive("A_nacelle", p.nacelle_area);
  positive("V_g", p.submerged_volume);
  positive("rho_air", p.air_density);
  positive("rho_water", p.water_density);
  positive("g", p.gravity);
  positive("J_R", p.rotor_inertia);
  positive("J_G", p.generator_inertia);
  positive("eta_G", p.gear_ratio);
  positive("P_0", p.rated_power);
  positive("T_E_rated", p.rated_torque);
  positive("omega_0", p.rated_rotor_speed);
  positive("omega_phi", p.servo_frequency);
  positive("zeta_phi", p.servo_damping);
  positive("beta_k", p.schedule_pitch);
  positive("pitch_sensitivity", p.pitch_sensitivity);
  positive("pitch_rate_limit", p.pitch_rate_limit);
  positive("omega_floor", p.rotor_speed_floor);

  if (!(p.pitch_min >= 0.0 && p.pitch_min < p.pitch_max &&
        p.pitch_max <= kPi / 2.0 + 1e-12)) {
    out.push_back("pitch range must satisfy 0 <= pitch_min < pitch_max <= pi/2");
  }
  if (p.hydro_strips < 1) out.push_back("hydro_strips must be positive");
  if (p.column_keel < p.column_top) {
    out.push_back("column_keel must be at or below column_top");
  }
  int i = 0;
  for (const auto& rod : p.tie_rods) {
    ++i;
    std::string base = "tie_rod_" + std::to_string(i) + "_";
    if (!(rod.unstretched_length > 0.0)) out.push_back(base + "L0 must be positive");
    if (!(rod.stiffness > 0.0)) out.push_back(base + "k must be positive");
    if (rod.mass_per_length < 0.0) out.push_back(base + "lambda_l must be nonnegative");
    if (rod.radius < 0.0) out.push_back(base + "r_l must be nonnegative");
  }
  return out;
}

std::string serialize_parameters(const ParameterSet& p) {
  ConfigText c;
  c.set_double("M_X", p.surge_mass);
  c.set_double("M_Y", p.heave_mass);
  c.set_double("M_d", p.coupled_moment);
  c.set_double("M_n", p.nacelle_mass);
  c.set_double("M_p", p.platform_mass);
  c.set_double("M_s", p.structure_mass);
  c.set_double("J_TOT", p.total_inertia);
  c.set_double("d_nv", p.nacelle_arm_v);
  c.set_double("d_nh", p.nacelle_arm_h);
  c.set_double("d_pv", p.platform_arm_v);
  c.set_double("d_ph", p.platform_arm_h);
  c.set_double("d_G", p.buoyancy_arm);
  c.set_double("d_blade", p.hub_arm);
  c.set_double("arm_tower", p.tower_arm);
  c.set_double("arm_nacelle", p.nacelle_drag_arm);
  c.set_double("R_rotor", p.rotor_radius);
  c.set_double("A_blade", p.rotor_area);
  c.set_double("A_tower", p.tower_area);
  c.set_double("A_nacelle", p.nacelle_area);
  c.set_double("V_g", p.submerged_volume);
  c.set_double("rho_air", p.air_density);
  c.set_double("rho_water", p.water_density);
  c.set_double("g", p.gravity);
  c.set_double("C_tower", p.tower_drag_coeff);
  c.set_double("C_nacelle", p.nacelle_drag_coeff);
  c.set_double("C_m", p.inertia_coeff);
  c.set_double("C_d_surge", p.drag_coeff_surge);
  c.set_double("C_d_heave", p.drag_coeff_heave);
  c.set_double("platform_radius", p.platform_radius);
  c.set_double("column_top", p.column_top);
  c.set_double("column_keel", p.column_keel);
  c.set_int("hydro_strips", p.hydro_strips);
  c.set_int("n_tie_rods", static_cast<long long>(p.tie_rods.size()));
  int i = 0;
  for (const auto& rod : p.tie_rods) {
    ++i;
    std::string base = "tie_rod_" + std::to_string(i) + "_";
    c.set_double(base + "attach_x", rod.attach_x);
    c.set_double(base + "attach_z", rod.attach_z);
    c.set_double(base + "anchor_x", rod.anchor_x);
    c.set_double(base + "anchor_z", rod.anchor_z);
    c.set_double(base + "L0", rod.unstretched_length);
    c.set_double(base + "k", rod.stiffness);
    c.set_double(base + "lambda_l", rod.mass_per_length);
    c.set_double(base + "r_l", rod.radius);
  }
  c.set_double("J_R", p.rotor_inertia);
  c.set_double("J_G", p.generator_inertia);
  c.set_double("eta_G", p.gear_ratio);
  c.set_double("P_0", p.rated_power);
  c.set_double("T_E_rated", p.rated_torque);
  c.set_double("omega_0", p.rated_rotor_speed);
  c.set_double("omega_phi", p.servo_frequency);
  c.set_double("zeta_phi", p.servo_damping);
  c.set_double("beta_k", p.schedule_pitch);
  c.set_double("a_p", p.proportional_scale);
  c.set_double("a_i", p.integral_scale);
  c.set_double("K_d", p.derivative_gain);
  c.set_double("pitch_sensitivity", p.pitch_sensitivity);
  c.set_double("pitch_rate_limit", p.pitch_rate_limit);
  c.set_double("pitch_min", p.pitch_min);
  c.set_double("pitch_max", p.pitch_max);
  c.set("integral_mode",
        p.integral_mode == IntegralMode::kPlain ? "plain" : "average");
  c.set_int("anti_windup", p.anti_windup ? 1 : 0);
  c.set_double("derivative_filter_tau", p.derivative_filter_tau);
  c.set_double("heave_offset", p.heave_offset);
  c.set_double("equilibrium_heave", p.equilibrium_heave);
  c.set_double("omega_floor", p.rotor_speed_floor);
  c.set_double("mean_surge", p.mean_surge_position);
  return c.serialize();
}

std::uint64_t parameter_fingerprint(const ParameterSet& p) {
  return fnv1a64(serialize_parameters(p));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void check_axis(const std::vector<double>& axis, const std::string& name,
                const std::string& table) {
  if (axis.size() < 2) {
    throw ConfigError(table + ": " + name + " axis needs at least 2 nodes");
  }
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw ConfigError(table + ": " + name + " axis must be strictly increasing");
    }
  }
}

}  // namespace

CoefficientSurface load_surface(std::istream& in, SurfaceKind kind,
                                const std::string& name) {
  CoefficientSurface s;
  s.kind = kind;
  double lo = 0.0;
  double hi = kind == SurfaceKind::kPower ? 0.593 : 2.0;
  const char* what = kind == SurfaceKind::kPower ? "power" : "thrust";

  std::string line;
  bool have_header = false;
  bool pitch_in_degrees = true;
  std::size_t n_pitch = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (!have_header) {
      // Corner token declares the pitch axis unit.
      const std::string& corner = fields[0];
      if (corner.size() >= 4 && corner.substr(corner.size() - 4) == "_rad") {
        pitch_in_degrees = false;
      }
      for (std::size_t j = 1; j < fields.size(); ++j) {
        double b = parse_double(fields[j], name + " pitch axis");
        s.pitch_grid.push_back(pitch_in_degrees ? deg_to_rad(b) : b);
      }
      n_pitch = s.pitch_grid.size();
      have_header = true;
      continue;
    }
    if (fields.size() != n_pitch + 1) {
      throw ConfigError(name + " line " + std::to_string(lineno) + ": has " +
                        std::to_string(fields.size() - 1) +
                        " values, expected " + std::to_string(n_pitch));
    }
    s.tsr_grid.push_back(parse_double(fields[0], name + " tip speed ratio"));
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = parse_double(fields[j], name + " value");
      if (!(v >= lo && v <= hi)) {
        throw ConfigError(name + " line " + std::to_string(lineno) + ": " +
                          what + " coefficient " + fields[j] +
                          " out of range [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
      }
      s.values.push_back(v);
    }
  }
  if (!have_header) throw ConfigError(name + ": empty table");
  check_axis(s.tsr_grid, "tip speed ratio", name);
  check_axis(s.pitch_grid, "pitch", name);
  return s;
}

CoefficientSurface load_surface_file(const std::string& path, SurfaceKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open coefficient table: " + path);
  return load_surface(in, kind, path);
}

CoefficientSurface load_surface_text(const std::string& text, SurfaceKind kind) {
  std::istringstream in(text);
  return load_surface(in, kind, "table");
}

CoefficientSurface::Sample CoefficientSurface::interpolate(double tsr,
                                                           double pitch) const {
  Sample out;
  double x = tsr;
  double y = pitch;
  if (x < tsr_grid.front()) { x = tsr_grid.front(); out.clamped = true; }
  if (x > tsr_grid.back())  { x = tsr_grid.back();  out.clamped = true; }
  if (y < pitch_grid.front()) { y = pitch_grid.front(); out.clamped = true; }
  if (y > pitch_grid.back())  { y = pitch_grid.back();  out.clamped = true; }

  auto cell = [](const std::vector<double>& axis, double v) {
    std::size_t i = std::upper_bound(axis.begin(), axis.end(), v) - axis.begin();
    if (i == 0) return std::size_t{0};
    if (i >= axis.size()) return axis.size() - 2;
    return i - 1;
  };
  std::size_t i = cell(tsr_grid, x);
  std::size_t j = cell(pitch_grid, y);
  double tx = (x - tsr_grid[i]) / (tsr_grid[i + 1] - tsr_grid[i]);
  double ty = (y - pitch_grid[j]) / (pitch_grid[j + 1] - pitch_grid[j]);
  // Endpoint special cases keep grid nodes exactly reproducible.
  auto lerp = [](double u, double v0, double v1) {
    if (u == 0.0) return v0;
    if (u == 1.0) return v1;
    return v0 + u * (v1 - v0);
  };
  double a = lerp(tx, at(i, j), at(i + 1, j));
  double b = lerp(tx, at(i, j + 1), at(i + 1, j + 1));
  out.value = lerp(ty, a, b);
  return out;
}

}  // namespace fowt
