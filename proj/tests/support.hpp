#pragma once

#include <string>

#include "fowt/config_text.hpp"
#include "fowt/params.hpp"

namespace support {

inline std::string config_path(const std::string& name) {
  return std::string(FOWT_CONFIG_DIR) + "/" + name;
}

inline fowt::ConfigText turbine_config() {
  fowt::ConfigText cfg;
  cfg.merge_file(config_path("turbine.cfg"));
  return cfg;
}

// The shipped turbine description with one key removed, for missing-key
// and bad-value tests.
inline fowt::ConfigText turbine_config_without(const std::string& key) {
  fowt::ConfigText out;
  for (const auto& [k, v] : turbine_config().entries()) {
    if (k != key) out.set(k, v);
  }
  return out;
}

inline fowt::ParameterSet turbine_params() {
  return fowt::load_parameters(turbine_config());
}

inline fowt::Surfaces turbine_surfaces() {
  fowt::Surfaces s;
  s.power = fowt::load_surface_file(config_path("cp_table.tsv"),
                                    fowt::SurfaceKind::kPower);
  s.thrust = fowt::load_surface_file(config_path("ct_table.tsv"),
                                     fowt::SurfaceKind::kThrust);
  return s;
}

// Rated rotor speed, 12.1 rpm in rad/s.
inline constexpr double kRatedOmega = 1.2671090369478833;

}  // namespace support
