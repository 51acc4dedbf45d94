#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fowt/sim.hpp"

namespace fowt {

// Monte Carlo campaign: n_runs closed-loop simulations sharing one
// scenario template, with per-run environment seeds derived from the base
// seed. The template's own seeds are ignored.
struct CampaignSpec {
  SimConfig sim;
  int n_runs = 1;
  std::uint64_t base_seed = 1;
  std::string out_dir;  // empty keeps trajectories in memory instead
  int workers = 0;      // 0 lets the runtime pick
  bool resume = true;   // reuse persisted runs whose checksums verify
};

struct RunRecord {
  int index = 0;
  std::uint64_t wind_seed = 0;
  std::uint64_t wave_seed = 0;
  bool failed = false;
  std::string failure_cause;
  double failure_time = 0.0;
  std::array<double, kNumColumns> min_value{};
  std::array<double, kNumColumns> max_value{};
  std::uint64_t checksum = 0;
  std::string path;  // empty for in-memory campaigns
};

struct EnsembleResult {
  std::vector<RunRecord> records;
  std::vector<Trajectory> trajectories;  // filled only when out_dir is empty
  ConfigText manifest;
};

// Scenario for one campaign member: the template with that run's derived
// wind and wave seeds.
SimConfig campaign_run_config(const CampaignSpec& spec, int run_index);

// Parallel (OpenMP) and serial runners produce identical results; the
// serial one is the reference the benchmark compares against.
EnsembleResult run_campaign(const CampaignSpec& spec, const ParameterSet& p,
                            const Surfaces& surfaces);
EnsembleResult run_campaign_serial(const CampaignSpec& spec,
                                   const ParameterSet& p,
                                   const Surfaces& surfaces);

// Trajectory files: tab-separated data plus a ".manifest" sidecar carrying
// the run manifest and an FNV-1a checksum of the data bytes.
std::string serialize_trajectory(const Trajectory& traj);
void persist_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

// Factor-isolation experiment: re-run one campaign member with exactly one
// environment factor altered. The held factor keeps its original seed, so
// its recorded channel is bit-identical to the source run.
enum class HoldFactor { kWind, kWave };
enum class VariantKind {
  kResample,  // new seed for the non-held factor
  kConstant,  // steady wind at a fixed level (hold = wave only)
  kNone,      // remove the sea entirely (hold = wind only)
};

struct CounterfactualSpec {
  int source_run = 0;
  HoldFactor hold = HoldFactor::kWind;
  VariantKind variant = VariantKind::kResample;
  double constant_level = 0.0;  // m/s; 0 means the template mean wind
  int repetitions = 1;
  // Seed for resampled factors. Repetition 0 uses it directly, so passing
  // the source run's own seed reproduces the source exactly; later
  // repetitions mix in the repetition index.
  std::uint64_t variant_seed = 0;
};

std::vector<SimConfig> counterfactual_configs(const CounterfactualSpec& cf,
                                              const CampaignSpec& campaign);
std::vector<Trajectory> run_counterfactual(const CounterfactualSpec& cf,
                                           const CampaignSpec& campaign,
                                           const ParameterSet& p,
                                           const Surfaces& surfaces);

}  // namespace fowt
