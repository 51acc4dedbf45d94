#include "fowt/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "fowt/common.hpp"
#include "fowt/rng.hpp"

namespace fowt {

namespace fs = std::filesystem;

SimConfig campaign_run_config(const CampaignSpec& spec, int run_index) {
  SimConfig sc = spec.sim;
  sc.wind.seed = mix_seed(spec.base_seed, static_cast<std::uint64_t>(run_index),
                          kWindStream);
  sc.wave.seed = mix_seed(spec.base_seed, static_cast<std::uint64_t>(run_index),
                          kWaveStream);
  return sc;
}

std::string serialize_trajectory(const Trajectory& traj) {
  std::string out = "# fowt-trajectory-1\n";
  for (int c = 0; c < kNumColumns; ++c) {
    if (c > 0) out += '\t';
    out += kColumnNames[c];
  }
  out += '\n';
  char buf[40];
  for (std::size_t r = 0; r < traj.rows(); ++r) {
    for (int c = 0; c < kNumColumns; ++c) {
      if (c > 0) out += '\t';
      std::snprintf(buf, sizeof(buf), "%.17g", traj.cols[c][r]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string manifest_path_for(const std::string& path) {
  return path + ".manifest";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << content;
    if (!out) throw IoError("write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

void column_extremes(const Trajectory& traj,
                     std::array<double, kNumColumns>& mins,
                     std::array<double, kNumColumns>& maxs) {
  for (int c = 0; c < kNumColumns; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : traj.cols[c]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    mins[c] = lo;
    maxs[c] = hi;
  }
}

}  // namespace

void persist_trajectory(const Trajectory& traj, const std::string& path) {
  const std::string data = serialize_trajectory(traj);
  const std::uint64_t checksum = fnv1a64(data);
  write_file_atomic(path, data);

  ConfigText side = traj.manifest;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(checksum));
  side.set("checksum", buf);
  side.set_int("rows", static_cast<long long>(traj.rows()));
  write_file_atomic(manifest_path_for(path), side.serialize());
}

Trajectory load_trajectory(const std::string& path) {
  Trajectory traj;
  traj.manifest.merge_text(read_file(manifest_path_for(path)));
  const std::string format = traj.manifest.get_string("format", "");
  if (format != "fowt-trajectory-1") {
    throw IoError("unsupported trajectory format '" + format + "' in " + path);
  }
  const std::string data = read_file(path);
  const std::string want = traj.manifest.get_string("checksum", "");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  if (want != buf) {
    throw IoError("checksum mismatch for " + path);
  }

  std::istringstream in(data);
  std::string line;
  if (!std::getline(in, line) || line != "# fowt-trajectory-1") {
    throw IoError("bad data header in " + path);
  }
  if (!std::getline(in, line)) throw IoError("missing column header in " + path);
  {
    std::istringstream hs(line);
    std::string name;
    int c = 0;
    while (hs >> name) {
      if (c >= kNumColumns || name != kColumnNames[c]) {
        throw IoError("column mismatch in " + path + ": " + name);
      }
      ++c;
    }
    if (c != kNumColumns) throw IoError("missing columns in " + path);
  }
  std::size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream rs(line);
    for (int c = 0; c < kNumColumns; ++c) {
      std::string tok;
      if (!(rs >> tok)) {
        throw IoError("short row " + std::to_string(row) + " in " + path);
      }
      traj.cols[c].push_back(
          parse_double(tok, path + " row " + std::to_string(row)));
    }
  }
  if (traj.manifest.has("failure_cause")) {
    traj.failure = FailureRecord{traj.manifest.require("failure_cause"),
                                 traj.manifest.require_double("failure_time")};
  }
  return traj;
}

namespace {

RunRecord record_from(const Trajectory& traj, int index,
                      const SimConfig& run_cfg, std::uint64_t checksum,
                      const std::string& path) {
  RunRecord rec;
  rec.index = index;
  rec.wind_seed = run_cfg.wind.seed;
  rec.wave_seed = run_cfg.wave.seed;
  if (traj.failure) {
    rec.failed = true;
    rec.failure_cause = traj.failure->cause;
    rec.failure_time = traj.failure->time;
  }
  column_extremes(traj, rec.min_value, rec.max_value);
  rec.checksum = checksum;
  rec.path = path;
  return rec;
}

void annotate_run_manifest(Trajectory& traj, const RunRecord& rec) {
  traj.manifest.set_int("run_index", rec.index);
  traj.manifest.set_uint("run_wind_seed", rec.wind_seed);
  traj.manifest.set_uint("run_wave_seed", rec.wave_seed);
  for (int c = 0; c < kNumColumns; ++c) {
    traj.manifest.set_double(std::string("min_") + kColumnNames[c],
                             rec.min_value[c]);
    traj.manifest.set_double(std::string("max_") + kColumnNames[c],
                             rec.max_value[c]);
  }
}

// Rebuilds a record from a persisted run if the file verifies; used for
// campaign resume.
bool try_resume(const std::string& path, int index, RunRecord& rec) {
  std::error_code ec;
  if (!fs::exists(path, ec) || !fs::exists(manifest_path_for(path), ec)) {
    return false;
  }
  ConfigText side;
  try {
    side.merge_text(read_file(manifest_path_for(path)));
    const std::string data = read_file(path);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    if (side.get_string("checksum", "") != buf) return false;
    rec.index = index;
    rec.wind_seed = side.get_uint("run_wind_seed", 0);
    rec.wave_seed = side.get_uint("run_wave_seed", 0);
    rec.failed = side.has("failure_cause");
    if (rec.failed) {
      rec.failure_cause = side.require("failure_cause");
      rec.failure_time = side.require_double("failure_time");
    }
    for (int c = 0; c < kNumColumns; ++c) {
      rec.min_value[c] =
          side.require_double(std::string("min_") + kColumnNames[c]);
      rec.max_value[c] =
          side.require_double(std::string("max_") + kColumnNames[c]);
    }
    rec.checksum = fnv1a64(data);
    rec.path = path;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::string run_path(const std::string& out_dir, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "run_%04d.tsv", index);
  return (fs::path(out_dir) / "runs" / name).string();
}

void write_index(const std::string& out_dir,
                 const std::vector<RunRecord>& records) {
  std::string text =
      "run\twind_seed\twave_seed\tstatus\tfailure_time\tchecksum\tpath";
  for (int c = 0; c < kNumColumns; ++c) {
    text += std::string("\tmin_") + kColumnNames[c] + "\tmax_" +
            kColumnNames[c];
  }
  text += '\n';
  char buf[64];
  for (const auto& rec : records) {
    std::snprintf(buf, sizeof(buf), "%d\t%llu\t%llu\t", rec.index,
                  static_cast<unsigned long long>(rec.wind_seed),
                  static_cast<unsigned long long>(rec.wave_seed));
    text += buf;
    text += rec.failed ? ("failed:" + rec.failure_cause) : "ok";
    std::snprintf(buf, sizeof(buf), "\t%.17g\t%016llx\t", rec.failure_time,
                  static_cast<unsigned long long>(rec.checksum));
    text += buf;
    text += rec.path;
    for (int c = 0; c < kNumColumns; ++c) {
      std::snprintf(buf, sizeof(buf), "\t%.17g\t%.17g", rec.min_value[c],
                    rec.max_value[c]);
      text += buf;
    }
    text += '\n';
  }
  write_file_atomic((fs::path(out_dir) / "index.tsv").string(), text);
}

EnsembleResult run_campaign_impl(const CampaignSpec& spec,
                                 const ParameterSet& p,
                                 const Surfaces& surfaces, bool parallel) {
  if (spec.n_runs < 1) throw ConfigError("n_runs must be at least 1");
  const bool in_memory = spec.out_dir.empty();
  if (!in_memory) {
    fs::create_directories(fs::path(spec.out_dir) / "runs");
  }

  EnsembleResult result;
  result.records.resize(static_cast<std::size_t>(spec.n_runs));
  if (in_memory) {
    result.trajectories.resize(static_cast<std::size_t>(spec.n_runs));
  }

  std::mutex error_mutex;
  std::string first_error;

  auto run_one = [&](int i) {
    const SimConfig run_cfg = campaign_run_config(spec, i);
    const std::string path = in_memory ? "" : run_path(spec.out_dir, i);
    if (!in_memory && spec.resume &&
        try_resume(path, i, result.records[static_cast<std::size_t>(i)])) {
      return;
    }
    Trajectory traj = simulate(run_cfg, p, surfaces);
    const std::string data = serialize_trajectory(traj);
    RunRecord rec = record_from(traj, i, run_cfg, fnv1a64(data), path);
    annotate_run_manifest(traj, rec);
    if (!in_memory) {
      persist_trajectory(traj, path);
    } else {
      result.trajectories[static_cast<std::size_t>(i)] = std::move(traj);
    }
    result.records[static_cast<std::size_t>(i)] = std::move(rec);
  };

  if (parallel) {
    const int threads = spec.workers > 0 ? spec.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < spec.n_runs; ++i) {
      try {
        run_one(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
      }
    }
    if (!first_error.empty()) throw IoError(first_error);
  } else {
    for (int i = 0; i < spec.n_runs; ++i) run_one(i);
  }

  ConfigText& m = result.manifest;
  m.set("format", "fowt-campaign-1");
  m.set_int("n_runs", spec.n_runs);
  m.set_uint("base_seed", spec.base_seed);
  m.set("seed_mix", "splitmix64(base, run, stream)");
  sim_config_to_text(spec.sim, m);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(parameter_fingerprint(p)));
  m.set("param_fingerprint", buf);
  if (!in_memory) {
    write_index(spec.out_dir, result.records);
    ConfigText full = m;
    ConfigText params;
    params.merge_text(serialize_parameters(p));
    for (const auto& [k, v] : params.entries()) full.set("param_" + k, v);
    full.write_file((fs::path(spec.out_dir) / "campaign.cfg").string());
  }
  return result;
}

}  // namespace

EnsembleResult run_campaign(const CampaignSpec& spec, const ParameterSet& p,
                            const Surfaces& surfaces) {
  return run_campaign_impl(spec, p, surfaces, true);
}

EnsembleResult run_campaign_serial(const CampaignSpec& spec,
                                   const ParameterSet& p,
                                   const Surfaces& surfaces) {
  return run_campaign_impl(spec, p, surfaces, false);
}

std::vector<SimConfig> counterfactual_configs(const CounterfactualSpec& cf,
                                              const CampaignSpec& campaign) {
  if (cf.source_run < 0 || cf.source_run >= campaign.n_runs) {
    throw ConfigError("counterfactual source run out of range");
  }
  if (cf.repetitions < 1) {
    throw ConfigError("counterfactual repetitions must be at least 1");
  }
  if (cf.variant == VariantKind::kNone && cf.hold != HoldFactor::kWind) {
    throw ConfigError(
        "variant none removes the sea and requires hold = wind");
  }
  if (cf.variant == VariantKind::kConstant && cf.hold != HoldFactor::kWave) {
    throw ConfigError(
        "variant constant fixes the wind level and requires hold = wave");
  }

  const SimConfig source = campaign_run_config(campaign, cf.source_run);
  std::vector<SimConfig> out;
  out.reserve(static_cast<std::size_t>(cf.repetitions));
  for (int rep = 0; rep < cf.repetitions; ++rep) {
    SimConfig sc = source;
    const std::uint64_t tag =
        cf.hold == HoldFactor::kWind ? kWaveStream : kWindStream;
    const std::uint64_t seed =
        rep == 0 ? cf.variant_seed
                 : mix_seed(cf.variant_seed, static_cast<std::uint64_t>(rep),
                            tag);
    switch (cf.variant) {
      case VariantKind::kResample:
        if (cf.hold == HoldFactor::kWind) {
          sc.wave.seed = seed;
        } else {
          sc.wind.seed = seed;
        }
        break;
      case VariantKind::kConstant:
        sc.wind_mode = WindMode::kConstant;
        sc.wind_constant = cf.constant_level > 0.0 ? cf.constant_level
                                                   : sc.wind.mean_speed;
        break;
      case VariantKind::kNone:
        sc.wave_mode = WaveMode::kNone;
        break;
    }
    out.push_back(sc);
  }
  return out;
}

std::vector<Trajectory> run_counterfactual(const CounterfactualSpec& cf,
                                           const CampaignSpec& campaign,
                                           const ParameterSet& p,
                                           const Surfaces& surfaces) {
  const auto configs = counterfactual_configs(cf, campaign);
  std::vector<Trajectory> out;
  out.reserve(configs.size());
  for (const auto& sc : configs) {
    out.push_back(simulate(sc, p, surfaces));
  }
  return out;
}

}  // namespace fowt
