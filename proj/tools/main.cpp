// Command-line front end: simulate / tune / campaign / counterfactual /
// analyze / synth-env over flat config files. Every artifact directory
// receives a manifest sufficient for bit-exact replay.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fowt/analysis.hpp"
#include "fowt/common.hpp"
#include "fowt/control.hpp"
#include "fowt/ensemble.hpp"
#include "fowt/rng.hpp"
#include "fowt/sim.hpp"

namespace fs = std::filesystem;
using namespace fowt;

namespace {

struct CommonOpts {
  std::vector<std::string> configs;
  std::vector<std::string> overrides;
  std::string out;
  int workers = 0;
  long long seed = -1;  // negative means unset
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config) {
  auto* c = cmd->add_option("--config", o.configs,
                            "Config file(s), merged in order");
  if (need_config) c->required();
  cmd->add_option("--override", o.overrides,
                  "key=value override applied after config merging");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--workers", o.workers, "Worker thread count (0 = auto)")
      ->envname("FOWT_WORKERS");
  cmd->add_option("--seed", o.seed, "Base seed override");
  cmd->add_flag("--quiet", o.quiet, "Suppress progress output");
}

// Known config keys, used to reject typos in --override early.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      // parameters
      "M_X", "M_Y", "M_d", "M_n", "M_p", "M_s", "J_TOT",
      "d_nv", "d_nh", "d_pv", "d_ph", "d_G", "d_blade",
      "arm_tower", "arm_nacelle",
      "R_rotor", "A_blade", "A_tower", "A_nacelle", "V_g",
      "rho_air", "rho_water", "g",
      "C_tower", "C_nacelle", "C_m", "C_d_surge", "C_d_heave",
      "platform_radius", "column_top", "column_keel", "hydro_strips",
      "n_tie_rods",
      "J_R", "J_G", "eta_G", "P_0", "T_E_rated",
      "omega_0", "omega_0_rpm", "omega_phi", "zeta_phi",
      "beta_k", "beta_k_deg", "a_p", "a_i", "K_d", "pitch_sensitivity",
      "pitch_rate_limit", "pitch_rate_limit_deg",
      "pitch_min", "pitch_min_deg", "pitch_max", "pitch_max_deg",
      "integral_mode", "anti_windup", "derivative_filter_tau",
      "heave_offset", "equilibrium_heave", "omega_floor", "mean_surge",
      "power_table", "thrust_table",
      // simulation scenario
      "dt", "duration", "decimation", "controller",
      "blade_pitch", "blade_pitch_deg", "gen_torque", "torque_mode",
      "wind_mode", "wind_speed", "U_ref", "sigma_u", "L_u",
      "wind_dt", "wind_duration", "wind_seed", "wind_file",
      "wave_mode", "U_wave", "wave_components",
      "wave_omega_min", "wave_omega_max", "wave_seed",
      "initial_state", "init_surge", "init_surge_rate",
      "init_heave", "init_heave_rate", "init_pitch_deg",
      "init_pitch_rate_deg", "init_rotor_rpm", "initial_beta_deg",
      // campaign / counterfactual
      "n_runs", "runs", "base_seed", "resume",
      "source_run", "hold", "variant", "constant_level",
      "repetitions", "variant_seed",
      // analysis settings
      "bins", "events_channel", "events_sigma",
      // tuning settings
      "tune_points", "tune_start", "tune_max",
  };
  return keys;
}

bool tie_rod_key(const std::string& key) {
  if (key.rfind("tie_rod_", 0) != 0) return false;
  std::size_t i = 8;
  std::size_t digits = 0;
  while (i < key.size() && std::isdigit(static_cast<unsigned char>(key[i]))) {
    ++i;
    ++digits;
  }
  if (digits == 0 || i >= key.size() || key[i] != '_') return false;
  static const std::set<std::string> fields = {
      "attach_x", "attach_z", "anchor_x", "anchor_z",
      "L0", "k", "lambda_l", "r_l"};
  return fields.count(key.substr(i + 1)) > 0;
}

void apply_overrides(ConfigText& cfg, const std::vector<std::string>& kvs) {
  for (const auto& kv : kvs) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--override expects key=value, got '" + kv + "'");
    }
    std::string key = kv.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::string value = kv.substr(eq + 1);
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    if (known_keys().count(key) == 0 && !tie_rod_key(key)) {
      throw ConfigError("unknown config key in --override: " + key);
    }
    cfg.set(key, value);
  }
}

std::string join_overrides(const std::vector<std::string>& kvs) {
  std::string s;
  for (const auto& kv : kvs) {
    if (!s.empty()) s += ' ';
    s += kv;
  }
  return s;
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  fs::path p(path);
  if (p.is_absolute() || fs::exists(p) || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

struct Setup {
  ConfigText cfg;
  ParameterSet params;
  Surfaces surfaces;
  std::string config_dir;
};

Setup load_setup(const CommonOpts& o) {
  Setup s;
  for (const auto& f : o.configs) s.cfg.merge_file(f);
  apply_overrides(s.cfg, o.overrides);
  if (!o.configs.empty()) {
    s.config_dir = fs::path(o.configs.front()).parent_path().string();
  }
  s.params = load_parameters(s.cfg);
  s.surfaces.power = load_surface_file(
      resolve_path(s.cfg.require("power_table"), s.config_dir),
      SurfaceKind::kPower);
  s.surfaces.thrust = load_surface_file(
      resolve_path(s.cfg.require("thrust_table"), s.config_dir),
      SurfaceKind::kThrust);
  return s;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void apply_seed(SimConfig& sc, long long seed) {
  if (seed < 0) return;
  auto base = static_cast<std::uint64_t>(seed);
  sc.wind.seed = mix_seed(base, 0, kWindStream);
  sc.wave.seed = mix_seed(base, 0, kWaveStream);
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonOpts& o) {
  Setup s = load_setup(o);
  SimConfig sc = sim_config_from_text(s.cfg);
  apply_seed(sc, o.seed);

  const bool steady = !sc.controller_on && sc.wind_mode == WindMode::kConstant &&
                      sc.wave_mode == WaveMode::kNone && !sc.initial_state &&
                      !sc.initial_reported;
  Trajectory traj;
  SteadyReport report;
  if (steady) {
    SteadyResult res =
        steady_state_run(s.params, s.surfaces, sc.wind_constant,
                         sc.fixed_blade_pitch, sc.fixed_gen_torque,
                         sc.duration, sc.dt);
    traj = std::move(res.trajectory);
    report = res.report;
  } else {
    traj = simulate(sc, s.params, s.surfaces);
  }
  if (!o.overrides.empty()) {
    traj.manifest.set("cli_overrides", join_overrides(o.overrides));
  }

  std::string out = o.out.empty() ? "out" : o.out;
  ensure_dir(out);
  std::string path = (fs::path(out) / "trajectory.tsv").string();
  persist_trajectory(traj, path);

  if (steady) {
    ConfigText rep;
    const ReportedState fin =
        to_reporting_frame(report.final_state, s.params.heave_offset);
    rep.set_double("wind_speed", sc.wind_constant);
    rep.set_double("blade_pitch", report.blade_pitch);
    rep.set_double("gen_torque", report.gen_torque);
    rep.set_double("final_surge", fin.surge);
    rep.set_double("final_heave", fin.heave);
    rep.set_double("final_pitch", fin.pitch);
    rep.set_double("final_rotor_rpm", fin.rotor_speed * 60.0 / (2.0 * kPi));
    rep.set_double("settling_time", report.settling_time);
    rep.set_int("converged", report.converged ? 1 : 0);
    rep.write_file((fs::path(out) / "steady_report.cfg").string());
    if (!o.quiet) {
      std::printf("steady run %.6g m/s: surge %.4f m, heave %.4f m, "
                  "pitch %.5f rad, rotor %.4f rpm, settled %.1f s%s\n",
                  sc.wind_constant, fin.surge, fin.heave, fin.pitch,
                  fin.rotor_speed * 60.0 / (2.0 * kPi), report.settling_time,
                  report.converged ? "" : " (not converged)");
    }
  }
  if (!o.quiet) {
    if (traj.failure) {
      std::printf("run failed at t=%.2f s: %s\n", traj.failure->time,
                  traj.failure->cause.c_str());
    }
    std::printf("wrote %zu rows to %s\n", traj.rows(), path.c_str());
  }
  return 0;
}

// -------------------------------------------------------------------- tune

int cmd_tune(const CommonOpts& o, const std::string& procedure) {
  Setup s = load_setup(o);
  SimConfig sc = sim_config_from_text(s.cfg);
  sc.controller_on = true;
  apply_seed(sc, o.seed);

  std::string out = o.out.empty() ? "out" : o.out;
  ensure_dir(out);

  const double record_dt = sc.dt * sc.decimation;
  auto rotor_series = [&](const ParameterSet& q) {
    Trajectory t = simulate(sc, q, s.surfaces);
    return t.col(kColRotorSpeed);
  };

  ConfigText result;
  result.set("procedure", procedure);
  if (!o.overrides.empty()) {
    result.set("cli_overrides", join_overrides(o.overrides));
  }

  if (procedure == "p") {
    auto unstable = [&](double scale) {
      ParameterSet q = s.params;
      q.proportional_scale = scale;
      q.integral_scale = 1.0;
      auto series = rotor_series(q);
      return instability_detected(series, record_dt, 60.0);
    };
    double start = s.cfg.get_double("tune_start", 0.02);
    double maxv = s.cfg.get_double("tune_max", 64.0);
    TuneResult r = tune_proportional(unstable, start, maxv);
    result.set_double("a_p", r.value);
    result.set_int("evaluations", r.evaluations);
    result.set_int("converged", r.converged ? 1 : 0);
    if (!r.converged) {
      throw SimulationError("no instability below the search bound; "
                            "cannot place the critical gain", 0.0);
    }
    if (!o.quiet) std::printf("a_p = %.6g (%d runs)\n", r.value, r.evaluations);
  } else if (procedure == "i") {
    auto mean_error = [&](double scale) {
      ParameterSet q = s.params;
      q.integral_scale = scale;
      auto series = rotor_series(q);
      return mean_of(series) - q.rated_rotor_speed;
    };
    double tol = 0.005 * s.params.rated_rotor_speed;
    TuneResult r = tune_integral(mean_error, s.params.integral_scale, tol, 40);
    result.set_double("a_i", r.value);
    result.set_int("evaluations", r.evaluations);
    result.set_int("converged", r.converged ? 1 : 0);
    if (!r.converged) {
      throw SimulationError("integral-scale search did not converge", 0.0);
    }
    if (!o.quiet) std::printf("a_i = %.6g (%d runs)\n", r.value, r.evaluations);
  } else {  // "d"
    auto objective = [&](double kd) {
      ParameterSet q = s.params;
      q.derivative_gain = kd;
      return stddev_of(rotor_series(q));
    };
    int points = static_cast<int>(s.cfg.get_int("tune_points", 15));
    SweepResult r = tune_derivative(objective, 0.02, 1.0, points);
    std::ofstream sweep((fs::path(out) / "kd_sweep.tsv").string());
    if (!sweep) throw IoError("cannot write kd_sweep.tsv");
    sweep << "# fowt-kd-sweep-1\nk_d\trotor_speed_std\n";
    char buf[80];
    for (const auto& pt : r.curve) {
      std::snprintf(buf, sizeof buf, "%.17g\t%.17g\n", pt.gain, pt.objective);
      sweep << buf;
    }
    result.set_double("K_d", r.best_gain);
    result.set_double("objective", r.best_objective);
    result.set_int("interior_minimum", r.interior_minimum ? 1 : 0);
    if (!o.quiet) {
      std::printf("K_d = %.6g (std %.6g rad/s, %s minimum)\n", r.best_gain,
                  r.best_objective, r.interior_minimum ? "interior" : "edge");
    }
  }
  result.write_file((fs::path(out) / ("tune_" + procedure + ".cfg")).string());
  return 0;
}

// ---------------------------------------------------------------- campaign

CampaignSpec campaign_from(const Setup& s, const CommonOpts& o) {
  CampaignSpec spec;
  spec.sim = sim_config_from_text(s.cfg);
  spec.n_runs = static_cast<int>(
      s.cfg.get_int("n_runs", s.cfg.get_int("runs", 1)));
  spec.base_seed = s.cfg.get_uint("base_seed", 1);
  if (o.seed >= 0) spec.base_seed = static_cast<std::uint64_t>(o.seed);
  spec.out_dir = o.out;
  spec.workers = o.workers;
  spec.resume = s.cfg.get_int("resume", 1) != 0;
  return spec;
}

int cmd_campaign(const CommonOpts& o) {
  Setup s = load_setup(o);
  CampaignSpec spec = campaign_from(s, o);

  auto t0 = std::chrono::steady_clock::now();
  EnsembleResult res = run_campaign(spec, s.params, s.surfaces);
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();

  int failed = 0;
  std::string digest_input;
  char buf[32];
  for (const auto& r : res.records) {
    if (r.failed) ++failed;
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(r.checksum));
    digest_input += buf;
  }
  if (!spec.out_dir.empty() && !o.overrides.empty()) {
    res.manifest.set("cli_overrides", join_overrides(o.overrides));
    res.manifest.write_file(
        (fs::path(spec.out_dir) / "campaign.cfg").string());
  }
  if (!o.quiet) {
    std::printf("%d runs (%d failed) in %.1f s, digest %016llx%s%s\n",
                spec.n_runs, failed, secs,
                static_cast<unsigned long long>(fnv1a64(digest_input)),
                spec.out_dir.empty() ? "" : ", dir ",
                spec.out_dir.c_str());
  }
  return 0;
}

// ---------------------------------------------------------- counterfactual

int cmd_counterfactual(const CommonOpts& o) {
  Setup s = load_setup(o);
  CampaignSpec camp = campaign_from(s, o);
  camp.out_dir.clear();  // variants are written here, not by the campaign

  CounterfactualSpec cf;
  cf.source_run = static_cast<int>(s.cfg.get_int("source_run", 0));
  std::string hold = s.cfg.get_string("hold", "wind");
  if (hold == "wind") {
    cf.hold = HoldFactor::kWind;
  } else if (hold == "wave") {
    cf.hold = HoldFactor::kWave;
  } else {
    throw ConfigError("hold must be 'wind' or 'wave', got '" + hold + "'");
  }
  std::string variant = s.cfg.get_string("variant", "resample");
  if (variant == "resample") {
    cf.variant = VariantKind::kResample;
  } else if (variant == "constant") {
    cf.variant = VariantKind::kConstant;
  } else if (variant == "none") {
    cf.variant = VariantKind::kNone;
  } else {
    throw ConfigError("variant must be resample, constant, or none; got '" +
                      variant + "'");
  }
  cf.constant_level = s.cfg.get_double("constant_level", 0.0);
  cf.repetitions = static_cast<int>(s.cfg.get_int("repetitions", 1));
  cf.variant_seed = s.cfg.get_uint("variant_seed", 1);
  if (o.seed >= 0) cf.variant_seed = static_cast<std::uint64_t>(o.seed);

  std::string out = o.out.empty() ? "out" : o.out;
  ensure_dir(out);

  Trajectory source =
      simulate(campaign_run_config(camp, cf.source_run), s.params, s.surfaces);
  persist_trajectory(source, (fs::path(out) / "source.tsv").string());

  std::vector<Trajectory> variants =
      run_counterfactual(cf, camp, s.params, s.surfaces);
  for (std::size_t i = 0; i < variants.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "cf_%03zu.tsv", i);
    if (!o.overrides.empty()) {
      variants[i].manifest.set("cli_overrides", join_overrides(o.overrides));
    }
    persist_trajectory(variants[i], (fs::path(out) / name).string());
    if (!o.quiet) {
      const Trajectory& v = variants[i];
      Extremes ex = series_extremes(v.col(kColT), v.col(kColPitch));
      double corr = channel_correlation(source.col(kColPitch),
                                        v.col(kColPitch));
      std::printf("cf %zu: %s, pitch extreme %.5f rad at %.1f s, "
                  "pitch correlation to source %.3f\n",
                  i, v.failure ? v.failure->cause.c_str() : "ok",
                  std::abs(ex.max) > std::abs(ex.min) ? ex.max : ex.min,
                  std::abs(ex.max) > std::abs(ex.min) ? ex.t_max : ex.t_min,
                  corr);
    }
  }
  if (!o.quiet) {
    std::printf("wrote source + %zu variants to %s\n", variants.size(),
                out.c_str());
  }
  return 0;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(const CommonOpts& o, const std::string& campaign_dir) {
  ConfigText settings;
  for (const auto& f : o.configs) settings.merge_file(f);
  apply_overrides(settings, o.overrides);
  int bins = static_cast<int>(settings.get_int("bins", 100));
  double events_sigma = settings.get_double("events_sigma", 4.0);
  std::string events_channel = settings.get_string("events_channel", "pitch");

  std::map<std::string, Column> channel_names = {
      {"surge", kColSurge},     {"heave", kColHeave},
      {"pitch", kColPitch},     {"rotor_speed", kColRotorSpeed},
      {"surge_rate", kColSurgeRate}, {"heave_rate", kColHeaveRate},
      {"pitch_rate", kColPitchRate}};
  auto channel_it = channel_names.find(events_channel);
  if (channel_it == channel_names.end()) {
    throw ConfigError("events_channel must name a state channel, got '" +
                      events_channel + "'");
  }
  Column event_col = channel_it->second;

  fs::path runs_dir = fs::path(campaign_dir) / "runs";
  if (!fs::exists(runs_dir)) {
    throw IoError("no runs directory under " + campaign_dir);
  }
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(runs_dir)) {
    if (e.path().extension() == ".tsv") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no run files under " + runs_dir.string());

  std::vector<Trajectory> runs;
  runs.reserve(files.size());
  for (const auto& f : files) runs.push_back(load_trajectory(f));

  std::string out = o.out.empty()
                        ? (fs::path(campaign_dir) / "analysis").string()
                        : o.out;
  ensure_dir(out);

  std::vector<const Trajectory*> complete;
  for (const auto& r : runs) {
    if (!r.failure) complete.push_back(&r);
  }

  // Pooled marginal densities over every run, including truncated ones.
  for (auto col : {kColSurge, kColHeave, kColPitch, kColRotorSpeed}) {
    std::vector<double> pooled;
    for (const auto& r : runs) {
      const auto& v = r.col(col);
      pooled.insert(pooled.end(), v.begin(), v.end());
    }
    Histogram h = pdf(pooled, bins);
    std::string name = std::string("pdf_") + kColumnNames[col] + ".tsv";
    write_histogram((fs::path(out) / name).string(), h);
  }

  // Percentile envelopes need a shared time axis, so only complete runs.
  if (complete.size() >= 2) {
    for (auto col : {kColPitch, kColHeave, kColSurge}) {
      BandCurves bands = percentile_bands(complete, col, {5, 25, 50, 75, 95});
      std::string name = std::string("bands_") + kColumnNames[col] + ".tsv";
      write_bands((fs::path(out) / name).string(), bands);
    }
  }

  // Per-run extremes plus the pooled-tail comparison.
  std::ofstream ext((fs::path(out) / "extremes.tsv").string());
  if (!ext) throw IoError("cannot write extremes.tsv");
  ext << "# fowt-extremes-1\nrun\tchannel\tmin\tt_min\tmax\tt_max\n";
  ConfigText summary;
  char buf[256];
  for (auto col : {kColSurge, kColHeave, kColPitch}) {
    std::vector<double> maxima;
    std::vector<double> pooled;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      Extremes ex = trajectory_extremes(runs[i], col);
      std::snprintf(buf, sizeof buf, "%zu\t%s\t%.17g\t%.10g\t%.17g\t%.10g\n",
                    i, kColumnNames[col], ex.min, ex.t_min, ex.max, ex.t_max);
      ext << buf;
      maxima.push_back(std::max(std::abs(ex.min), std::abs(ex.max)));
      const auto& v = runs[i].col(col);
      pooled.insert(pooled.end(), v.begin(), v.end());
    }
    for (double& x : pooled) x = std::abs(x);
    double p99 = percentile(pooled, 99.0);
    std::string base = kColumnNames[col];
    summary.set_double(base + "_mean_of_run_maxima", mean_of(maxima));
    summary.set_double(base + "_pooled_p99", p99);
  }
  ext.close();

  // Heave/pitch co-occurrence of extremes across the ensemble.
  if (complete.size() >= 2) {
    CollocationReport coll = extreme_collocation(complete);
    ConfigText c;
    c.set_double("ks_pitch_at_heave_max", coll.ks_pitch_at_heave_max);
    c.set_double("ks_pitch_at_heave_min", coll.ks_pitch_at_heave_min);
    c.set_double("ks_heave_at_pitch_max", coll.ks_heave_at_pitch_max);
    c.set_double("ks_heave_at_pitch_min", coll.ks_heave_at_pitch_min);
    c.set_double("max_ks_pitch", coll.max_min_ks_pitch);
    c.set_double("max_ks_heave", coll.max_min_ks_heave);
    c.write_file((fs::path(out) / "collocation.cfg").string());
  }

  // Threshold excursions on the chosen channel, all runs pooled into one
  // table with a run column.
  std::vector<double> pooled_events;
  for (const auto& r : runs) {
    const auto& v = r.col(event_col);
    pooled_events.insert(pooled_events.end(), v.begin(), v.end());
  }
  double baseline = mean_of(pooled_events);
  double sigma = stddev_of(pooled_events);
  std::ofstream ev((fs::path(out) / "events.tsv").string());
  if (!ev) throw IoError("cannot write events.tsv");
  ev << "# fowt-events-1\n"
        "run\tstart\tend\tpeak_value\tpeak_time\tclassification\t"
        "recovery_time\n";
  int n_events = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ThresholdSpec th;
    th.baseline = baseline;
    th.sigma_factor = events_sigma;
    th.baseline_sigma = sigma;
    auto events = detect_events(runs[i], event_col, th);
    QuietSpec qs;
    qs.baseline = baseline;
    qs.baseline_sigma = sigma;
    for (auto& e : events) {
      Classification c = classify_event(runs[i], e, qs);
      const char* label = c.cls == EventClass::kShort
                              ? "short"
                              : c.cls == EventClass::kLong ? "long"
                                                           : "unrecovered";
      std::snprintf(buf, sizeof buf,
                    "%zu\t%.10g\t%.10g\t%.17g\t%.10g\t%s\t%.10g\n", i, e.start,
                    e.end, e.peak_value, e.peak_time, label, c.recovery_time);
      ev << buf;
      ++n_events;
    }
  }
  ev.close();

  // Spectra from the first complete run.
  if (!complete.empty()) {
    const Trajectory& t0 = *complete.front();
    const auto& time = t0.col(kColT);
    double dt = time.size() > 1 ? time[1] - time[0] : 1.0;
    if (t0.rows() >= 16) {
      write_spectrum((fs::path(out) / "spectrum_wave.tsv").string(),
                     fft_spectrum(t0.col(kColWaveElevation), dt));
      write_spectrum((fs::path(out) / "spectrum_pitch.tsv").string(),
                     fft_spectrum(t0.col(kColPitch), dt));
    }
  }

  summary.set("campaign_dir", campaign_dir);
  ConfigText camp_manifest;
  camp_manifest.merge_file((fs::path(campaign_dir) / "campaign.cfg").string());
  summary.set("campaign_fingerprint",
              camp_manifest.get_string("param_fingerprint", "unknown"));
  summary.set_int("runs", static_cast<long long>(runs.size()));
  summary.set_int("complete_runs", static_cast<long long>(complete.size()));
  summary.set_int("events", n_events);
  summary.set_int("bins", bins);
  summary.set("events_channel", events_channel);
  summary.set_double("events_sigma", events_sigma);
  if (!o.overrides.empty()) {
    summary.set("cli_overrides", join_overrides(o.overrides));
  }
  summary.write_file((fs::path(out) / "analyze.manifest").string());

  if (!o.quiet) {
    std::printf("analyzed %zu runs (%zu complete), %d events, wrote %s\n",
                runs.size(), complete.size(), n_events, out.c_str());
  }
  return 0;
}

// --------------------------------------------------------------- synth-env

int cmd_synth_env(const CommonOpts& o) {
  ConfigText cfg;
  for (const auto& f : o.configs) cfg.merge_file(f);
  apply_overrides(cfg, o.overrides);
  SimConfig sc = sim_config_from_text(cfg);
  apply_seed(sc, o.seed);

  std::string out = o.out.empty() ? "out" : o.out;
  ensure_dir(out);

  WindSpec ws = sc.wind;
  if (ws.duration < sc.duration) ws.duration = sc.duration;
  WindSeries wind = synthesize_wind(ws);
  write_series((fs::path(out) / "wind.tsv").string(), wind.t, wind.v,
               "fowt-wind-series-1");

  WaveField sea = synthesize_waves(sc.wave);
  std::vector<double> t, eta;
  for (double time = 0.0; time <= sc.duration + 1e-9; time += sc.dt) {
    t.push_back(time);
    eta.push_back(sea.elevation(0.0, time));
  }
  write_series((fs::path(out) / "wave.tsv").string(), t, eta,
               "fowt-wave-series-1");

  // Sample statistics against the target spectra.
  double wind_var = stddev_of(wind.v);
  wind_var *= wind_var;
  double f_lo = 1.0 / ws.duration;
  double f_hi = 0.5 / ws.dt;
  double wind_integral = 0.0;
  const int n_steps = 20000;
  double df = (f_hi - f_lo) / n_steps;
  for (int i = 0; i < n_steps; ++i) {
    double fa = f_lo + i * df;
    wind_integral +=
        0.5 * (von_karman_psd(fa, ws) + von_karman_psd(fa + df, ws)) * df;
  }

  double wave_var = stddev_of(eta);
  wave_var *= wave_var;
  double peak = pm_peak_frequency(sc.wave);
  double w_lo = sc.wave.omega_min > 0.0 ? sc.wave.omega_min : 0.1 * peak;
  double w_hi = sc.wave.omega_max > 0.0 ? sc.wave.omega_max : 10.0 * peak;
  double wave_integral = 0.0;
  double dw = (w_hi - w_lo) / n_steps;
  for (int i = 0; i < n_steps; ++i) {
    double wa = w_lo + i * dw;
    wave_integral += 0.5 *
                     (pierson_moskowitz_psd(wa, sc.wave) +
                      pierson_moskowitz_psd(wa + dw, sc.wave)) *
                     dw;
  }

  ConfigText m;
  m.set_double("wind_mean", ws.mean_speed);
  m.set_double("wind_sigma", ws.turbulence_std);
  m.set_double("wind_length_scale", ws.length_scale);
  m.set_uint("wind_seed", ws.seed);
  m.set_double("wind_sample_variance", wind_var);
  m.set_double("wind_spectrum_integral", wind_integral);
  m.set_double("wave_wind_speed", sc.wave.wind_speed);
  m.set_int("wave_components", sc.wave.n_components);
  m.set_uint("wave_seed", sc.wave.seed);
  m.set_double("wave_sample_variance", wave_var);
  m.set_double("wave_spectrum_integral", wave_integral);
  m.set_double("wave_peak_frequency", peak);
  if (!o.overrides.empty()) {
    m.set("cli_overrides", join_overrides(o.overrides));
  }
  m.write_file((fs::path(out) / "env.manifest").string());

  if (!o.quiet) {
    std::printf("wind variance %.4g (target %.4g), "
                "wave variance %.4g (target %.4g), peak %.4g rad/s\n",
                wind_var, wind_integral, wave_var, wave_integral, peak);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floating wind turbine simulation laboratory"};
  app.require_subcommand(1);

  CommonOpts sim_o, tune_o, camp_o, cf_o, an_o, env_o;
  std::string procedure = "d";
  std::string campaign_dir;

  auto* c_sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
  add_common(c_sim, sim_o, true);

  auto* c_tune = app.add_subcommand("tune", "Controller gain tuning procedures");
  add_common(c_tune, tune_o, true);
  c_tune->add_option("--procedure", procedure,
                     "p (proportional ramp), i (integral bisection), "
                     "d (derivative sweep)")
      ->check(CLI::IsMember({"p", "i", "d"}));

  auto* c_camp = app.add_subcommand("campaign", "Seeded Monte Carlo ensemble");
  add_common(c_camp, camp_o, true);

  auto* c_cf = app.add_subcommand("counterfactual",
                                  "Re-run a campaign member with one "
                                  "environment factor altered");
  add_common(c_cf, cf_o, true);

  auto* c_an = app.add_subcommand("analyze", "Statistics over a campaign directory");
  add_common(c_an, an_o, false);
  c_an->add_option("--campaign", campaign_dir, "Campaign output directory")
      ->required();

  auto* c_env = app.add_subcommand("synth-env",
                                   "Synthesize wind and wave series");
  add_common(c_env, env_o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim_o);
    if (c_tune->parsed()) return cmd_tune(tune_o, procedure);
    if (c_camp->parsed()) return cmd_campaign(camp_o);
    if (c_cf->parsed()) return cmd_counterfactual(cf_o);
    if (c_an->parsed()) return cmd_analyze(an_o, campaign_dir);
    if (c_env->parsed()) return cmd_synth_env(env_o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
