// Times the OpenMP campaign runner against the serial reference on the
// same spec and verifies the results are bit-identical.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>

#include <omp.h>

#include "fowt/ensemble.hpp"

using namespace fowt;

namespace {

#ifndef FOWT_CONFIG_DIR
#define FOWT_CONFIG_DIR "configs"
#endif

double wall_seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n_runs = 16;
  double duration = 120.0;
  int workers = 0;
  std::string config_dir = FOWT_CONFIG_DIR;
  for (int i = 1; i < argc; ++i) {
    auto need = [&](const char* flag) {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "%s needs a value\n", flag);
        std::exit(2);
      }
      return argv[++i];
    };
    if (std::strcmp(argv[i], "--runs") == 0) {
      n_runs = std::atoi(need("--runs"));
    } else if (std::strcmp(argv[i], "--duration") == 0) {
      duration = std::atof(need("--duration"));
    } else if (std::strcmp(argv[i], "--workers") == 0) {
      workers = std::atoi(need("--workers"));
    } else if (std::strcmp(argv[i], "--config-dir") == 0) {
      config_dir = need("--config-dir");
    } else {
      std::fprintf(stderr,
                   "usage: fowt_bench [--runs N] [--duration S] "
                   "[--workers W] [--config-dir DIR]\n");
      return 2;
    }
  }

  try {
    ParameterSet p = load_parameters_file(config_dir + "/turbine.cfg");
    Surfaces surfaces;
    surfaces.power =
        load_surface_file(config_dir + "/cp_table.tsv", SurfaceKind::kPower);
    surfaces.thrust =
        load_surface_file(config_dir + "/ct_table.tsv", SurfaceKind::kThrust);

    ConfigText scenario;
    scenario.merge_file(config_dir + "/stochastic.cfg");
    CampaignSpec spec;
    spec.sim = sim_config_from_text(scenario);
    spec.sim.duration = duration;
    spec.n_runs = n_runs;
    spec.base_seed = 7;
    spec.workers = workers;

    EnsembleResult serial, parallel;
    double t_serial = wall_seconds(
        [&] { serial = run_campaign_serial(spec, p, surfaces); });
    double t_parallel =
        wall_seconds([&] { parallel = run_campaign(spec, p, surfaces); });

    bool identical = serial.records.size() == parallel.records.size();
    for (std::size_t i = 0; identical && i < serial.records.size(); ++i) {
      identical = serial.records[i].checksum == parallel.records[i].checksum;
    }

    int threads = workers > 0 ? workers : omp_get_max_threads();
    std::printf("%d runs x %.0f s, dt %.3g\n", n_runs, duration, spec.sim.dt);
    std::printf("serial:   %8.2f s\n", t_serial);
    std::printf("parallel: %8.2f s  (%d threads, speedup %.2fx)\n", t_parallel,
                threads, t_serial / t_parallel);
    std::printf("results %s\n", identical ? "bit-identical" : "DIFFER");
    return identical ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
