#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "fowt/common.hpp"
#include "fowt/environment.hpp"
#include "fowt/rng.hpp"

using namespace fowt;

namespace {

WindSpec default_wind() {
  WindSpec s;
  s.mean_speed = 20.0;
  s.turbulence_std = 2.0;
  s.length_scale = 180.0;
  s.dt = 0.1;
  s.duration = 1500.0;
  s.seed = 7;
  return s;
}

// Trapezoid quadrature of the wind spectrum on a log grid plus the flat
// piece near zero frequency.
double wind_spectrum_integral(const WindSpec& s, double f_max) {
  const double f0 = 1e-7;
  double total = von_karman_psd(0.0, s) * f0;
  const int n = 40000;
  double step = std::log(f_max / f0) / n;
  double prev_f = f0;
  double prev_s = von_karman_psd(f0, s);
  for (int i = 1; i <= n; ++i) {
    double f = f0 * std::exp(step * i);
    double v = von_karman_psd(f, s);
    total += 0.5 * (prev_s + v) * (f - prev_f);
    prev_f = f;
    prev_s = v;
  }
  return total;
}

double sample_mean(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("von karman density matches the closed form") {
  WindSpec s = default_wind();
  double scale = s.length_scale / s.mean_speed;
  CHECK(von_karman_psd(0.0, s) ==
        doctest::Approx(4.0 * 4.0 * scale).epsilon(1e-14));
  double f = 0.31;
  double x = f * scale;
  double want = 4.0 * 4.0 * scale / std::pow(1.0 + 70.8 * x * x, 5.0 / 6.0);
  CHECK(von_karman_psd(f, s) == doctest::Approx(want).epsilon(1e-14));

  s.turbulence_std = 0.0;
  CHECK(von_karman_psd(0.0, s) == 0.0);
  CHECK(von_karman_psd(1.0, s) == 0.0);
}

TEST_CASE("von karman density integrates to the variance") {
  WindSpec s = default_wind();
  double integral = wind_spectrum_integral(s, 2000.0);
  CHECK(integral == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("wind synthesis is deterministic") {
  WindSpec s = default_wind();
  WindSeries a = synthesize_wind(s);
  WindSeries b = synthesize_wind(s);
  REQUIRE(a.v.size() == b.v.size());
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    CHECK(a.v[i] == b.v[i]);
  }
  s.seed = 8;
  WindSeries c = synthesize_wind(s);
  bool differs = false;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    if (a.v[i] != c.v[i]) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("wind synthesis shape and degenerate cases") {
  WindSpec s = default_wind();
  WindSeries w = synthesize_wind(s);
  CHECK(w.t.size() == 15001);
  CHECK(w.t[1] - w.t[0] == doctest::Approx(0.1));
  for (double v : w.v) CHECK(std::isfinite(v));

  s.turbulence_std = 0.0;
  WindSeries flat = synthesize_wind(s);
  for (double v : flat.v) {
    CHECK(v == doctest::Approx(20.0).epsilon(1e-12));
  }

  s = default_wind();
  s.duration = 50.0;  // less than ten integral periods of 9 s
  CHECK_THROWS_AS(synthesize_wind(s), ConfigError);
}

TEST_CASE("wind synthesis reproduces mean and variance across seeds") {
  WindSpec s = default_wind();
  double target = wind_spectrum_integral(s, 2000.0);
  double var_sum = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    s.seed = static_cast<std::uint64_t>(seed);
    WindSeries w = synthesize_wind(s);
    CHECK(sample_mean(w.v) == doctest::Approx(20.0).epsilon(0.025));
    var_sum += sample_variance(w.v);
  }
  double var_avg = var_sum / 20.0;
  CHECK(var_avg == doctest::Approx(target).epsilon(0.15));
}

TEST_CASE("wind series interpolation") {
  WindSeries w;
  w.spec.dt = 1.0;
  w.t = {0.0, 1.0, 2.0};
  w.v = {10.0, 12.0, 11.0};
  CHECK(w.value_at(0.5) == doctest::Approx(11.0));
  CHECK(w.value_at(1.25) == doctest::Approx(11.75));
  CHECK(w.value_at(-3.0) == 10.0);
  CHECK(w.value_at(9.0) == 11.0);
}

TEST_CASE("pierson moskowitz density and peak") {
  WaveSpec s;
  s.wind_speed = 20.0;
  double want_peak = std::pow(4.0 * 0.74 / 5.0, 0.25) * 9.81 / 20.0;
  CHECK(pm_peak_frequency(s) == doctest::Approx(want_peak).epsilon(1e-14));
  CHECK(pm_peak_frequency(s) == doctest::Approx(0.4302).epsilon(1e-3));

  // Density maximum found by grid search sits at the analytic peak.
  double best_w = 0.0, best_s = -1.0;
  for (int i = 1; i <= 4000; ++i) {
    double w = 2.0 * i / 4000.0;
    double v = pierson_moskowitz_psd(w, s);
    if (v > best_s) {
      best_s = v;
      best_w = w;
    }
  }
  CHECK(best_w == doctest::Approx(want_peak).epsilon(2e-3));

  // Closed form at one point.
  double w = 0.6;
  double r = 9.81 / (20.0 * w);
  double want = 8.1e-3 * 9.81 * 9.81 / std::pow(w, 5) *
                std::exp(-0.74 * r * r * r * r);
  CHECK(pierson_moskowitz_psd(w, s) == doctest::Approx(want).epsilon(1e-14));

  CHECK(pierson_moskowitz_psd(1e6, s) < 1e-25);
  CHECK(pierson_moskowitz_psd(0.0, s) == 0.0);
}

TEST_CASE("wave synthesis components") {
  WaveSpec s;
  s.wind_speed = 20.0;
  s.n_components = 64;
  s.omega_min = 0.2;
  s.omega_max = 3.0;
  s.seed = 11;
  WaveField f = synthesize_waves(s);
  REQUIRE(f.components.size() == 64);
  for (const auto& c : f.components) {
    CHECK(c.amplitude >= 0.0);
    CHECK(c.omega >= 0.2);
    CHECK(c.omega <= 3.0 * (1.0 + 1e-12));
    // Deep water dispersion.
    CHECK(c.omega * c.omega ==
          doctest::Approx(9.81 * c.wavenumber).epsilon(1e-12));
  }

  WaveField g = synthesize_waves(s);
  for (std::size_t i = 0; i < f.components.size(); ++i) {
    CHECK(f.components[i].phase == g.components[i].phase);
    CHECK(f.components[i].amplitude == g.components[i].amplitude);
  }
}

TEST_CASE("single component carries the band energy") {
  WaveSpec s;
  s.wind_speed = 20.0;
  s.n_components = 1;
  s.omega_min = 0.4;
  s.omega_max = 0.5;
  s.seed = 3;
  WaveField f = synthesize_waves(s);
  REQUIRE(f.components.size() == 1);
  double w = std::sqrt(0.4 * 0.5);
  CHECK(f.components[0].omega == doctest::Approx(w).epsilon(1e-14));
  double want = std::sqrt(2.0 * pierson_moskowitz_psd(w, s) * 0.1);
  CHECK(f.components[0].amplitude == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("wave elevation variance matches the spectrum") {
  WaveSpec s;
  s.wind_speed = 20.0;
  s.n_components = 256;
  s.omega_min = 0.2;
  s.omega_max = 3.0;
  s.seed = 5;
  WaveField f = synthesize_waves(s);

  // Quadrature of the density over the synthesis band.
  double integral = 0.0;
  const int n = 40000;
  double prev_w = 0.2;
  double prev_s = pierson_moskowitz_psd(prev_w, s);
  for (int i = 1; i <= n; ++i) {
    double w = 0.2 + (3.0 - 0.2) * i / n;
    double v = pierson_moskowitz_psd(w, s);
    integral += 0.5 * (prev_s + v) * (w - prev_w);
    prev_w = w;
    prev_s = v;
  }

  // Component energy equals the quadrature up to binning error.
  double component_var = 0.0;
  for (const auto& c : f.components) {
    component_var += 0.5 * c.amplitude * c.amplitude;
  }
  CHECK(component_var == doctest::Approx(integral).epsilon(0.03));

  // Long elevation record at a fixed point reproduces it.
  double mean = 0.0;
  const int m = 20000;
  const double dt = 0.2;
  std::vector<double> e(m);
  for (int i = 0; i < m; ++i) {
    e[i] = f.elevation(0.0, i * dt);
    mean += e[i];
  }
  mean /= m;
  CHECK(std::abs(mean) < 0.05);
  double var = 0.0;
  for (double x : e) var += (x - mean) * (x - mean);
  var /= m;
  CHECK(var == doctest::Approx(integral).epsilon(0.05));
}

TEST_CASE("still water field is quiet") {
  WaveSpec s;
  WaveField f = still_water(s);
  CHECK(f.elevation(12.0, 34.0) == 0.0);
  FluidState st = f.kinematics(1.0, -5.0, 9.0);
  CHECK(st.u == 0.0);
  CHECK(st.w == 0.0);
  CHECK(st.du == 0.0);
  CHECK(st.dw == 0.0);
  CHECK(st.pressure_head == 0.0);
}

TEST_CASE("airy kinematics of a single harmonic") {
  WaveField f;
  WaveComponent c;
  c.amplitude = 1.5;
  c.omega = 0.8;
  c.wavenumber = 0.8 * 0.8 / 9.81;
  c.phase = 0.3;
  f.components = {c};

  // Surface vertical velocity equals the elevation rate.
  const double x = 4.0;
  for (double t : {0.0, 1.7, 6.2}) {
    const double h = 1e-5;
    double rate = (f.elevation(x, t + h) - f.elevation(x, t - h)) / (2.0 * h);
    double w = f.kinematics(x, 0.0, t).w;
    CHECK(w == doctest::Approx(rate).epsilon(1e-4));
  }

  // Exponential decay with depth kills the motion.
  double near = std::abs(f.kinematics(x, -1.0, 2.0).u);
  double deep = std::abs(f.kinematics(x, -200.0, 2.0).u);
  CHECK(deep < 1e-4 * (near + 1e-12));

  // Dynamic pressure head at the surface equals the elevation.
  CHECK(f.kinematics(x, 0.0, 2.0).pressure_head ==
        doctest::Approx(f.elevation(x, 2.0)).epsilon(1e-12));
}

TEST_CASE("series files round trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "fowt_env_test";
  fs::create_directories(dir);
  std::string path = (dir / "wind.tsv").string();

  WindSpec spec = default_wind();
  spec.duration = 100.0;
  WindSeries w = synthesize_wind(spec);
  write_series(path, w.t, w.v, "wind sample");
  WindSeries r = read_wind_series(path);
  REQUIRE(r.t.size() == w.t.size());
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    CHECK(r.t[i] == w.t[i]);
    CHECK(r.v[i] == w.v[i]);
  }

  std::string bad = (dir / "bad.tsv").string();
  write_series(bad, {0.0, 2.0, 1.0}, {1.0, 2.0, 3.0}, "shuffled");
  CHECK_THROWS_AS(read_wind_series(bad), IoError);
  fs::remove_all(dir);
}
