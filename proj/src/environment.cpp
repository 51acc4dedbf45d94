#include "fowt/environment.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <mutex>
#include <sstream>

#include "fowt/common.hpp"
#include "fowt/rng.hpp"

namespace fowt {

namespace {

// FFTW plan creation is not thread safe; execution on private buffers is.
std::mutex g_fftw_mutex;

void check_wind_spec(const WindSpec& s) {
  if (!(s.mean_speed > 0.0)) throw ConfigError("wind mean_speed must be positive");
  if (s.turbulence_std < 0.0) throw ConfigError("wind turbulence_std must be nonnegative");
  if (!(s.length_scale > 0.0)) throw ConfigError("wind length_scale must be positive");
  if (!(s.dt > 0.0)) throw ConfigError("wind dt must be positive");
  if (!(s.duration > 0.0)) throw ConfigError("wind duration must be positive");
  // The energy-containing scale U/L must fit several times into the window,
  // otherwise the synthesized variance is badly undersampled. The literal
  // lowest FFT frequency is 1/duration and always fits by construction, so
  // the check is applied to the integral-scale frequency instead.
  double integral_period = s.length_scale / s.mean_speed;
  if (s.duration < 10.0 * integral_period) {
    throw ConfigError(
        "wind duration too short for spectral resolution: need at least 10 "
        "integral periods (" + std::to_string(10.0 * integral_period) + " s)");
  }
}

}  // namespace

double von_karman_psd(double f, const WindSpec& spec) {
  double sigma2 = spec.turbulence_std * spec.turbulence_std;
  double x = f * spec.length_scale / spec.mean_speed;
  return 4.0 * sigma2 * (spec.length_scale / spec.mean_speed) /
         std::pow(1.0 + 70.8 * x * x, 5.0 / 6.0);
}

WindSeries synthesize_wind(const WindSpec& spec) {
  check_wind_spec(spec);
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration / spec.dt)) + 1;
  const double df = 1.0 / (static_cast<double>(n) * spec.dt);
  const std::size_t n_half = n / 2 + 1;

  UniformRng rng(spec.seed);
  std::vector<std::complex<double>> bins(n_half, {0.0, 0.0});
  bins[0] = {spec.mean_speed, 0.0};
  // Deterministic amplitudes, random phases. The Nyquist bin (even n) is
  // left empty so every retained component carries a free phase.
  std::size_t m_max = (n - 1) / 2;
  for (std::size_t m = 1; m <= m_max; ++m) {
    double a = std::sqrt(2.0 * von_karman_psd(m * df, spec) * df);
    double phi = 2.0 * kPi * rng.next();
    bins[m] = {0.5 * a * std::cos(phi), 0.5 * a * std::sin(phi)};
  }

  WindSeries out;
  out.spec = spec;
  out.t.resize(n);
  out.v.resize(n);
  {
    std::unique_lock<std::mutex> lock(g_fftw_mutex);
    fftw_complex* in = fftw_alloc_complex(n_half);
    double* real_out = fftw_alloc_real(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in, real_out,
                                          FFTW_ESTIMATE);
    lock.unlock();
    for (std::size_t m = 0; m < n_half; ++m) {
      in[m][0] = bins[m].real();
      in[m][1] = bins[m].imag();
    }
    fftw_execute(plan);
    for (std::size_t i = 0; i < n; ++i) {
      out.t[i] = static_cast<double>(i) * spec.dt;
      out.v[i] = real_out[i];
    }
    lock.lock();
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(real_out);
  }
  return out;
}

double WindSeries::value_at(double time) const {
  if (t.empty()) return spec.mean_speed;
  if (time <= t.front()) return v.front();
  if (time >= t.back()) return v.back();
  // Uniform-grid index guess, corrected locally so slightly irregular
  // imported series still interpolate within the right interval.
  std::size_t i = static_cast<std::size_t>((time - t.front()) / spec.dt);
  if (i + 1 >= t.size()) i = t.size() - 2;
  while (i > 0 && time < t[i]) --i;
  while (i + 2 < t.size() && time >= t[i + 1]) ++i;
  double u = (time - t[i]) / (t[i + 1] - t[i]);
  return v[i] + u * (v[i + 1] - v[i]);
}

double pierson_moskowitz_psd(double omega, const WaveSpec& spec) {
  if (!(omega > 0.0)) return 0.0;
  const double alpha = 8.1e-3;
  const double beta = 0.74;
  double g = spec.gravity;
  double u = spec.wind_speed;
  double r = g / (u * omega);
  return alpha * g * g / std::pow(omega, 5) * std::exp(-beta * r * r * r * r);
}

double pm_peak_frequency(const WaveSpec& spec) {
  const double beta = 0.74;
  return std::pow(4.0 * beta / 5.0, 0.25) * spec.gravity / spec.wind_speed;
}

WaveField synthesize_waves(const WaveSpec& spec) {
  if (!(spec.wind_speed > 0.0)) throw ConfigError("wave wind_speed must be positive");
  if (spec.n_components < 1) throw ConfigError("wave n_components must be at least 1");
  if (!(spec.gravity > 0.0)) throw ConfigError("wave gravity must be positive");

  double peak = pm_peak_frequency(spec);
  double lo = spec.omega_min > 0.0 ? spec.omega_min : 0.1 * peak;
  double hi = spec.omega_max > 0.0 ? spec.omega_max : 10.0 * peak;
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("wave frequency band is empty");

  const int n = spec.n_components;
  std::vector<double> omega(n);
  if (n == 1) {
    // A lone component sits at the geometric band center and carries the
    // whole band's energy.
    omega[0] = std::sqrt(lo * hi);
  } else {
    double ratio = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) omega[i] = lo * std::exp(ratio * i);
  }

  UniformRng rng(spec.seed);
  WaveField field;
  field.spec = spec;
  field.components.resize(n);
  for (int i = 0; i < n; ++i) {
    // Trapezoid bin widths on the log-spaced grid.
    double left = i == 0 ? omega[0] : omega[i - 1];
    double right = i == n - 1 ? omega[n - 1] : omega[i + 1];
    double d_omega = n == 1 ? hi - lo : 0.5 * (right - left);
    WaveComponent& c = field.components[i];
    c.omega = omega[i];
    c.amplitude = std::sqrt(2.0 * pierson_moskowitz_psd(omega[i], spec) * d_omega);
    c.wavenumber = omega[i] * omega[i] / spec.gravity;
    c.phase = 2.0 * kPi * rng.next();
  }
  return field;
}

WaveField still_water(const WaveSpec& spec) {
  WaveField field;
  field.spec = spec;
  return field;
}

double WaveField::elevation(double x, double t) const {
  double e = 0.0;
  for (const auto& c : components) {
    e += c.amplitude * std::cos(c.wavenumber * x - c.omega * t + c.phase);
  }
  return e;
}

FluidState WaveField::kinematics(double x, double z, double t) const {
  FluidState f;
  for (const auto& c : components) {
    double arg = c.wavenumber * x - c.omega * t + c.phase;
    double cs = std::cos(arg);
    double sn = std::sin(arg);
    double decay = std::exp(c.wavenumber * std::min(z, 0.0));
    double aw = c.amplitude * c.omega;
    f.elevation += c.amplitude * cs;
    f.u += aw * decay * cs;
    f.w += aw * decay * sn;
    f.du += aw * c.omega * decay * sn;
    f.dw += -aw * c.omega * decay * cs;
    f.pressure_head += c.amplitude * decay * cs;
  }
  return f;
}

void write_series(const std::string& path, const std::vector<double>& t,
                  const std::vector<double>& v, const std::string& header) {
  if (t.size() != v.size()) throw IoError("series length mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write series file: " + path);
  out << "# " << header << "\n";
  char buf[80];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g\t%.17g\n", t[i], v[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

WindSeries read_wind_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file: " + path);
  WindSeries s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double time = 0.0, value = 0.0;
    if (row >> time >> value) {
      s.t.push_back(time);
      s.v.push_back(value);
    } else if (!line.empty() &&
               line.find_first_not_of(" \t\r\n") != std::string::npos) {
      throw IoError(path + " line " + std::to_string(lineno) +
                    ": expected 'time value'");
    }
  }
  if (s.t.size() < 2) throw IoError(path + ": series needs at least 2 samples");
  for (std::size_t i = 1; i < s.t.size(); ++i) {
    if (!(s.t[i] > s.t[i - 1])) {
      throw IoError(path + ": time axis must be strictly increasing");
    }
  }
  s.spec.dt = s.t[1] - s.t[0];
  s.spec.duration = s.t.back() - s.t.front();
  double mean = 0.0;
  for (double v : s.v) mean += v;
  s.spec.mean_speed = mean / static_cast<double>(s.v.size());
  return s;
}

}  // namespace fowt
