#include "fowt/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "fowt/common.hpp"

namespace fowt {

namespace {

// FFTW plan management is not thread safe; execution is.
std::mutex g_fftw_mutex;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

Histogram pdf(const std::vector<double>& samples, int n_bins) {
  if (samples.size() < 2) {
    throw std::invalid_argument("pdf needs at least two samples");
  }
  if (n_bins < 1) throw std::invalid_argument("pdf needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  h.count = samples.size();
  if (lo == hi) {
    h.degenerate = true;
    h.edges = {lo - 0.5, lo + 0.5};
    h.density = {1.0};
    return h;
  }
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i) {
    h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n_bins;
  }
  h.edges.back() = hi;
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
  const double scale = n_bins / (hi - lo);
  for (double v : samples) {
    int b = static_cast<int>((v - lo) * scale);
    b = std::clamp(b, 0, n_bins - 1);  // top edge inclusive
    ++counts[static_cast<std::size_t>(b)];
  }
  h.density.resize(static_cast<std::size_t>(n_bins));
  const double n = static_cast<double>(samples.size());
  for (int i = 0; i < n_bins; ++i) {
    const double width = h.edges[static_cast<std::size_t>(i) + 1] -
                         h.edges[static_cast<std::size_t>(i)];
    h.density[static_cast<std::size_t>(i)] =
        static_cast<double>(counts[static_cast<std::size_t>(i)]) / (n * width);
  }
  return h;
}

Extremes series_extremes(const std::vector<double>& t,
                         const std::vector<double>& v) {
  if (v.empty() || t.size() != v.size()) {
    throw std::invalid_argument("series_extremes needs matching nonempty series");
  }
  Extremes e;
  e.min = v[0];
  e.max = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < e.min) {
      e.min = v[i];
      e.i_min = i;
    }
    if (v[i] > e.max) {
      e.max = v[i];
      e.i_max = i;
    }
  }
  e.t_min = t[e.i_min];
  e.t_max = t[e.i_max];
  return e;
}

Extremes trajectory_extremes(const Trajectory& traj, Column variable) {
  return series_extremes(traj.col(kColT), traj.col(variable));
}

double percentile(std::vector<double> samples, double level) {
  if (samples.empty()) {
    throw std::invalid_argument("percentile of an empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double q = std::clamp(level, 0.0, 100.0) / 100.0 *
                   static_cast<double>(samples.size() - 1);
  const std::size_t k = static_cast<std::size_t>(q);
  if (k + 1 >= samples.size()) return samples.back();
  const double frac = q - static_cast<double>(k);
  return samples[k] + frac * (samples[k + 1] - samples[k]);
}

BandCurves percentile_bands(const std::vector<const Trajectory*>& runs,
                            Column variable,
                            const std::vector<double>& levels) {
  if (runs.empty()) {
    throw std::invalid_argument("percentile_bands needs at least one run");
  }
  const std::vector<double>& axis = runs[0]->col(kColT);
  for (const Trajectory* traj : runs) {
    if (traj->col(kColT) != axis) {
      throw std::invalid_argument("trajectories do not share a time axis");
    }
  }
  BandCurves out;
  out.t = axis;
  out.levels = levels;
  out.bands.assign(levels.size(), std::vector<double>(axis.size()));
  out.lo.resize(axis.size());
  out.hi.resize(axis.size());
  std::vector<double> column(runs.size());
  for (std::size_t k = 0; k < axis.size(); ++k) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      column[r] = runs[r]->col(variable)[k];
    }
    std::sort(column.begin(), column.end());
    out.lo[k] = column.front();
    out.hi[k] = column.back();
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double q = std::clamp(levels[l], 0.0, 100.0) / 100.0 *
                       static_cast<double>(column.size() - 1);
      const std::size_t j = static_cast<std::size_t>(q);
      if (j + 1 >= column.size()) {
        out.bands[l][k] = column.back();
      } else {
        out.bands[l][k] = column[j] + (q - static_cast<double>(j)) *
                                          (column[j + 1] - column[j]);
      }
    }
  }
  return out;
}

SpectrumReport fft_spectrum(const std::vector<double>& series, double dt,
                            const std::string& window) {
  if (series.size() < 16) {
    throw std::invalid_argument("fft_spectrum needs at least 16 samples");
  }
  if (dt <= 0.0) throw std::invalid_argument("fft_spectrum needs dt > 0");
  if (window != "hann" && window != "rect") {
    throw std::invalid_argument("unknown window '" + window + "'");
  }
  const std::size_t n = series.size();
  std::vector<double> in(n);
  if (window == "hann") {
    for (std::size_t i = 0; i < n; ++i) {
      const double w =
          0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                static_cast<double>(n - 1)));
      in[i] = w * series[i];
    }
  } else {
    in = series;
  }
  const std::size_t n_out = n / 2 + 1;
  std::vector<fftw_complex> out(n_out);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_destroy_plan(plan);
  }
  SpectrumReport rep;
  rep.window = window;
  rep.df = 1.0 / (static_cast<double>(n) * dt);
  rep.frequency.resize(n_out);
  rep.magnitude.resize(n_out);
  double peak = 0.0;
  for (std::size_t k = 0; k < n_out; ++k) {
    rep.frequency[k] = static_cast<double>(k) * rep.df;
    rep.magnitude[k] = std::hypot(out[k][0], out[k][1]);
    peak = std::max(peak, rep.magnitude[k]);
  }
  if (peak > 0.0) {
    for (double& m : rep.magnitude) m /= peak;
  }
  return rep;
}

BinnedScatter binned_scatter(const std::vector<double>& x,
                             const std::vector<double>& y, int n_bins) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("binned_scatter needs paired samples");
  }
  if (x.empty()) throw std::invalid_argument("binned_scatter needs samples");
  if (n_bins < 1) throw std::invalid_argument("binned_scatter needs bins");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  BinnedScatter out;
  out.n_bins = n_bins;
  if (lo == hi) {
    out.x_center.push_back(lo);
    out.y_mean.push_back(std::accumulate(y.begin(), y.end(), 0.0) /
                         static_cast<double>(y.size()));
    out.count.push_back(static_cast<int>(y.size()));
    for (int b = 1; b < n_bins; ++b) out.empty_bins.push_back(b);
    return out;
  }
  std::vector<double> sums(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(n_bins), 0);
  const double scale = n_bins / (hi - lo);
  for (std::size_t i = 0; i < x.size(); ++i) {
    int b = static_cast<int>((x[i] - lo) * scale);
    b = std::clamp(b, 0, n_bins - 1);
    sums[static_cast<std::size_t>(b)] += y[i];
    ++counts[static_cast<std::size_t>(b)];
  }
  for (int b = 0; b < n_bins; ++b) {
    if (counts[static_cast<std::size_t>(b)] == 0) {
      out.empty_bins.push_back(b);
      continue;
    }
    out.x_center.push_back(lo + (hi - lo) * (b + 0.5) / n_bins);
    out.y_mean.push_back(sums[static_cast<std::size_t>(b)] /
                         counts[static_cast<std::size_t>(b)]);
    out.count.push_back(counts[static_cast<std::size_t>(b)]);
  }
  return out;
}

TrendLine fit_trend(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("fit_trend needs at least three paired samples");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_trend needs varying x");
  TrendLine t;
  t.slope = sxy / sxx;
  t.intercept = my - t.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (t.intercept + t.slope * x[i]);
    ssr += r * r;
  }
  t.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  return t;
}

std::vector<AnomalyEvent> detect_events(const Trajectory& traj,
                                        Column variable,
                                        const ThresholdSpec& ts) {
  const std::vector<double>& t = traj.col(kColT);
  const std::vector<double>& v = traj.col(variable);
  const double threshold =
      ts.absolute > 0.0 ? ts.absolute : ts.sigma_factor * ts.baseline_sigma;
  if (threshold <= 0.0) {
    throw std::invalid_argument("detect_events needs a positive threshold");
  }

  struct Raw {
    std::size_t first, last;
  };
  std::vector<Raw> raw;
  bool inside = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool exceed = std::abs(v[i] - ts.baseline) > threshold;
    if (exceed && !inside) {
      raw.push_back({i, i});
      inside = true;
    } else if (exceed) {
      raw.back().last = i;
    } else {
      inside = false;
    }
  }
  // Merge excursions separated by less than the merge window.
  std::vector<Raw> merged;
  for (const Raw& r : raw) {
    if (!merged.empty() &&
        t[r.first] - t[merged.back().last] < ts.merge_window) {
      merged.back().last = r.last;
    } else {
      merged.push_back(r);
    }
  }
  const double step = t.size() > 1 ? t[1] - t[0] : 0.0;
  std::vector<AnomalyEvent> events;
  for (const Raw& r : merged) {
    AnomalyEvent ev;
    ev.variable = variable;
    ev.start = t[r.first];
    ev.end = r.last + 1 < t.size() ? t[r.last + 1] : t[r.last] + step;
    ev.threshold = threshold;
    double peak = -1.0;
    for (std::size_t i = r.first; i <= r.last; ++i) {
      const double mag = std::abs(v[i] - ts.baseline);
      if (mag > peak) {
        peak = mag;
        ev.peak_value = v[i];
        ev.peak_time = t[i];
      }
    }
    events.push_back(ev);
  }
  return events;
}

Classification classify_event(const Trajectory& traj, const AnomalyEvent& ev,
                              const QuietSpec& qs) {
  const std::vector<double>& t = traj.col(kColT);
  const std::vector<double>& v = traj.col(ev.variable);
  const double band =
      qs.band > 0.0 ? qs.band : qs.sigma_factor * qs.baseline_sigma;
  if (band <= 0.0) {
    throw std::invalid_argument("classify_event needs a positive quiet band");
  }
  Classification out;
  // Longest quiet stretch ending rule: find the first index from which the
  // series stays inside the band for a full dwell window.
  std::size_t begin = 0;
  while (begin < t.size() && t[begin] < ev.end) ++begin;
  std::size_t quiet_start = begin;
  bool in_quiet = false;
  for (std::size_t i = begin; i < t.size(); ++i) {
    const bool quiet = std::abs(v[i] - qs.baseline) <= band;
    if (quiet && !in_quiet) {
      quiet_start = i;
      in_quiet = true;
    } else if (!quiet) {
      in_quiet = false;
    }
    if (in_quiet && t[i] - t[quiet_start] >= qs.dwell) {
      out.recovery_time = t[quiet_start] - ev.end;
      if (out.recovery_time < 0.0) out.recovery_time = 0.0;
      out.cls = out.recovery_time <= qs.short_cut ? EventClass::kShort
                                                  : EventClass::kLong;
      return out;
    }
  }
  out.cls = EventClass::kUnrecovered;
  out.recovery_time = t.empty() ? 0.0 : t.back() - ev.end;
  if (out.recovery_time < 0.0) out.recovery_time = 0.0;
  return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_distance needs nonempty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

double channel_correlation(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("channel_correlation needs equal-length series");
  }
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

CollocationReport extreme_collocation(
    const std::vector<const Trajectory*>& runs) {
  if (runs.empty()) {
    throw std::invalid_argument("extreme_collocation needs runs");
  }
  CollocationReport rep;
  std::vector<double> pitch_pool, heave_pool;
  for (const Trajectory* traj : runs) {
    const auto& heave = traj->col(kColHeave);
    const auto& pitch = traj->col(kColPitch);
    const Extremes eh = trajectory_extremes(*traj, kColHeave);
    const Extremes ep = trajectory_extremes(*traj, kColPitch);
    rep.pitch_at_heave_max.push_back(pitch[eh.i_max]);
    rep.pitch_at_heave_min.push_back(pitch[eh.i_min]);
    rep.heave_at_pitch_max.push_back(heave[ep.i_max]);
    rep.heave_at_pitch_min.push_back(heave[ep.i_min]);
    pitch_pool.insert(pitch_pool.end(), pitch.begin(), pitch.end());
    heave_pool.insert(heave_pool.end(), heave.begin(), heave.end());
  }
  rep.ks_pitch_at_heave_max = ks_distance(rep.pitch_at_heave_max, pitch_pool);
  rep.ks_pitch_at_heave_min = ks_distance(rep.pitch_at_heave_min, pitch_pool);
  rep.ks_heave_at_pitch_max = ks_distance(rep.heave_at_pitch_max, heave_pool);
  rep.ks_heave_at_pitch_min = ks_distance(rep.heave_at_pitch_min, heave_pool);
  rep.max_min_ks_pitch =
      ks_distance(rep.pitch_at_heave_max, rep.pitch_at_heave_min);
  rep.max_min_ks_heave =
      ks_distance(rep.heave_at_pitch_max, rep.heave_at_pitch_min);
  return rep;
}

AttributionReport attribute_event(
    const std::vector<double>& source_pitch,
    const std::vector<const std::vector<double>*>& same_wind_pitch,
    const std::vector<const std::vector<double>*>& same_wave_pitch,
    double threshold) {
  auto mean_corr = [&](const std::vector<const std::vector<double>*>& group) {
    if (group.empty()) return 0.0;
    double sum = 0.0;
    for (const auto* series : group) {
      sum += channel_correlation(source_pitch, *series);
    }
    return sum / static_cast<double>(group.size());
  };
  AttributionReport rep;
  rep.same_wind_correlation = mean_corr(same_wind_pitch);
  rep.same_wave_correlation = mean_corr(same_wave_pitch);
  rep.wind_consistent = rep.same_wind_correlation > threshold &&
                        rep.same_wave_correlation <= threshold;
  return rep;
}

void write_histogram(const std::string& path, const Histogram& h) {
  std::string text = "# histogram";
  text += h.degenerate ? " degenerate\n" : "\n";
  text += "left\tright\tdensity\n";
  char buf[96];
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\t%.17g\n", h.edges[i],
                  h.edges[i + 1], h.density[i]);
    text += buf;
  }
  write_text(path, text);
}

void write_bands(const std::string& path, const BandCurves& b) {
  std::string text = "t\tmin";
  char buf[64];
  for (double level : b.levels) {
    std::snprintf(buf, sizeof(buf), "\tp%g", level);
    text += buf;
  }
  text += "\tmax\n";
  for (std::size_t k = 0; k < b.t.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g", b.t[k], b.lo[k]);
    text += buf;
    for (std::size_t l = 0; l < b.levels.size(); ++l) {
      std::snprintf(buf, sizeof(buf), "\t%.17g", b.bands[l][k]);
      text += buf;
    }
    std::snprintf(buf, sizeof(buf), "\t%.17g\n", b.hi[k]);
    text += buf;
  }
  write_text(path, text);
}

void write_spectrum(const std::string& path, const SpectrumReport& s) {
  std::string text = "# window " + s.window + ", unit peak\n";
  text += "frequency_hz\tmagnitude\n";
  char buf[64];
  for (std::size_t k = 0; k < s.frequency.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\n", s.frequency[k],
                  s.magnitude[k]);
    text += buf;
  }
  write_text(path, text);
}

void write_binned_scatter(const std::string& path, const BinnedScatter& b) {
  std::string text = "# bins " + std::to_string(b.n_bins) + ", empty " +
                     std::to_string(b.empty_bins.size()) + "\n";
  text += "x_center\ty_mean\tcount\n";
  char buf[80];
  for (std::size_t i = 0; i < b.x_center.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\t%d\n", b.x_center[i],
                  b.y_mean[i], b.count[i]);
    text += buf;
  }
  write_text(path, text);
}

void write_events(const std::string& path,
                  const std::vector<AnomalyEvent>& events) {
  std::string text =
      "variable\tstart\tend\tpeak_value\tpeak_time\tthreshold\trecovery\tclass\n";
  char buf[160];
  for (const AnomalyEvent& ev : events) {
    const char* cls = ev.classification == EventClass::kShort    ? "short"
                      : ev.classification == EventClass::kLong   ? "long"
                                                                 : "unrecovered";
    std::snprintf(buf, sizeof(buf),
                  "%s\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%s\n",
                  kColumnNames[ev.variable], ev.start, ev.end, ev.peak_value,
                  ev.peak_time, ev.threshold, ev.recovery_time, cls);
    text += buf;
  }
  write_text(path, text);
}

}  // namespace fowt
