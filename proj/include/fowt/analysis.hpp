#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fowt/sim.hpp"

namespace fowt {

// Normalized empirical density: sum(density * width) = 1.
struct Histogram {
  std::vector<double> edges;    // n_bins + 1, increasing
  std::vector<double> density;  // n_bins
  std::size_t count = 0;
  bool degenerate = false;  // all samples identical, single unit-width bin
};

// Throws std::invalid_argument below two samples. All-identical samples
// produce a flagged single-bin histogram instead of an error.
Histogram pdf(const std::vector<double>& samples, int n_bins);

struct Extremes {
  double min = 0.0;
  double max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t i_min = 0;
  std::size_t i_max = 0;
};

// Exact extrema over the recorded series; first occurrence wins ties.
Extremes series_extremes(const std::vector<double>& t,
                         const std::vector<double>& v);
Extremes trajectory_extremes(const Trajectory& traj, Column variable);

// Pointwise ensemble percentiles plus min/max envelopes. All trajectories
// must share the time axis exactly.
struct BandCurves {
  std::vector<double> t;
  std::vector<double> levels;              // percent, as requested
  std::vector<std::vector<double>> bands;  // [level][time]
  std::vector<double> lo;                  // pointwise minimum
  std::vector<double> hi;                  // pointwise maximum
};
BandCurves percentile_bands(const std::vector<const Trajectory*>& runs,
                            Column variable,
                            const std::vector<double>& levels);

// Linear-interpolated empirical percentile (the common order-statistic
// definition), level in percent.
double percentile(std::vector<double> samples, double level);

// Magnitude spectrum normalized to unit peak. Window "hann" (default) or
// "rect". The mean is kept, so a constant series concentrates at f = 0.
struct SpectrumReport {
  std::vector<double> frequency;  // Hz
  std::vector<double> magnitude;  // unit peak
  std::string window;
  double df = 0.0;
};
SpectrumReport fft_spectrum(const std::vector<double>& series, double dt,
                            const std::string& window = "hann");

// Equal-width x bins with per-bin mean of y; empty bins are omitted from
// the points and listed separately.
struct BinnedScatter {
  std::vector<double> x_center;
  std::vector<double> y_mean;
  std::vector<int> count;
  std::vector<int> empty_bins;
  int n_bins = 0;
};
BinnedScatter binned_scatter(const std::vector<double>& x,
                             const std::vector<double>& y, int n_bins = 100);

// Ordinary least squares line with the standard error of the slope.
struct TrendLine {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
TrendLine fit_trend(const std::vector<double>& x,
                    const std::vector<double>& y);

enum class EventClass { kShort, kLong, kUnrecovered };

// Excursion of one variable beyond a threshold around a baseline.
// Intervals are [start, end): end is the first sample back inside, or one
// step past the trajectory end.
struct AnomalyEvent {
  Column variable = kColSurge;
  double start = 0.0;
  double end = 0.0;
  double peak_value = 0.0;
  double peak_time = 0.0;
  double threshold = 0.0;
  double recovery_time = 0.0;
  EventClass classification = EventClass::kUnrecovered;
};

// Threshold around the campaign baseline: absolute level, or
// sigma_factor * baseline_sigma when absolute is zero.
struct ThresholdSpec {
  double baseline = 0.0;
  double absolute = 0.0;
  double sigma_factor = 0.0;
  double baseline_sigma = 0.0;
  double merge_window = 30.0;  // s, gaps shorter than this are merged
};

std::vector<AnomalyEvent> detect_events(const Trajectory& traj,
                                        Column variable,
                                        const ThresholdSpec& ts);

// Recovery rule: first instant after the event from which the variable
// stays inside the quiet band for a full dwell window.
struct QuietSpec {
  double baseline = 0.0;
  double band = 0.0;          // absolute half width; 0 selects sigma rule
  double sigma_factor = 2.0;  // band = sigma_factor * baseline_sigma
  double baseline_sigma = 0.0;
  double dwell = 60.0;     // s
  double short_cut = 200.0;  // s, classification boundary
};

struct Classification {
  EventClass cls = EventClass::kUnrecovered;
  double recovery_time = 0.0;
};
Classification classify_event(const Trajectory& traj, const AnomalyEvent& ev,
                              const QuietSpec& qs);

// Two-sample Kolmogorov-Smirnov distance, sup |F_a - F_b|.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Pearson correlation of two equal-length series.
double channel_correlation(const std::vector<double>& a,
                           const std::vector<double>& b);

// Values of one variable sampled at the instants where the other attains
// its per-run extremes, compared against the pooled marginal.
struct CollocationReport {
  std::vector<double> pitch_at_heave_max;
  std::vector<double> pitch_at_heave_min;
  std::vector<double> heave_at_pitch_max;
  std::vector<double> heave_at_pitch_min;
  double ks_pitch_at_heave_max = 0.0;  // vs pooled pitch marginal
  double ks_pitch_at_heave_min = 0.0;
  double ks_heave_at_pitch_max = 0.0;  // vs pooled heave marginal
  double ks_heave_at_pitch_min = 0.0;
  double max_min_ks_pitch = 0.0;  // between max- and min-conditioned sets
  double max_min_ks_heave = 0.0;
};
CollocationReport extreme_collocation(const std::vector<const Trajectory*>& runs);

// Counterfactual attribution: an event reads as wind driven when runs
// sharing the wind keep the pitch signature while runs sharing only the
// waves lose it.
struct AttributionReport {
  double same_wind_correlation = 0.0;
  double same_wave_correlation = 0.0;
  bool wind_consistent = false;
};
AttributionReport attribute_event(
    const std::vector<double>& source_pitch,
    const std::vector<const std::vector<double>*>& same_wind_pitch,
    const std::vector<const std::vector<double>*>& same_wave_pitch,
    double threshold = 0.5);

// Delimited-text report writers for external plotting.
void write_histogram(const std::string& path, const Histogram& h);
void write_bands(const std::string& path, const BandCurves& b);
void write_spectrum(const std::string& path, const SpectrumReport& s);
void write_binned_scatter(const std::string& path, const BinnedScatter& b);
void write_events(const std::string& path,
                  const std::vector<AnomalyEvent>& events);

}  // namespace fowt
