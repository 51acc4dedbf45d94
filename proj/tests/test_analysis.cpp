#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fowt/analysis.hpp"
#include "fowt/rng.hpp"
#include "support.hpp"

using namespace fowt;

namespace {

// Trajectory scaffold with a shared time axis; every column exists so any
// channel can be addressed.
Trajectory make_traj(std::size_t n, double dt) {
  Trajectory traj;
  for (int c = 0; c < kNumColumns; ++c) {
    traj.cols[c].assign(n, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    traj.cols[kColT][i] = static_cast<double>(i) * dt;
  }
  return traj;
}

std::vector<double> gaussian_samples(std::size_t n, std::uint64_t seed) {
  UniformRng rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = rng.next_gaussian();
  return out;
}

}  // namespace

TEST_CASE("pdf integrates to one on uniform samples") {
  std::vector<double> samples(10000);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = static_cast<double>(i) / 9999.0;
  }
  Histogram h = pdf(samples, 20);
  CHECK(h.count == 10000);
  CHECK_FALSE(h.degenerate);
  REQUIRE(h.edges.size() == 21);
  REQUIRE(h.density.size() == 20);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 1.0);
  double area = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    area += h.density[i] * (h.edges[i + 1] - h.edges[i]);
    CHECK(h.density[i] == doctest::Approx(1.0).epsilon(0.01));
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pdf matches the normal density at the center") {
  std::vector<double> samples = gaussian_samples(100000, 31);
  Histogram h = pdf(samples, 200);
  double area = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    area += h.density[i] * (h.edges[i + 1] - h.edges[i]);
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
  // Density in the bin containing zero should be close to 1/sqrt(2 pi).
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    if (h.edges[i] <= 0.0 && 0.0 < h.edges[i + 1]) {
      CHECK(h.density[i] == doctest::Approx(0.3989).epsilon(0.08));
    }
  }
}

TEST_CASE("pdf rejects unusable input") {
  CHECK_THROWS_AS(pdf({}, 10), std::invalid_argument);
  CHECK_THROWS_AS(pdf({1.0}, 10), std::invalid_argument);
  CHECK_THROWS_AS(pdf({1.0, 2.0}, 0), std::invalid_argument);
}

TEST_CASE("pdf flags all-identical samples instead of failing") {
  Histogram h = pdf({3.25, 3.25, 3.25}, 10);
  CHECK(h.degenerate);
  CHECK(h.count == 3);
  REQUIRE(h.edges.size() == 2);
  CHECK(h.edges[0] == 2.75);
  CHECK(h.edges[1] == 3.75);
  REQUIRE(h.density.size() == 1);
  CHECK(h.density[0] == 1.0);
}

TEST_CASE("series extremes report value, time and index") {
  std::vector<double> t(10), v(10, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.5 * static_cast<double>(i);
  v[3] = 5.0;
  v[6] = 5.0;   // tie, the first occurrence must win
  v[8] = -2.0;
  Extremes e = series_extremes(t, v);
  CHECK(e.max == 5.0);
  CHECK(e.i_max == 3);
  CHECK(e.t_max == 1.5);
  CHECK(e.min == -2.0);
  CHECK(e.i_min == 8);
  CHECK(e.t_min == 4.0);

  CHECK_THROWS_AS(series_extremes({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(series_extremes({0.0}, {1.0, 2.0}), std::invalid_argument);

  Trajectory traj = make_traj(10, 0.5);
  traj.cols[kColHeave] = v;
  Extremes e2 = trajectory_extremes(traj, kColHeave);
  CHECK(e2.max == 5.0);
  CHECK(e2.i_max == 3);
  CHECK(e2.min == -2.0);
}

TEST_CASE("percentile interpolates between order statistics") {
  std::vector<double> s{5.0, 3.0, 1.0, 2.0, 4.0};
  CHECK(percentile(s, 0.0) == 1.0);
  CHECK(percentile(s, 100.0) == 5.0);
  CHECK(percentile(s, 50.0) == 3.0);
  CHECK(percentile(s, 25.0) == 2.0);
  CHECK(percentile(s, 12.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(percentile(s, 90.0) == doctest::Approx(4.6).epsilon(1e-15));
  CHECK(percentile(s, -10.0) == 1.0);
  CHECK(percentile(s, 400.0) == 5.0);
  CHECK_THROWS_AS(percentile({}, 50.0), std::invalid_argument);
}

TEST_CASE("percentile bands order the ensemble pointwise") {
  Trajectory r0 = make_traj(3, 0.5);
  Trajectory r1 = make_traj(3, 0.5);
  Trajectory r2 = make_traj(3, 0.5);
  r0.cols[kColSurge] = {0.0, 10.0, 20.0};
  r1.cols[kColSurge] = {1.0, 11.0, 21.0};
  r2.cols[kColSurge] = {2.0, 12.0, 22.0};
  std::vector<const Trajectory*> runs{&r0, &r1, &r2};
  BandCurves b = percentile_bands(runs, kColSurge, {0.0, 50.0, 100.0});
  REQUIRE(b.bands.size() == 3);
  CHECK(b.t == r0.col(kColT));
  CHECK(b.bands[0] == std::vector<double>{0.0, 10.0, 20.0});
  CHECK(b.bands[1] == std::vector<double>{1.0, 11.0, 21.0});
  CHECK(b.bands[2] == std::vector<double>{2.0, 12.0, 22.0});
  CHECK(b.lo == b.bands[0]);
  CHECK(b.hi == b.bands[2]);

  Trajectory skewed = make_traj(3, 0.5);
  skewed.cols[kColT][1] += 1e-9;
  std::vector<const Trajectory*> bad{&r0, &skewed};
  CHECK_THROWS_AS(percentile_bands(bad, kColSurge, {50.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(percentile_bands({}, kColSurge, {50.0}),
                  std::invalid_argument);
}

TEST_CASE("fft spectrum pins a pure tone to its bin") {
  const double dt = 0.01;
  const std::size_t n = 1000;
  std::vector<double> tone(n);
  for (std::size_t i = 0; i < n; ++i) {
    tone[i] = std::sin(2.0 * 3.141592653589793 * 5.0 * static_cast<double>(i) * dt);
  }
  for (const char* window : {"hann", "rect"}) {
    SpectrumReport rep = fft_spectrum(tone, dt, window);
    CHECK(rep.window == window);
    CHECK(rep.df == doctest::Approx(0.1).epsilon(1e-12));
    std::size_t peak = 0;
    for (std::size_t k = 1; k < rep.magnitude.size(); ++k) {
      if (rep.magnitude[k] > rep.magnitude[peak]) peak = k;
    }
    CHECK(rep.magnitude[peak] == 1.0);
    CHECK(std::abs(rep.frequency[peak] - 5.0) < 0.5 * rep.df);
  }
}

TEST_CASE("fft spectrum keeps the mean in the zero bin") {
  std::vector<double> flat(64, 3.0);
  SpectrumReport rep = fft_spectrum(flat, 0.5, "rect");
  std::size_t peak = 0;
  for (std::size_t k = 1; k < rep.magnitude.size(); ++k) {
    if (rep.magnitude[k] > rep.magnitude[peak]) peak = k;
  }
  CHECK(peak == 0);
  CHECK(rep.frequency[0] == 0.0);
  CHECK(rep.magnitude[0] == 1.0);
}

TEST_CASE("fft spectrum rejects unusable input") {
  std::vector<double> v(15, 1.0);
  CHECK_THROWS_AS(fft_spectrum(v, 0.1), std::invalid_argument);
  std::vector<double> ok(64, 1.0);
  CHECK_THROWS_AS(fft_spectrum(ok, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fft_spectrum(ok, 0.1, "hamming"), std::invalid_argument);
}

TEST_CASE("binned scatter averages y within x bins") {
  std::vector<double> x(100), y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x[i] = static_cast<double>(i);
    y[i] = 2.0 * x[i];
  }
  BinnedScatter b = binned_scatter(x, y, 10);
  REQUIRE(b.x_center.size() == 10);
  CHECK(b.empty_bins.empty());
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(b.count[k] == 10);
    CHECK(b.y_mean[k] ==
          doctest::Approx(2.0 * (10.0 * static_cast<double>(k) + 4.5))
              .epsilon(1e-12));
    CHECK(b.x_center[k] ==
          doctest::Approx(9.9 * (static_cast<double>(k) + 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("binned scatter lists empty bins") {
  BinnedScatter b = binned_scatter({0.0, 1.0, 9.0}, {0.0, 2.0, 18.0}, 9);
  REQUIRE(b.x_center.size() == 3);
  CHECK(b.empty_bins == std::vector<int>{2, 3, 4, 5, 6, 7});
  CHECK(b.y_mean[0] == 0.0);
  CHECK(b.y_mean[1] == 2.0);
  CHECK(b.y_mean[2] == 18.0);

  BinnedScatter flat = binned_scatter({2.0, 2.0}, {1.0, 3.0}, 5);
  REQUIRE(flat.x_center.size() == 1);
  CHECK(flat.x_center[0] == 2.0);
  CHECK(flat.y_mean[0] == 2.0);
  CHECK(flat.count[0] == 2);
  CHECK(flat.empty_bins == std::vector<int>{1, 2, 3, 4});

  CHECK_THROWS_AS(binned_scatter({1.0}, {1.0, 2.0}, 5), std::invalid_argument);
  CHECK_THROWS_AS(binned_scatter({}, {}, 5), std::invalid_argument);
  CHECK_THROWS_AS(binned_scatter({1.0, 2.0}, {1.0, 2.0}, 0),
                  std::invalid_argument);
}

TEST_CASE("trend fit recovers an exact line") {
  std::vector<double> x(10), y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    x[i] = static_cast<double>(i);
    y[i] = 3.0 * x[i] + 1.0;
  }
  TrendLine t = fit_trend(x, y);
  CHECK(t.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(t.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.slope_stderr == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("trend fit matches a hand-computed example") {
  TrendLine t = fit_trend({0.0, 1.0, 2.0}, {0.0, 1.0, 3.0});
  CHECK(t.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(t.intercept == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
  CHECK(t.slope_stderr == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-12));

  CHECK_THROWS_AS(fit_trend({0.0, 1.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_trend({2.0, 2.0, 2.0}, {0.0, 1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("trend fit separates flat from sloped clouds") {
  std::vector<double> x = gaussian_samples(5000, 101);
  std::vector<double> noise = gaussian_samples(5000, 202);
  TrendLine flat = fit_trend(x, noise);
  CHECK(std::abs(flat.slope) < 3.0 * flat.slope_stderr);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + 0.1 * noise[i];
  TrendLine sloped = fit_trend(x, y);
  CHECK(sloped.slope > 10.0 * sloped.slope_stderr);
  CHECK(sloped.slope == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("event detection brackets threshold excursions") {
  Trajectory traj = make_traj(300, 1.0);
  auto& v = traj.cols[kColSurge];
  for (std::size_t i = 100; i <= 120; ++i) v[i] = 10.0;

  ThresholdSpec ts;
  ts.baseline = 0.0;
  ts.absolute = 5.0;
  auto events = detect_events(traj, kColSurge, ts);
  REQUIRE(events.size() == 1);
  CHECK(events[0].variable == kColSurge);
  CHECK(events[0].start == 100.0);
  CHECK(events[0].end == 121.0);
  CHECK(events[0].peak_value == 10.0);
  CHECK(events[0].peak_time == 100.0);
  CHECK(events[0].threshold == 5.0);

  // The sigma rule selects the same threshold.
  ThresholdSpec sigma;
  sigma.sigma_factor = 2.5;
  sigma.baseline_sigma = 2.0;
  auto events2 = detect_events(traj, kColSurge, sigma);
  REQUIRE(events2.size() == 1);
  CHECK(events2[0].threshold == 5.0);
  CHECK(events2[0].start == 100.0);

  ThresholdSpec bad;
  CHECK_THROWS_AS(detect_events(traj, kColSurge, bad), std::invalid_argument);

  Trajectory calm = make_traj(100, 1.0);
  CHECK(detect_events(calm, kColSurge, ts).empty());
}

TEST_CASE("nearby excursions merge below the merge window") {
  Trajectory traj = make_traj(300, 1.0);
  auto& v = traj.cols[kColHeave];
  for (std::size_t i = 100; i <= 120; ++i) v[i] = 10.0;
  for (std::size_t i = 140; i <= 145; ++i) v[i] = -9.0;

  ThresholdSpec ts;
  ts.absolute = 5.0;
  ts.merge_window = 30.0;  // gap of 20 s merges
  auto merged = detect_events(traj, kColHeave, ts);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].start == 100.0);
  CHECK(merged[0].end == 146.0);
  CHECK(merged[0].peak_value == 10.0);

  ts.merge_window = 10.0;  // gap of 20 s stays split
  auto split = detect_events(traj, kColHeave, ts);
  REQUIRE(split.size() == 2);
  CHECK(split[0].end == 121.0);
  CHECK(split[1].start == 140.0);
  CHECK(split[1].peak_value == -9.0);
}

TEST_CASE("events running to the trajectory end are closed past it") {
  Trajectory traj = make_traj(100, 1.0);
  auto& v = traj.cols[kColSurge];
  for (std::size_t i = 90; i < 100; ++i) v[i] = 10.0;
  ThresholdSpec ts;
  ts.absolute = 5.0;
  auto events = detect_events(traj, kColSurge, ts);
  REQUIRE(events.size() == 1);
  CHECK(events[0].start == 90.0);
  CHECK(events[0].end == 100.0);  // one step past the last sample
}

TEST_CASE("classification separates fast and slow recoveries") {
  QuietSpec qs;
  qs.baseline = 0.0;
  qs.band = 2.0;
  qs.dwell = 60.0;
  qs.short_cut = 200.0;

  AnomalyEvent ev;
  ev.variable = kColPitch;
  ev.end = 150.0;

  Trajectory fast = make_traj(1000, 1.0);
  for (std::size_t i = 150; i <= 165; ++i) fast.cols[kColPitch][i] = 8.0;
  Classification cf = classify_event(fast, ev, qs);
  CHECK(cf.cls == EventClass::kShort);
  CHECK(cf.recovery_time == doctest::Approx(16.0).epsilon(1e-12));

  Trajectory slow = make_traj(1000, 1.0);
  for (std::size_t i = 150; i <= 850; ++i) slow.cols[kColPitch][i] = 8.0;
  Classification cs = classify_event(slow, ev, qs);
  CHECK(cs.cls == EventClass::kLong);
  CHECK(cs.recovery_time == doctest::Approx(701.0).epsilon(1e-12));

  Trajectory stuck = make_traj(1000, 1.0);
  for (std::size_t i = 150; i < 1000; ++i) stuck.cols[kColPitch][i] = 8.0;
  Classification cu = classify_event(stuck, ev, qs);
  CHECK(cu.cls == EventClass::kUnrecovered);
  CHECK(cu.recovery_time == doctest::Approx(849.0).epsilon(1e-12));
}

TEST_CASE("a blip inside the dwell window restarts the quiet clock") {
  QuietSpec qs;
  qs.band = 2.0;
  qs.dwell = 60.0;
  AnomalyEvent ev;
  ev.variable = kColPitch;
  ev.end = 150.0;

  Trajectory traj = make_traj(1000, 1.0);
  for (std::size_t i = 150; i <= 165; ++i) traj.cols[kColPitch][i] = 8.0;
  traj.cols[kColPitch][200] = 8.0;  // would-be recovery is interrupted
  Classification c = classify_event(traj, ev, qs);
  CHECK(c.cls == EventClass::kShort);
  CHECK(c.recovery_time == doctest::Approx(51.0).epsilon(1e-12));

  QuietSpec sigma;
  sigma.band = 0.0;
  sigma.sigma_factor = 2.0;
  sigma.baseline_sigma = 1.0;  // same band of 2.0 through the sigma rule
  Classification c2 = classify_event(traj, ev, sigma);
  CHECK(c2.recovery_time == doctest::Approx(51.0).epsilon(1e-12));

  QuietSpec bad;
  bad.band = 0.0;
  bad.sigma_factor = 0.0;
  CHECK_THROWS_AS(classify_event(traj, ev, bad), std::invalid_argument);
}

TEST_CASE("ks distance discriminates sample distributions") {
  CHECK(ks_distance({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_distance({0.0, 1.0, 2.0}, {10.0, 11.0, 12.0}) == 1.0);

  std::vector<double> a(1000), b(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    a[i] = static_cast<double>(i) / 999.0;
    b[i] = a[i] + 0.5;
  }
  CHECK(ks_distance(a, b) == doctest::Approx(0.5).epsilon(0.01));

  std::vector<double> g1 = gaussian_samples(2000, 7);
  std::vector<double> g2 = gaussian_samples(2000, 8);
  CHECK(ks_distance(g1, g2) < 0.06);

  CHECK_THROWS_AS(ks_distance({}, {1.0}), std::invalid_argument);
}

TEST_CASE("channel correlation is the Pearson coefficient") {
  std::vector<double> a(10), up(10), down(10);
  for (std::size_t i = 0; i < 10; ++i) {
    a[i] = static_cast<double>(i);
    up[i] = 2.0 * a[i] + 3.0;
    down[i] = -a[i];
  }
  CHECK(channel_correlation(a, up) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(channel_correlation(a, down) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(channel_correlation(a, std::vector<double>(10, 4.0)) == 0.0);
  CHECK(channel_correlation({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0}) == 0.5);
  CHECK_THROWS_AS(channel_correlation({1.0}, {1.0, 2.0}),
                  std::invalid_argument);

  std::vector<double> g1 = gaussian_samples(5000, 55);
  std::vector<double> g2 = gaussian_samples(5000, 66);
  CHECK(std::abs(channel_correlation(g1, g2)) < 0.05);
}

TEST_CASE("extreme collocation accepts independent channels") {
  const std::size_t runs_n = 400, len = 129;
  std::vector<Trajectory> runs(runs_n);
  std::vector<const Trajectory*> ptrs;
  for (std::size_t r = 0; r < runs_n; ++r) {
    runs[r] = make_traj(len, 1.0);
    UniformRng rng(1000 + r);
    for (std::size_t i = 0; i < len; ++i) {
      runs[r].cols[kColHeave][i] = rng.next_gaussian();
      runs[r].cols[kColPitch][i] = rng.next_gaussian();
    }
    ptrs.push_back(&runs[r]);
  }
  CollocationReport rep = extreme_collocation(ptrs);
  CHECK(rep.pitch_at_heave_max.size() == runs_n);
  CHECK(rep.ks_pitch_at_heave_max < 0.1);
  CHECK(rep.ks_pitch_at_heave_min < 0.1);
  CHECK(rep.ks_heave_at_pitch_max < 0.1);
  CHECK(rep.ks_heave_at_pitch_min < 0.1);
  CHECK(rep.max_min_ks_pitch < 0.15);
  CHECK(rep.max_min_ks_heave < 0.15);
}

TEST_CASE("extreme collocation rejects coupled channels") {
  const std::size_t runs_n = 200, len = 129;
  std::vector<Trajectory> runs(runs_n);
  std::vector<const Trajectory*> ptrs;
  for (std::size_t r = 0; r < runs_n; ++r) {
    runs[r] = make_traj(len, 1.0);
    UniformRng rng(4000 + r);
    for (std::size_t i = 0; i < len; ++i) {
      double v = rng.next_gaussian();
      runs[r].cols[kColHeave][i] = v;
      runs[r].cols[kColPitch][i] = v;  // perfectly coupled
    }
    ptrs.push_back(&runs[r]);
  }
  CollocationReport rep = extreme_collocation(ptrs);
  CHECK(rep.ks_pitch_at_heave_max > 0.5);
  CHECK(rep.ks_heave_at_pitch_min > 0.5);
  CHECK(rep.max_min_ks_pitch > 0.9);
  CHECK(rep.max_min_ks_heave > 0.9);
}

TEST_CASE("attribution separates wind driven events") {
  const std::size_t n = 500;
  std::vector<double> source(n);
  for (std::size_t i = 0; i < n; ++i) {
    source[i] = std::sin(0.05 * static_cast<double>(i));
  }
  UniformRng rng(17);
  std::vector<double> similar(n), unrelated(n);
  for (std::size_t i = 0; i < n; ++i) {
    similar[i] = source[i] + 0.05 * rng.next_gaussian();
    unrelated[i] = rng.next_gaussian();
  }
  std::vector<const std::vector<double>*> same_wind{&similar};
  std::vector<const std::vector<double>*> same_wave{&unrelated};

  AttributionReport rep = attribute_event(source, same_wind, same_wave);
  CHECK(rep.same_wind_correlation > 0.9);
  CHECK(std::abs(rep.same_wave_correlation) < 0.3);
  CHECK(rep.wind_consistent);

  AttributionReport flipped = attribute_event(source, same_wave, same_wind);
  CHECK_FALSE(flipped.wind_consistent);

  AttributionReport empty = attribute_event(source, {}, {});
  CHECK(empty.same_wind_correlation == 0.0);
  CHECK_FALSE(empty.wind_consistent);
}

TEST_CASE("report writers emit readable tables") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "fowt_analysis_write";
  fs::create_directories(dir);

  Histogram h = pdf({0.0, 0.5, 1.0, 1.5}, 2);
  std::string hist_path = (dir / "hist.tsv").string();
  write_histogram(hist_path, h);
  std::ifstream in(hist_path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  CHECK(text.find("left\tright\tdensity") != std::string::npos);

  AnomalyEvent ev;
  ev.variable = kColPitch;
  ev.classification = EventClass::kShort;
  std::string ev_path = (dir / "events.tsv").string();
  write_events(ev_path, {ev});
  std::ifstream in2(ev_path);
  std::stringstream ss2;
  ss2 << in2.rdbuf();
  CHECK(ss2.str().find("\tshort") != std::string::npos);
  CHECK(ss2.str().find("pitch") != std::string::npos);

  fs::remove_all(dir);
}
