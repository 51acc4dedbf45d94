#include "fowt/control.hpp"

#include <algorithm>
#include <cmath>

#include "fowt/common.hpp"

namespace fowt {

Gains gain_schedule(double blade_pitch, const ParameterSet& p) {
  double inertia = p.drivetrain_inertia();
  double denom = p.gear_ratio * p.pitch_sensitivity;
  double schedule = p.schedule_pitch / (p.schedule_pitch + blade_pitch);
  Gains g;
  g.kp = p.proportional_scale * 2.0 * inertia * p.rated_rotor_speed *
         p.servo_damping * p.servo_frequency / denom * schedule;
  g.ki = p.integral_scale * inertia * p.rated_rotor_speed * p.servo_frequency /
         denom * schedule;
  g.kd = p.derivative_gain;
  return g;
}

PidStep pid_step(const ControllerState& cs, double rotor_speed, double dt,
                 const Gains& g, const ParameterSet& p) {
  PidStep out;
  out.next = cs;
  double error = p.gear_ratio * (rotor_speed - p.rated_rotor_speed);

  out.next.integral = cs.integral + error * dt;
  out.next.elapsed = cs.elapsed + dt;

  double integral_term;
  if (p.integral_mode == IntegralMode::kRunningAverage) {
    integral_term = g.ki * out.next.integral / out.next.elapsed;
  } else {
    integral_term = g.ki * out.next.integral;
  }

  double accel = 0.0;
  if (cs.has_prev) accel = (rotor_speed - cs.prev_rotor_speed) / dt;
  if (p.derivative_filter_tau > 0.0) {
    double a = dt / (p.derivative_filter_tau + dt);
    accel = cs.filtered_accel + a * (accel - cs.filtered_accel);
    out.next.filtered_accel = accel;
  }
  out.next.prev_rotor_speed = rotor_speed;
  out.next.has_prev = true;

  out.delta = g.kp * error + integral_term + g.kd * p.gear_ratio * accel;
  out.command = cs.blade_pitch + out.delta;
  return out;
}

double apply_saturation(double command, double prev_pitch, double dt,
                        const ParameterSet& p) {
  double max_step = p.pitch_rate_limit * dt;
  double limited = std::clamp(command, prev_pitch - max_step, prev_pitch + max_step);
  return std::clamp(limited, p.pitch_min, p.pitch_max);
}

ControlUpdate control_update(const ControllerState& cs, double rotor_speed,
                             double dt, const ParameterSet& p) {
  Gains g = gain_schedule(cs.blade_pitch, p);
  PidStep step = pid_step(cs, rotor_speed, dt, g, p);
  ControlUpdate out;
  out.blade_pitch = apply_saturation(step.command, cs.blade_pitch, dt, p);
  out.saturated = out.blade_pitch != step.command;
  out.next = step.next;
  if (out.saturated && p.anti_windup) {
    out.next.integral = cs.integral;  // freeze while pinned
  }
  out.next.blade_pitch = out.blade_pitch;
  return out;
}

bool instability_detected(const std::vector<double>& series, double dt,
                          double window_s) {
  std::size_t window = static_cast<std::size_t>(window_s / dt);
  if (window < 2 || series.size() < 3 * window) return false;
  auto peak_to_peak = [&](std::size_t begin) {
    auto lo = series.begin() + begin;
    auto hi = lo + window;
    auto [mn, mx] = std::minmax_element(lo, hi);
    return *mx - *mn;
  };
  std::size_t last = series.size() - window;
  double p0 = peak_to_peak(last - 2 * window);
  double p1 = peak_to_peak(last - window);
  double p2 = peak_to_peak(last);
  bool growing = p1 > 1.2 * p0 && p2 > 1.2 * p1;
  bool diverged = !std::isfinite(p2) || p2 > 1e3;
  return growing || diverged;
}

TuneResult tune_proportional(const std::function<bool(double)>& unstable,
                             double start_scale, double max_scale) {
  TuneResult r;
  if (!(start_scale > 0.0 && max_scale > start_scale)) {
    throw ConfigError("tune_proportional: need 0 < start_scale < max_scale");
  }
  double prev_stable = 0.0;
  double critical = 0.0;
  for (double a = start_scale; a <= max_scale; a *= 1.5) {
    ++r.evaluations;
    if (unstable(a)) {
      critical = a;
      break;
    }
    prev_stable = a;
  }
  if (critical == 0.0) return r;  // never destabilized; converged stays false
  // Refine the stability boundary between the last stable and first
  // unstable scales.
  for (int i = 0; i < 8 && prev_stable > 0.0; ++i) {
    double mid = 0.5 * (prev_stable + critical);
    ++r.evaluations;
    if (unstable(mid)) {
      critical = mid;
    } else {
      prev_stable = mid;
    }
  }
  r.value = 0.5 * critical;
  r.converged = true;
  return r;
}

TuneResult tune_integral(const std::function<double(double)>& mean_error,
                         double initial_scale, double tolerance,
                         int max_evaluations) {
  TuneResult r;
  if (!(initial_scale > 0.0)) {
    throw ConfigError("tune_integral: initial_scale must be positive");
  }
  double a = initial_scale;
  double e = mean_error(a);
  ++r.evaluations;
  if (std::abs(e) <= tolerance) {
    r.value = a;
    r.converged = true;
    return r;
  }

  // Walk geometrically outward in both directions until the mean error
  // changes sign between neighboring probes, then bisect inside.
  double a_lo = 0.0, e_lo = 0.0, a_hi = 0.0;
  bool bracketed = false;
  double up = a, up_e = e;
  double dn = a, dn_e = e;
  while (r.evaluations < max_evaluations && !bracketed) {
    double next_up = up * 2.0;
    double eu = mean_error(next_up);
    ++r.evaluations;
    if (eu * up_e <= 0.0) {
      a_lo = up; e_lo = up_e; a_hi = next_up;
      bracketed = true;
      break;
    }
    up = next_up;
    up_e = eu;
    if (r.evaluations >= max_evaluations) break;
    double next_dn = dn * 0.5;
    double ed = mean_error(next_dn);
    ++r.evaluations;
    if (ed * dn_e <= 0.0) {
      a_lo = next_dn; e_lo = ed; a_hi = dn;
      bracketed = true;
      break;
    }
    dn = next_dn;
    dn_e = ed;
  }
  if (!bracketed) return r;  // no sign change found within budget
  while (r.evaluations < max_evaluations) {
    double mid = 0.5 * (a_lo + a_hi);
    double em = mean_error(mid);
    ++r.evaluations;
    if (std::abs(em) <= tolerance) {
      r.value = mid;
      r.converged = true;
      return r;
    }
    if (em * e_lo <= 0.0) {
      a_hi = mid;
    } else {
      a_lo = mid;
      e_lo = em;
    }
  }
  return r;
}

SweepResult tune_derivative(const std::function<double(double)>& objective,
                            double lo, double hi, int n_points) {
  if (!(lo > 0.0 && hi > lo && n_points >= 3)) {
    throw ConfigError("tune_derivative: need 0 < lo < hi and >= 3 points");
  }
  SweepResult r;
  r.curve.reserve(n_points);
  double step = std::log(hi / lo) / (n_points - 1);
  std::size_t best = 0;
  for (int i = 0; i < n_points; ++i) {
    double k = lo * std::exp(step * i);
    double obj = objective(k);
    r.curve.push_back({k, obj});
    if (obj < r.curve[best].objective) best = i;
  }
  r.best_gain = r.curve[best].gain;
  r.best_objective = r.curve[best].objective;
  r.interior_minimum = best > 0 && best + 1 < r.curve.size();
  return r;
}

}  // namespace fowt
