#pragma once

#include <functional>
#include <vector>

#include "fowt/params.hpp"

namespace fowt {

struct Gains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

// Proportional and integral gains shrink with blade pitch through the
// factor schedule_pitch / (schedule_pitch + pitch); the derivative gain is
// a configured constant.
Gains gain_schedule(double blade_pitch, const ParameterSet& p);

struct ControllerState {
  double integral = 0.0;        // accumulated gear-scaled speed error * dt
  double elapsed = 0.0;         // controller time, s
  double prev_rotor_speed = 0.0;
  bool has_prev = false;
  double blade_pitch = 0.0;     // last commanded pitch after saturation
  double filtered_accel = 0.0;  // optional low-pass state for the D term
};

struct PidStep {
  double delta = 0.0;         // pitch increment before saturation
  double command = 0.0;       // blade_pitch + delta
  ControllerState next;
};

// One controller evaluation. The speed derivative uses a backward
// difference (zero on the first call). In running-average mode the
// integral term divides by elapsed time.
PidStep pid_step(const ControllerState& cs, double rotor_speed, double dt,
                 const Gains& g, const ParameterSet& p);

// Rate limit relative to the previous pitch first, then range clamp.
double apply_saturation(double command, double prev_pitch, double dt,
                        const ParameterSet& p);

struct ControlUpdate {
  double blade_pitch = 0.0;
  bool saturated = false;
  ControllerState next;
};

// pid_step plus saturation plus anti-windup (integral frozen while the
// saturation is active, when enabled).
ControlUpdate control_update(const ControllerState& cs, double rotor_speed,
                             double dt, const ParameterSet& p);

// Instability heuristic for gain ramping: peak-to-peak amplitude of the
// series grows across consecutive windows.
bool instability_detected(const std::vector<double>& series, double dt,
                          double window_s);

struct TuneResult {
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

// Ramps the proportional scale until the closed loop destabilizes, then
// halves the critical value. `unstable` runs the closed loop at a given
// scale. Fails if no instability appears below `max_scale`.
TuneResult tune_proportional(const std::function<bool(double)>& unstable,
                             double start_scale, double max_scale);

// Drives the mean rotor-speed error to zero in the integral scale by
// bracket expansion and bisection. `mean_error` returns the signed mean
// deviation of rotor speed from rated over the evaluation window.
TuneResult tune_integral(const std::function<double(double)>& mean_error,
                         double initial_scale, double tolerance,
                         int max_evaluations);

struct SweepPoint {
  double gain = 0.0;
  double objective = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> curve;
  double best_gain = 0.0;
  double best_objective = 0.0;
  bool interior_minimum = false;
};

// Grid sweep of the derivative gain minimizing an objective (rotor speed
// standard deviation in the standard wiring).
SweepResult tune_derivative(const std::function<double(double)>& objective,
                            double lo, double hi, int n_points);

}  // namespace fowt
