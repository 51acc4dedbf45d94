#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fowt/common.hpp"
#include "fowt/control.hpp"
#include "fowt/rng.hpp"
#include "support.hpp"

using namespace fowt;

TEST_CASE("gain schedule shape") {
  ParameterSet p = support::turbine_params();
  Gains flat = gain_schedule(0.0, p);
  CHECK(flat.kp > 0.0);
  CHECK(flat.ki > 0.0);
  CHECK(flat.kd == p.derivative_gain);

  // Independent assembly of the fine-pitch gains.
  double inertia = p.rotor_inertia + p.gear_ratio * p.gear_ratio * p.generator_inertia;
  double denom = p.gear_ratio * p.pitch_sensitivity;
  CHECK(flat.kp == doctest::Approx(p.proportional_scale * 2.0 * inertia *
                                   p.rated_rotor_speed * p.servo_damping *
                                   p.servo_frequency / denom)
                       .epsilon(1e-14));
  CHECK(flat.ki == doctest::Approx(p.integral_scale * inertia *
                                   p.rated_rotor_speed * p.servo_frequency /
                                   denom)
                       .epsilon(1e-14));

  // At the scheduling pitch both proportional and integral gains halve
  // exactly.
  Gains half = gain_schedule(p.schedule_pitch, p);
  CHECK(half.kp == 0.5 * flat.kp);
  CHECK(half.ki == 0.5 * flat.ki);
  CHECK(half.kd == flat.kd);

  double prev_kp = flat.kp;
  double prev_ki = flat.ki;
  for (int deg = 1; deg <= 30; ++deg) {
    Gains g = gain_schedule(deg_to_rad(1.0 * deg), p);
    CHECK(g.kp > 0.0);
    CHECK(g.kp < prev_kp);
    CHECK(g.ki < prev_ki);
    CHECK(g.kd == p.derivative_gain);
    prev_kp = g.kp;
    prev_ki = g.ki;
  }
}

TEST_CASE("pid rests at rated speed") {
  ParameterSet p = support::turbine_params();
  Gains g = gain_schedule(0.0, p);
  ControllerState cs;
  cs.blade_pitch = 0.05;
  PidStep step = pid_step(cs, p.rated_rotor_speed, 0.05, g, p);
  CHECK(step.delta == 0.0);
  CHECK(step.command == 0.05);
  CHECK(step.next.integral == 0.0);
  CHECK(step.next.elapsed == 0.05);
  CHECK(step.next.has_prev);

  // Overspeed asks for more pitch on the very first call.
  PidStep fast = pid_step(cs, p.rated_rotor_speed + 0.05, 0.05, g, p);
  CHECK(fast.delta > 0.0);
  PidStep slow = pid_step(cs, p.rated_rotor_speed - 0.05, 0.05, g, p);
  CHECK(slow.delta < 0.0);
}

TEST_CASE("plain integral accumulates linearly") {
  ParameterSet p = support::turbine_params();
  p.integral_mode = IntegralMode::kPlain;
  Gains g;
  g.ki = 2.5e-4;
  const double dt = 0.1;
  const double speed = p.rated_rotor_speed + 0.01;
  const double error = p.gear_ratio * (speed - p.rated_rotor_speed);

  ControllerState cs;
  for (int n = 1; n <= 5; ++n) {
    PidStep step = pid_step(cs, speed, dt, g, p);
    CHECK(step.delta ==
          doctest::Approx(g.ki * error * n * dt).epsilon(1e-12));
    cs = step.next;
  }
}

TEST_CASE("running average integral holds a constant term") {
  ParameterSet p = support::turbine_params();
  REQUIRE(p.integral_mode == IntegralMode::kRunningAverage);
  Gains g;
  g.ki = 2.5e-4;
  const double dt = 0.1;
  const double speed = p.rated_rotor_speed + 0.01;
  const double error = p.gear_ratio * (speed - p.rated_rotor_speed);

  ControllerState cs;
  for (int n = 1; n <= 5; ++n) {
    PidStep step = pid_step(cs, speed, dt, g, p);
    // integral / elapsed is the average error, constant here.
    CHECK(step.delta == doctest::Approx(g.ki * error).epsilon(1e-12));
    cs = step.next;
  }
}

TEST_CASE("derivative term uses a backward difference") {
  ParameterSet p = support::turbine_params();
  Gains g;
  g.kd = 0.02;
  const double dt = 0.05;

  ControllerState cs;
  PidStep first = pid_step(cs, 1.25, dt, g, p);
  CHECK(first.delta == 0.0);  // no previous sample yet

  PidStep second = pid_step(first.next, 1.27, dt, g, p);
  double accel = (1.27 - 1.25) / dt;
  CHECK(second.delta == doctest::Approx(g.kd * p.gear_ratio * accel).epsilon(1e-12));
}

TEST_CASE("derivative low pass filter softens the first jump") {
  ParameterSet p = support::turbine_params();
  p.derivative_filter_tau = 0.5;
  Gains g;
  g.kd = 0.02;
  const double dt = 0.1;

  ControllerState cs;
  PidStep first = pid_step(cs, 1.25, dt, g, p);
  CHECK(first.delta == 0.0);
  CHECK(first.next.filtered_accel == 0.0);

  PidStep second = pid_step(first.next, 1.27, dt, g, p);
  double raw = (1.27 - 1.25) / dt;
  double blend = dt / (p.derivative_filter_tau + dt);
  CHECK(second.delta ==
        doctest::Approx(g.kd * p.gear_ratio * blend * raw).epsilon(1e-12));
  CHECK(second.next.filtered_accel ==
        doctest::Approx(blend * raw).epsilon(1e-12));
}

TEST_CASE("saturation clamps rate before range") {
  ParameterSet p = support::turbine_params();
  const double dt = 0.05;
  double max_step = p.pitch_rate_limit * dt;

  double prev = 0.1;
  CHECK(apply_saturation(prev + 0.4 * max_step, prev, dt, p) ==
        prev + 0.4 * max_step);
  CHECK(apply_saturation(prev + 3.0 * max_step, prev, dt, p) ==
        prev + max_step);
  CHECK(apply_saturation(prev - 3.0 * max_step, prev, dt, p) ==
        prev - max_step);

  // Range clamp wins near the travel stops.
  CHECK(apply_saturation(-0.5, 0.2 * max_step, dt, p) == p.pitch_min);
  double near_top = p.pitch_max - 0.2 * max_step;
  CHECK(apply_saturation(p.pitch_max + 1.0, near_top, dt, p) == p.pitch_max);

  UniformRng rng(5);
  for (int i = 0; i < 200; ++i) {
    double pv = p.pitch_max * rng.next();
    double cmd = -1.0 + 3.0 * rng.next();
    double out = apply_saturation(cmd, pv, dt, p);
    CHECK(out >= p.pitch_min);
    CHECK(out <= p.pitch_max);
    CHECK(std::abs(out - pv) <= max_step * (1.0 + 1e-12));
  }
}

TEST_CASE("anti windup freezes the integral while pinned") {
  ParameterSet p = support::turbine_params();
  const double dt = 0.05;
  ControllerState cs;
  cs.blade_pitch = 0.1;
  cs.integral = 0.02;
  cs.elapsed = 4.0;

  // A huge overspeed slams into the rate limit.
  ControlUpdate u = control_update(cs, p.rated_rotor_speed + 5.0, dt, p);
  CHECK(u.saturated);
  CHECK(u.blade_pitch == doctest::Approx(0.1 + p.pitch_rate_limit * dt).epsilon(1e-12));
  CHECK(u.next.integral == 0.02);  // frozen
  CHECK(u.next.blade_pitch == u.blade_pitch);

  ParameterSet open = p;
  open.anti_windup = false;
  ControlUpdate w = control_update(cs, p.rated_rotor_speed + 5.0, dt, open);
  CHECK(w.saturated);
  CHECK(w.next.integral > 0.02);  // keeps accumulating

  // A small error passes through unclamped.
  ControlUpdate calm = control_update(cs, p.rated_rotor_speed + 0.001, dt, p);
  CHECK_FALSE(calm.saturated);
  CHECK(calm.next.integral > 0.02);
}

TEST_CASE("instability heuristic") {
  const double dt = 0.05;
  const double window = 60.0;
  int n = 4000;

  std::vector<double> growing(n), decaying(n);
  for (int i = 0; i < n; ++i) {
    double t = i * dt;
    double carrier = std::sin(2.0 * kPi * 0.2 * t);
    growing[i] = std::exp(0.01 * t) * carrier;
    decaying[i] = std::exp(-0.01 * t) * carrier;
  }
  CHECK(instability_detected(growing, dt, window));
  CHECK_FALSE(instability_detected(decaying, dt, window));

  // A quiet run that explodes right at the end trips the amplitude bound.
  std::vector<double> burst(n, 0.0);
  for (int i = 2800; i < n; ++i) burst[i] = (i % 2 == 0) ? 600.0 : -600.0;
  CHECK(instability_detected(burst, dt, window));

  // Too little history to judge.
  std::vector<double> brief(3 * 1200 - 1, 0.0);
  brief.back() = 5000.0;
  CHECK_FALSE(instability_detected(brief, dt, window));
}

TEST_CASE("proportional ramp finds half the critical scale") {
  auto unstable = [](double s) { return s > 1.0; };
  TuneResult r = tune_proportional(unstable, 0.02, 64.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.5).epsilon(0.002));
  CHECK(r.evaluations == 19);  // 11 ramp probes plus 8 bisections

  TuneResult never = tune_proportional([](double) { return false; }, 0.02, 64.0);
  CHECK_FALSE(never.converged);
  CHECK(never.value == 0.0);
  CHECK(never.evaluations == 20);

  // Unstable from the very first probe: no bracket below, so the ramp
  // answer is simply half the first scale.
  TuneResult immediate = tune_proportional([](double) { return true; }, 0.02, 64.0);
  CHECK(immediate.converged);
  CHECK(immediate.value == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(immediate.evaluations == 1);

  CHECK_THROWS_AS(tune_proportional(unstable, 0.0, 64.0), ConfigError);
  CHECK_THROWS_AS(tune_proportional(unstable, 2.0, 1.0), ConfigError);
}

TEST_CASE("integral tuner drives the mean error to zero") {
  auto err = [](double a) { return a - 0.3; };
  TuneResult r = tune_integral(err, 1.0, 1e-6, 40);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(r.evaluations <= 40);

  TuneResult quick = tune_integral(err, 0.3, 1e-6, 40);
  CHECK(quick.converged);
  CHECK(quick.value == 0.3);
  CHECK(quick.evaluations == 1);

  // A one-sided error never brackets; the budget runs out.
  TuneResult stuck = tune_integral([](double a) { return a + 1.0; }, 1.0, 1e-6, 10);
  CHECK_FALSE(stuck.converged);
  CHECK(stuck.evaluations == 10);

  CHECK_THROWS_AS(tune_integral(err, 0.0, 1e-6, 40), ConfigError);
}

TEST_CASE("derivative sweep locates an interior minimum") {
  auto convex = [](double k) { return (k - 0.4) * (k - 0.4); };
  SweepResult r = tune_derivative(convex, 0.1, 1.6, 9);
  REQUIRE(r.curve.size() == 9);
  CHECK(r.curve.front().gain == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.curve.back().gain == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(r.best_gain == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(r.interior_minimum);
  CHECK(r.best_objective == doctest::Approx(0.0).epsilon(1e-12));

  SweepResult falling = tune_derivative([](double k) { return 1.0 / k; },
                                        0.1, 1.6, 9);
  CHECK(falling.best_gain == falling.curve.back().gain);
  CHECK_FALSE(falling.interior_minimum);

  SweepResult rising = tune_derivative([](double k) { return k; }, 0.1, 1.6, 9);
  CHECK(rising.best_gain == rising.curve.front().gain);
  CHECK_FALSE(rising.interior_minimum);

  CHECK_THROWS_AS(tune_derivative(convex, 0.0, 1.0, 9), ConfigError);
  CHECK_THROWS_AS(tune_derivative(convex, 1.0, 0.5, 9), ConfigError);
  CHECK_THROWS_AS(tune_derivative(convex, 0.1, 1.6, 2), ConfigError);
}
