#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fowt/aero.hpp"
#include "fowt/common.hpp"
#include "fowt/params.hpp"
#include "fowt/rng.hpp"
#include "support.hpp"

using namespace fowt;

TEST_CASE("tip speed ratio definition") {
  CHECK(tip_speed_ratio(0.0, 63.0, 11.4) == 0.0);
  CHECK(tip_speed_ratio(support::kRatedOmega, 63.0, 11.4) ==
        doctest::Approx(7.0024446778698815).epsilon(1e-14));
  // Scaling rotor speed and inflow together leaves the ratio unchanged.
  double base = tip_speed_ratio(1.1, 63.0, 9.0);
  CHECK(tip_speed_ratio(2.2, 63.0, 18.0) == base);
  CHECK_THROWS_AS(tip_speed_ratio(1.0, 63.0, 0.0), std::domain_error);
}

TEST_CASE("clamped ratio saturates at the grid edges") {
  CoefficientSurface s = load_surface_text(
      "tsr_pitch_deg 0 10\n2 0.3 0.3\n9 0.3 0.3\n", SurfaceKind::kPower);
  CHECK(clamped_tsr(1.0, 63.0, 0.0, s) == 9.0);
  CHECK(clamped_tsr(1.0, 63.0, 1000.0, s) == 2.0);
  CHECK(clamped_tsr(10.0, 63.0, 1.0, s) == 9.0);
  double inside = clamped_tsr(1.0, 63.0, 12.6, s);
  CHECK(inside == tip_speed_ratio(1.0, 63.0, 12.6));
}

TEST_CASE("parasitic drag force") {
  CHECK(parasitic_thrust(1.225, 0.6, 460.0, 0.0) == 0.0);
  double f = parasitic_thrust(1.225, 0.6, 460.0, 11.4);
  CHECK(f < 0.0);  // head wind pushes the structure downwind
  CHECK(parasitic_thrust(1.225, 0.6, 460.0, -11.4) == -f);
  // Quadratic in the inflow.
  CHECK(parasitic_thrust(1.225, 0.6, 460.0, 22.8) == 4.0 * f);
  CHECK(f == doctest::Approx(-0.5 * 1.225 * 0.6 * 460.0 * 11.4 * 11.4)
                 .epsilon(1e-14));
}

TEST_CASE("element inflow follows platform motion") {
  ParameterSet p = support::turbine_params();
  ElementInflow still = relative_inflow(11.4, 0.0, 0.0, 0.0, p);
  CHECK(still.tower == 11.4);
  CHECK(still.nacelle == 11.4);
  CHECK(still.blade == 11.4);

  double c = std::cos(0.05);
  ElementInflow moving = relative_inflow(11.4, -0.3, 0.05, 0.01, p);
  CHECK(moving.tower == 11.4 + -0.3 + p.tower_arm * 0.01 * c);
  CHECK(moving.nacelle == 11.4 + -0.3 + p.nacelle_drag_arm * 0.01 * c);
  CHECK(moving.blade == 11.4 + -0.3 + p.hub_arm * 0.01 * c);
  // A nod toward the wind raises every element's inflow.
  CHECK(moving.nacelle > 11.4 + -0.3);
}

TEST_CASE("total wind force combines the elements") {
  ParameterSet p = support::turbine_params();
  Surfaces s = support::turbine_surfaces();

  ElementInflow calm;
  WindForceBreakdown rest = total_wind_force(p, s.thrust, support::kRatedOmega,
                                             0.0, calm);
  CHECK(rest.tower == 0.0);
  CHECK(rest.nacelle == 0.0);
  CHECK(rest.blade == 0.0);
  CHECK(rest.total() == 0.0);
  CHECK(rest.tsr == s.thrust.tsr_grid.back());

  double beta = deg_to_rad(18.0);
  ElementInflow in = relative_inflow(20.0, 0.0, 0.0, 0.0, p);
  WindForceBreakdown out =
      total_wind_force(p, s.thrust, support::kRatedOmega, beta, in);
  CHECK(out.tower ==
        parasitic_thrust(p.air_density, p.tower_drag_coeff, p.tower_area, 20.0));
  CHECK(out.nacelle == parasitic_thrust(p.air_density, p.nacelle_drag_coeff,
                                        p.nacelle_area, 20.0));
  CHECK(out.tsr ==
        clamped_tsr(support::kRatedOmega, p.rotor_radius, 20.0, s.thrust));
  auto ct = s.thrust.interpolate(out.tsr, beta);
  CHECK_FALSE(out.surface_clamped);
  CHECK(out.blade == doctest::Approx(-0.5 * p.air_density * p.rotor_area *
                                     ct.value * 20.0 * 20.0)
                         .epsilon(1e-14));
  CHECK(out.blade < 0.0);
  CHECK(out.total() == out.tower + out.nacelle + out.blade);
}

TEST_CASE("aerodynamic power") {
  ParameterSet p = support::turbine_params();
  CoefficientSurface flat = load_surface_text(
      "tsr_pitch_deg 0 30\n0.5 0.4 0.4\n15 0.4 0.4\n", SurfaceKind::kPower);

  CHECK(aero_power(p, flat, support::kRatedOmega, 0.0, 0.0) == 0.0);

  double got = aero_power(p, flat, support::kRatedOmega, 0.0, 11.4);
  double want = 0.5 * p.air_density * p.rotor_area * 0.4 * 11.4 * 11.4 * 11.4;
  CHECK(got == doctest::Approx(want).epsilon(1e-14));
  CHECK(got == doctest::Approx(4.526e6).epsilon(2e-3));

  bool clamped = false;
  aero_power(p, flat, support::kRatedOmega, deg_to_rad(45.0), 11.4, &clamped);
  CHECK(clamped);
  clamped = true;
  aero_power(p, flat, support::kRatedOmega, deg_to_rad(10.0), 11.4, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("reference coefficient stays under the ideal limit") {
  for (int i = 0; i <= 60; ++i) {
    double tsr = 0.5 + 0.25 * i;
    for (int j = 0; j <= 30; ++j) {
      double cp = reference_power_coefficient(tsr, deg_to_rad(1.0 * j));
      CHECK(cp >= 0.0);
      CHECK(cp <= 0.593);
    }
  }

  // Closed form away from the clamps.
  double b = 2.0;
  double li_inv = 1.0 / (7.5 + 0.08 * b) - 0.035 / (1.0 + b * b * b);
  double want = 0.5176 * (116.0 * li_inv - 0.4 * b - 5.0) *
                    std::exp(-21.0 * li_inv) +
                0.0068 * 7.5;
  CHECK(reference_power_coefficient(7.5, deg_to_rad(2.0)) ==
        doctest::Approx(want).epsilon(1e-12));
  // Deep feather drives the raw fit negative; the clamp holds it at zero.
  CHECK(reference_power_coefficient(7.5, deg_to_rad(45.0)) == 0.0);

  CoefficientSurface s =
      reference_power_surface({2.0, 5.0, 8.0, 11.0}, {0.0, 0.1, 0.2});
  for (std::size_t i = 0; i < s.tsr_grid.size(); ++i) {
    for (std::size_t j = 0; j < s.pitch_grid.size(); ++j) {
      CHECK(s.at(i, j) ==
            reference_power_coefficient(s.tsr_grid[i], s.pitch_grid[j]));
    }
  }
}

TEST_CASE("constant power torque law") {
  UniformRng rng(99);
  for (int i = 0; i < 50; ++i) {
    double w = 0.5 + 1.5 * rng.next();
    TorqueResult t = region3_torque(5296610.0, 97.0, w, 0.1);
    CHECK_FALSE(t.clamped);
    CHECK(t.torque * 97.0 * w == doctest::Approx(5296610.0).epsilon(1e-12));
    // Doubling the speed halves the torque.
    TorqueResult h = region3_torque(5296610.0, 97.0, 2.0 * w, 0.1);
    CHECK(h.torque == t.torque / 2.0);
  }

  TorqueResult rated = region3_torque(5296610.0, 97.0, support::kRatedOmega, 0.1);
  CHECK(rated.torque == doctest::Approx(43093.55).epsilon(1e-4));

  TorqueResult held = region3_torque(5296610.0, 97.0, 0.01, 0.1);
  CHECK(held.clamped);
  CHECK(held.torque == 5296610.0 / (97.0 * 0.1));
}

TEST_CASE("rotor acceleration") {
  // Matched power and torque leave the speed alone.
  double balanced = rotor_accel(3000.0 * 1.2, 1.2, 3000.0, 1e7, 0.1);
  CHECK(std::abs(balanced) < 1e-12);

  CHECK(rotor_accel(4000.0 * 1.2, 1.2, 3000.0, 1e7, 0.1) > 0.0);
  CHECK(rotor_accel(2000.0 * 1.2, 1.2, 3000.0, 1e7, 0.1) < 0.0);

  // Hand-checked quotient with a realistic drivetrain.
  double inertia = 1e7 + 97.0 * 97.0 * 500.0;
  double torque = 3.9e6 / 1.267;
  double want = (5e6 / 1.267 - torque) / inertia;
  CHECK(rotor_accel(5e6, 1.267, torque, inertia, 0.1) ==
        doctest::Approx(want).epsilon(1e-12));
  CHECK(rotor_accel(5e6, 1.267, torque, inertia, 0.1) ==
        doctest::Approx(0.0590427).epsilon(1e-5));

  // The stall floor caps the power-to-torque conversion.
  CHECK(rotor_accel(5e6, 0.02, torque, inertia, 0.1) ==
        (5e6 / 0.1 - torque) / inertia);
}
