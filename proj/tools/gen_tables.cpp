// Generates the aerodynamic coefficient tables shipped in configs/. The
// surfaces are smooth analytic families anchored so the two documented
// operating points sit exactly on grid nodes:
//   thrust 0.7718 at (lambda_11, 0 deg) and 0.1033 at (lambda_20, 18 deg),
//   power matching the drivetrain torque balance at both points,
// where lambda_11 and lambda_20 are the tip speed ratios of the rated
// rotor speed at 11 and 20 m/s winds.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

constexpr double kRatedRpm = 12.1;
constexpr double kOmega0 = kRatedRpm * 2.0 * 3.14159265358979323846 / 60.0;
constexpr double kRotorRadius = 63.0;
constexpr double kGearRatio = 97.0;
constexpr double kAirDensity = 1.225;
constexpr double kTorque11 = 40000.0;    // N*m generator side at 11 m/s
constexpr double kTorque20 = 43093.55;   // N*m generator side at 20 m/s
constexpr double kThrust11 = 0.7718;     // thrust coefficient anchors
constexpr double kThrust20 = 0.1033;

double rotor_area() { return 3.14159265358979323846 * kRotorRadius * kRotorRadius; }

double power_anchor(double wind, double gen_torque) {
  const double captured = kGearRatio * gen_torque * kOmega0;
  return captured / (0.5 * kAirDensity * rotor_area() * wind * wind * wind);
}

struct PowerFamily {
  // Gaussian bump in tip speed ratio whose center, width and height all
  // shrink with blade pitch (degrees).
  double cpm0 = 0.0;
  double decay = 0.0;

  static double center(double b) { return 7.0 - (3.4 / 18.0) * b; }
  static double width(double b) { return std::max(0.5, 3.6 - (1.4 / 18.0) * b); }

  double value(double tsr, double b) const {
    const double z = (tsr - center(b)) / width(b);
    return cpm0 * std::exp(-decay * b) * std::exp(-z * z);
  }
};

PowerFamily calibrate_power(double lambda11, double lambda20, double cp11,
                            double cp20) {
  PowerFamily f;
  const double z0 = (lambda11 - PowerFamily::center(0.0)) / PowerFamily::width(0.0);
  f.cpm0 = cp11 / std::exp(-z0 * z0);
  const double z18 =
      (lambda20 - PowerFamily::center(18.0)) / PowerFamily::width(18.0);
  const double cpmax18 = cp20 / std::exp(-z18 * z18);
  f.decay = -std::log(cpmax18 / f.cpm0) / 18.0;
  return f;
}

struct ThrustFamily {
  // Power law in tip speed ratio with exponential pitch decay.
  double scale = 0.0;
  double decay = 0.0;

  double value(double tsr, double b) const {
    return scale * std::pow(tsr, 1.3) * std::exp(-decay * b);
  }
};

ThrustFamily calibrate_thrust(double lambda11, double lambda20) {
  ThrustFamily f;
  f.scale = kThrust11 / std::pow(lambda11, 1.3);
  f.decay = std::log(f.scale * std::pow(lambda20, 1.3) / kThrust20) / 18.0;
  return f;
}

void write_table(const std::string& path, const std::string& title,
                 const std::vector<double>& tsr,
                 const std::vector<double>& pitch_deg,
                 const std::vector<std::vector<double>>& values) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    std::fprintf(stderr, "cannot write %s\n", path.c_str());
    std::exit(1);
  }
  char buf[40];
  out << "# " << title << "\n";
  out << "tsr_pitch_deg";
  for (double b : pitch_deg) {
    std::snprintf(buf, sizeof(buf), "\t%.17g", b);
    out << buf;
  }
  out << "\n";
  for (std::size_t i = 0; i < tsr.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", tsr[i]);
    out << buf;
    for (std::size_t j = 0; j < pitch_deg.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "\t%.17g", values[i][j]);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "configs";
  std::filesystem::create_directories(out_dir);

  const double lambda11 = kOmega0 * kRotorRadius / 11.0;
  const double lambda20 = kOmega0 * kRotorRadius / 20.0;
  const double cp11 = power_anchor(11.0, kTorque11);
  const double cp20 = power_anchor(20.0, kTorque20);

  const PowerFamily power = calibrate_power(lambda11, lambda20, cp11, cp20);
  const ThrustFamily thrust = calibrate_thrust(lambda11, lambda20);

  std::vector<double> tsr = {1.0, 1.5, 2.0,      2.5, 3.0, 3.5, lambda20,
                             4.5, 5.0, 5.5,      6.0, 6.5, 7.0, lambda11,
                             7.5, 8.0, 8.5,      9.0, 10.0, 11.0, 12.0,
                             13.0, 14.0};
  std::vector<double> pitch = {0.0,  1.0,  2.0,  3.0,  4.0,  5.0,
                               6.0,  8.0,  10.0, 12.0, 14.0, 16.0,
                               18.0, 20.0, 22.5, 25.0, 30.0, 35.0,
                               40.0, 45.0, 60.0, 75.0, 90.0};

  std::vector<std::vector<double>> cp(tsr.size()),
      ct(tsr.size());
  for (std::size_t i = 0; i < tsr.size(); ++i) {
    cp[i].resize(pitch.size());
    ct[i].resize(pitch.size());
    for (std::size_t j = 0; j < pitch.size(); ++j) {
      cp[i][j] = std::max(0.0, std::min(0.593, power.value(tsr[i], pitch[j])));
      ct[i][j] = std::max(0.0, std::min(2.0, thrust.value(tsr[i], pitch[j])));
      // Flush vanishing coefficients so the files stay free of subnormals.
      if (cp[i][j] < 1e-12) cp[i][j] = 0.0;
      if (ct[i][j] < 1e-12) ct[i][j] = 0.0;
    }
  }
  // Pin the anchor nodes to their exact published/derived values so node
  // lookups reproduce them with zero tolerance.
  const std::size_t i11 = 13, i20 = 6, j0 = 0, j18 = 12;
  cp[i11][j0] = cp11;
  cp[i20][j18] = cp20;
  ct[i11][j0] = kThrust11;
  ct[i20][j18] = kThrust20;

  namespace fs = std::filesystem;
  write_table((fs::path(out_dir) / "cp_table.tsv").string(),
              "power coefficient surface", tsr, pitch, cp);
  write_table((fs::path(out_dir) / "ct_table.tsv").string(),
              "thrust coefficient surface", tsr, pitch, ct);
  std::printf("lambda_11 = %.17g  cp = %.17g  ct = %.17g\n", lambda11, cp11,
              kThrust11);
  std::printf("lambda_20 = %.17g  cp = %.17g  ct = %.17g\n", lambda20, cp20,
              kThrust20);
  return 0;
}
