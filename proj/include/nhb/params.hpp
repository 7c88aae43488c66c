#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace nhb {

using Complex = std::complex<double>;

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double rb85_mass = 1.40999e-25;       // kg
}  // namespace constants

/// Atomic and cell constants. Every rate is stored in units of gamma41, the
/// internal frequency unit; `gamma41_mhz` is only used for I/O conversion.
struct SystemParams {
  double gamma41 = 1.0;
  double gamma21_ratio = 0.2;
  double gamma31_ratio = 1.0;
  double gamma11_ratio = 0.4;  // carried for completeness, enters no formula
  double gamma41_mhz = 6.0;    // gamma41 / 2pi in MHz
  double od = 6.8;
  double cell_length = 0.07;  // m
  double temperature = 333.15;  // K
  double atomic_mass = constants::rb85_mass;
  double atomic_density = 2.5e17;  // m^-3
  double wavelength14 = 780e-9;    // m
  std::optional<double> dipole14;  // C m

  /// Throws InvalidParameter on any violated invariant.
  void validate() const;

  double gamma21() const { return gamma21_ratio * gamma41; }
  double gamma31() const { return gamma31_ratio * gamma41; }
  double gamma_eff() const { return 0.5 * (gamma41 + gamma21()); }
  double gamma_diff() const { return 0.5 * (gamma41 - gamma21()); }

  /// Physical angular frequency (rad/s) of one internal rate unit.
  double rad_per_s() const;
  double k14() const;      // 1/m
  double omega14() const;  // rad/s
  /// On-resonance cross section; from the dipole when given, else OD/(N L).
  double cross_section() const;

  double to_mhz(double rate) const { return rate * gamma41_mhz / gamma41; }
  double from_mhz(double mhz) const { return mhz * gamma41 / gamma41_mhz; }
  double to_ns(double t) const { return t * 1e9 / rad_per_s(); }
  double from_ns(double ns) const { return ns * 1e-9 * rad_per_s(); }
};

/// Rabi frequencies and detunings of the three driving fields, internal units.
struct FieldParams {
  double omega3 = 0.8;
  double delta3 = 0.0;
  double omega2 = 0.0;
  double delta2 = 0.0;
  double delta1 = 52.0;
  Complex d2_const = 0.0;  // dressing by E2 in the nonlinear denominator
  Complex c2_const = 0.0;  // E2 constant in the linear response
  double e1_amp = 1.0;
  double e2_amp = 1.0;
  // Optical wavelengths, only used for per-field Doppler shifts.
  double wavelength1 = 795e-9;  // m, pump line
  double wavelength2 = 780e-9;
  double wavelength3 = 780e-9;

  void validate() const;
};

enum class VelocityProfile {
  standard,  // normalized 1D Gaussian
  printed,   // sqrt(m v^2 / 2 pi kT) exp(-m v^2 / 2kT); not normalized
};

/// Thermal velocity averaging by Gauss-Hermite quadrature.
struct DopplerModel {
  bool enabled = true;
  int n_nodes = 64;
  // Per-field Doppler shift of the detunings. The W_D factor on delta is
  // always applied when enabled.
  bool shift_e1 = false;
  bool shift_e2 = false;
  bool shift_e3 = false;
  // Propagation direction of each field relative to the anti-Stokes photon.
  int direction_e1 = +1;
  int direction_e2 = +1;
  int direction_e3 = -1;

  void validate() const;
  double most_probable_speed(const SystemParams& sys) const;
};

struct VelocityNode {
  double velocity;  // m/s
  double weight;    // probability weight, sums to 1
};

/// Quadrature nodes for the thermal average. Disabled model yields the single
/// node {0, 1}.
std::vector<VelocityNode> velocity_nodes(const DopplerModel& model, const SystemParams& sys);

/// Probability density of the 1D velocity distribution (s/m).
double maxwell_boltzmann_pdf(double v, const SystemParams& sys,
                             VelocityProfile profile = VelocityProfile::standard);

/// Doppler FWHM in Hz at the given wavelength.
double doppler_width_fwhm(const SystemParams& sys, double wavelength);

struct RabiCalibration {
  double p_ref_mw = 1.0;
  double omega_ref = 0.8;  // Rabi frequency at p_ref, internal units
};

/// Square-root law from a single reference point.
double power_to_rabi(double power_mw, const RabiCalibration& calib = {});

}  // namespace nhb
