#include "nhb/params.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "nhb/errors.hpp"

namespace nhb {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw InvalidParameter(std::string(name) + " must be positive and finite, got " +
                           std::to_string(value));
}

}  // namespace

void SystemParams::validate() const {
  require_positive(gamma41, "gamma41");
  require_positive(gamma21_ratio, "gamma21_ratio");
  require_positive(gamma31_ratio, "gamma31_ratio");
  require_positive(gamma41_mhz, "gamma41_mhz");
  require_positive(od, "od");
  require_positive(cell_length, "cell_length");
  require_positive(temperature, "temperature");
  require_positive(atomic_mass, "atomic_mass");
  require_positive(atomic_density, "atomic_density");
  require_positive(wavelength14, "wavelength14");
  if (gamma11_ratio < 0.0) throw InvalidParameter("gamma11_ratio must be non-negative");
  if (dipole14) {
    require_positive(*dipole14, "dipole14");
    const double od_from_dipole = atomic_density * cross_section() * cell_length;
    if (std::abs(od_from_dipole - od) > 1e-6 * od)
      throw InvalidParameter("dipole14 implies OD " + std::to_string(od_from_dipole) +
                             " but od is " + std::to_string(od));
  }
}

double SystemParams::rad_per_s() const {
  return 2.0 * constants::pi * gamma41_mhz * 1e6 / gamma41;
}

double SystemParams::k14() const { return 2.0 * constants::pi / wavelength14; }

double SystemParams::omega14() const {
  return 2.0 * constants::pi * constants::speed_of_light / wavelength14;
}

double SystemParams::cross_section() const {
  if (dipole14) {
    const double mu = *dipole14;
    const double gamma41_phys = gamma41 * rad_per_s();
    return 2.0 * constants::pi * mu * mu /
           (constants::epsilon0 * constants::hbar * wavelength14 * gamma41_phys);
  }
  return od / (atomic_density * cell_length);
}

void FieldParams::validate() const {
  if (!(omega3 >= 0.0)) throw InvalidParameter("omega3 must be >= 0");
  if (!(omega2 >= 0.0)) throw InvalidParameter("omega2 must be >= 0");
  for (double x : {delta1, delta2, delta3, e1_amp, e2_amp})
    if (!std::isfinite(x)) throw InvalidParameter("field parameters must be finite");
  for (double w : {wavelength1, wavelength2, wavelength3})
    if (!(w > 0.0)) throw InvalidParameter("field wavelengths must be positive");
  if (!std::isfinite(std::abs(d2_const)) || !std::isfinite(std::abs(c2_const)))
    throw InvalidParameter("d2_const and c2_const must be finite");
}

void DopplerModel::validate() const {
  if (n_nodes < 1) throw InvalidParameter("doppler n_nodes must be >= 1");
  for (int d : {direction_e1, direction_e2, direction_e3})
    if (d != 1 && d != -1) throw InvalidParameter("field direction must be +1 or -1");
}

double DopplerModel::most_probable_speed(const SystemParams& sys) const {
  return std::sqrt(2.0 * constants::boltzmann * sys.temperature / sys.atomic_mass);
}

std::vector<VelocityNode> velocity_nodes(const DopplerModel& model, const SystemParams& sys) {
  model.validate();
  if (!model.enabled) return {{0.0, 1.0}};
  const int n = model.n_nodes;
  if (n == 1) return {{0.0, 1.0}};

  // Golub-Welsch for the weight exp(-x^2): symmetric Jacobi matrix with
  // off-diagonal sqrt(k/2). Probability weights are the squared first
  // components of the normalized eigenvectors.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericalError("Gauss-Hermite eigen decomposition failed");

  const double u = model.most_probable_speed(sys);
  std::vector<VelocityNode> nodes(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    nodes[i] = {u * solver.eigenvalues()[i], v0 * v0};
  }
  return nodes;
}

double maxwell_boltzmann_pdf(double v, const SystemParams& sys, VelocityProfile profile) {
  require_positive(sys.temperature, "temperature");
  require_positive(sys.atomic_mass, "atomic_mass");
  const double kt = constants::boltzmann * sys.temperature;
  const double gauss = std::exp(-sys.atomic_mass * v * v / (2.0 * kt));
  const double norm = std::sqrt(sys.atomic_mass / (2.0 * constants::pi * kt));
  if (profile == VelocityProfile::printed) return norm * std::abs(v) * gauss;
  return norm * gauss;
}

double doppler_width_fwhm(const SystemParams& sys, double wavelength) {
  sys.validate();
  require_positive(wavelength, "wavelength");
  const double kt_over_m = constants::boltzmann * sys.temperature / sys.atomic_mass;
  return std::sqrt(8.0 * std::log(2.0) * kt_over_m) / wavelength;
}

double power_to_rabi(double power_mw, const RabiCalibration& calib) {
  if (!(power_mw >= 0.0)) throw InvalidParameter("power must be non-negative");
  require_positive(calib.p_ref_mw, "p_ref_mw");
  if (!(calib.omega_ref >= 0.0)) throw InvalidParameter("omega_ref must be non-negative");
  return calib.omega_ref * std::sqrt(power_mw / calib.p_ref_mw);
}

}  // namespace nhb
