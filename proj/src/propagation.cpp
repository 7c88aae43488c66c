#include "nhb/propagation.hpp"

#include <cmath>
#include <string>

#include "nhb/errors.hpp"

namespace nhb {

namespace {
constexpr Complex I(0.0, 1.0);
}

double group_velocity(const SystemParams& sys, const FieldParams& fields, double w_d,
                      GroupVelocityForm form, double coupling_factor) {
  sys.validate();
  fields.validate();
  if (!(w_d > 0.0)) throw InvalidParameter("W_D must be positive");
  const double g41 = sys.gamma41;
  const double g21 = sys.gamma21();
  const double c2 = fields.c2_const.real();
  const double length = sys.cell_length;

  if (form == GroupVelocityForm::printed) {
    const double omega_sq = fields.omega3 * fields.omega3;
    const double den = omega_sq + c2 - g21 * g21;
    if (std::abs(den) < 1e-14) throw SingularParameter("group velocity denominator vanishes");
    const double num = omega_sq - g41 * g21;
    const double v = 2.0 * sys.k14() * length * constants::speed_of_light * num * num /
                     (sys.omega14() * sys.od * g41 * w_d * den);
    return v * sys.rad_per_s();
  }
  const double k = coupling_factor * fields.omega3 * fields.omega3 + c2;
  const double den = k - g21 * g21;
  if (std::abs(den) < 1e-14) throw SingularParameter("group velocity denominator vanishes");
  const double num = k + g41 * g21;
  return 2.0 * length * num * num / (sys.od * g41 * w_d * den) * sys.rad_per_s();
}

double absorption_alpha(const SystemParams& sys, const FieldParams& fields,
                        double coupling_factor) {
  sys.validate();
  fields.validate();
  const double n_sigma = sys.atomic_density * sys.cross_section();
  const double g41 = sys.gamma41;
  const double g21 = sys.gamma21();
  return 2.0 * n_sigma * g41 * g21 /
         (4.0 * coupling_factor * fields.omega3 * fields.omega3 + 4.0 * g41 * g21);
}

Bandwidth bandwidth(const SystemParams& sys, const FieldParams& fields, GroupVelocityForm form,
                    double coupling_factor) {
  Bandwidth bw;
  const double v_g = group_velocity(sys, fields, 1.0, form, coupling_factor);
  bw.exact = 2.0 * constants::pi * v_g / sys.cell_length / sys.rad_per_s();
  bw.approx = constants::pi * fields.omega3 * fields.omega3 / (sys.od * sys.gamma41);
  return bw;
}

Complex complex_sinc(Complex z) {
  if (std::abs(z) < 1e-2) {
    const Complex z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
  }
  return std::sin(z) / z;
}

double PhaseMatching::group_delay() const { return length / v_g * rate_unit; }

Complex PhaseMatching::dk(Complex delta) const {
  return delta * rate_unit / v_g - I * alpha;
}

Complex PhaseMatching::phi(Complex delta) const {
  if (bypass) return 1.0;
  const Complex z = 0.5 * dk(delta) * length;
  // sinc(z) exp(-iz) = (1 - exp(-2iz)) / (2iz); the combined form stays
  // bounded where sin(z) alone would overflow.
  if (std::abs(z) < 1e-2) return complex_sinc(z) * std::exp(-I * z);
  return (1.0 - std::exp(-2.0 * I * z)) / (2.0 * I * z);
}

PhaseMatching phase_matching(const SystemParams& sys, const FieldParams& fields,
                             const PhaseMatchingOptions& opts) {
  PhaseMatching pm;
  pm.bypass = opts.bypass;
  pm.length = sys.cell_length;
  pm.rate_unit = sys.rad_per_s();
  pm.k_as0 = sys.k14();
  pm.alpha = absorption_alpha(sys, fields, opts.coupling_factor);
  pm.v_g = group_velocity(sys, fields, opts.w_d, opts.form, opts.coupling_factor);
  pm.bw = bandwidth(sys, fields, opts.form, opts.coupling_factor);
  return pm;
}

ComplexSpectrum phi(std::span<const double> grid, const PhaseMatching& pm, Exec exec) {
  if (grid.empty()) throw InvalidParameter("delta grid is empty");
  if (!pm.bypass && !(pm.v_g > 0.0))
    throw InvalidParameter("phase matching needs v_g > 0 unless bypassed");
  if (pm.alpha < 0.0) throw InvalidParameter("alpha must be >= 0");
  ComplexSpectrum out;
  out.delta.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  for_each_index(exec, grid.size(), [&](std::size_t k) {
    const Complex v = pm.phi(grid[k]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("Phi overflows at delta = " + std::to_string(grid[k]) +
                           " (alpha L = " + std::to_string(pm.alpha * pm.length) + ")");
    out.values[k] = v;
  });
  return out;
}

}  // namespace nhb
