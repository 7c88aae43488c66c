#include "nhb/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nhb/errors.hpp"
#include "nhb/polynomial.hpp"

namespace nhb {

namespace {

// Real and imaginary part of |W3|^2/4 + (D3/2 - i G_diff)^2. find_ep bisects on
// exactly this expression so that the returned omega3 zeroes it bit-for-bit.
double discriminant_real(double omega3, double delta3, double gamma_diff) {
  const double offset = 0.25 * delta3 * delta3 - gamma_diff * gamma_diff;
  return 0.25 * omega3 * omega3 + offset;
}

double discriminant_imag(double delta3, double gamma_diff) { return -delta3 * gamma_diff; }

bool branch_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void check_monotone(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw InvalidParameter(std::string("sweep axis ") + name + " is empty");
  bool up = true, down = true;
  for (std::size_t i = 1; i < axis.size(); ++i) {
    up = up && axis[i] > axis[i - 1];
    down = down && axis[i] < axis[i - 1];
  }
  if (!up && !down) throw InvalidParameter(std::string("sweep axis ") + name + " is not monotone");
}

}  // namespace

EffectiveHamiltonian effective_hamiltonian(const SystemParams& sys, const FieldParams& fields) {
  const Complex i(0.0, 1.0);
  const Complex coupling = -0.5 * fields.omega3;
  return {-i * sys.gamma21(), coupling, coupling, fields.delta3 - i * sys.gamma41};
}

EigenPair eigenvalues(const SystemParams& sys, const FieldParams& fields) {
  const double gdiff = sys.gamma_diff();
  const Complex center(-0.5 * fields.delta3, sys.gamma_eff());
  const Complex disc(discriminant_real(fields.omega3, fields.delta3, gdiff),
                     discriminant_imag(fields.delta3, gdiff));
  const Complex root = std::sqrt(disc);
  Complex plus = center + root;
  Complex minus = center - root;
  if (branch_less(plus, minus)) std::swap(plus, minus);

  EigenPair out;
  out.delta_plus = plus;
  out.delta_minus = minus;
  out.omega_e = plus - minus;
  out.gamma_e_plus = std::max(plus.imag(), minus.imag());
  out.gamma_e_minus = std::min(plus.imag(), minus.imag());
  return out;
}

double find_ep(const SystemParams& sys, double delta3, double ep_tolerance) {
  sys.validate();
  const double gdiff = sys.gamma_diff();

  double omega_star = 0.0;
  if (discriminant_real(0.0, delta3, gdiff) < 0.0) {
    double lo = 0.0;
    double hi = 2.0 * std::sqrt(gdiff * gdiff + 0.25 * delta3 * delta3) + 1.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double d = discriminant_real(mid, delta3, gdiff);
      if (d == 0.0) {
        lo = hi = mid;
        break;
      }
      (d < 0.0 ? lo : hi) = mid;
    }
    omega_star = std::abs(discriminant_real(lo, delta3, gdiff)) <=
                         std::abs(discriminant_real(hi, delta3, gdiff))
                     ? lo
                     : hi;
  }

  FieldParams at_ep;
  at_ep.omega3 = omega_star;
  at_ep.delta3 = delta3;
  const double splitting = std::abs(eigenvalues(sys, at_ep).omega_e);
  if (!(splitting < ep_tolerance))
    throw NoCoalescence("eigenvalues do not coalesce for real omega3 at delta3 = " +
                            std::to_string(delta3) + "; min |omega_e| = " +
                            std::to_string(splitting),
                        splitting);
  return omega_star;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::R1_rabi_oscillation: return "R1_rabi_oscillation";
    case Regime::R2_group_delay: return "R2_group_delay";
    case Regime::R3_antibunching_decay: return "R3_antibunching_decay";
    case Regime::EP: return "EP";
  }
  return "unknown";
}

RegimeLabel classify_regime(const SystemParams& sys, const FieldParams& fields, double bandwidth,
                            double ep_tolerance) {
  const EigenPair eig = eigenvalues(sys, fields);
  RegimeLabel label{};
  label.splitting = std::abs(eig.omega_e);
  label.gamma_eff = sys.gamma_eff();
  label.bandwidth = bandwidth;
  label.two_gamma_diff = 2.0 * sys.gamma_diff();

  if (label.splitting < ep_tolerance)
    label.regime = Regime::EP;
  else if (bandwidth < std::max(label.splitting, label.gamma_eff))
    label.regime = Regime::R2_group_delay;
  else if (fields.omega3 > label.two_gamma_diff)
    label.regime = Regime::R1_rabi_oscillation;
  else
    label.regime = Regime::R3_antibunching_decay;
  return label;
}

std::vector<SweepRow> sweep_eigenvalues(const SystemParams& sys, const FieldParams& base,
                                        const SweepGrid& grid, Exec exec) {
  check_monotone(grid.omega3, "omega3");
  check_monotone(grid.delta3, "delta3");
  const std::size_t rows = grid.omega3.size();
  const std::size_t cols = grid.delta3.size();

  std::vector<SweepRow> out(rows * cols);
  for_each_index(exec, out.size(), [&](std::size_t k) {
    FieldParams f = base;
    f.omega3 = grid.omega3[k / cols];
    f.delta3 = grid.delta3[k % cols];
    const EigenPair e = eigenvalues(sys, f);
    out[k] = {f.omega3, f.delta3, e.delta_plus, e.delta_minus};
  });

  // Sequential branch tracking pass.
  for (std::size_t k = 1; k < out.size(); ++k) {
    const std::size_t ref = (k % cols != 0) ? k - 1 : k - cols;
    const SweepRow& prev = out[ref];
    SweepRow& cur = out[k];
    const double keep = std::abs(cur.plus - prev.plus) + std::abs(cur.minus - prev.minus);
    const double swap = std::abs(cur.minus - prev.plus) + std::abs(cur.plus - prev.minus);
    if (swap < keep) std::swap(cur.plus, cur.minus);
  }
  return out;
}

std::array<Complex, 4> double_dressing_polynomial(const SystemParams& sys,
                                                  const FieldParams& fields,
                                                  double coupling_factor) {
  const EigenPair e = eigenvalues(sys, fields);
  const Complex dp = e.delta_plus;
  const Complex dm = e.delta_minus;
  const Complex pole(fields.delta2 - 0.5 * fields.delta3, sys.gamma41);
  const double coupling = coupling_factor * fields.omega2 * fields.omega2;

  // quadratic factor q(d) = d^2 - (dp + pole) d + dp*pole + coupling
  const Complex q1 = -(dp + pole);
  const Complex q0 = dp * pole + coupling;
  return {Complex(1.0), q1 - dm, q0 - q1 * dm, -q0 * dm};
}

std::array<Complex, 3> double_dressing_channels(const SystemParams& sys, const FieldParams& fields,
                                                double coupling_factor) {
  if (!(fields.omega2 >= 0.0)) throw InvalidParameter("omega2 must be >= 0");
  const auto coeffs = double_dressing_polynomial(sys, fields, coupling_factor);
  const auto roots = polynomial_roots(coeffs);
  if (roots.size() != 3) throw NumericalError("double-dressing cubic lost a root");
  std::array<Complex, 3> out{roots[0], roots[1], roots[2]};
  std::sort(out.begin(), out.end(), branch_less);
  return out;
}

}  // namespace nhb
