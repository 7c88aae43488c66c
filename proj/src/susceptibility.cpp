#include "nhb/susceptibility.hpp"

#include <cmath>
#include <string>

#include "nhb/errors.hpp"

namespace nhb {

namespace {

constexpr Complex I(0.0, 1.0);

// Ordered roots of (x - i G21)(x + D3 - i G41) - g|W3|^2, the dressed pair.
// Same branch rule as eigenvalues(); identical to its values when g = 1/4.
std::pair<Complex, Complex> dressed_pair(const SystemParams& sys, double omega3, double delta3,
                                         double g) {
  const Complex half_sum = 0.5 * Complex(-delta3, sys.gamma41 + sys.gamma21());
  const Complex product = (-I * sys.gamma21()) * Complex(delta3, -sys.gamma41) - g * omega3 * omega3;
  const Complex root = std::sqrt(half_sum * half_sum - product);
  Complex plus = half_sum + root, minus = half_sum - root;
  if (plus.real() < minus.real() || (plus.real() == minus.real() && plus.imag() < minus.imag()))
    std::swap(plus, minus);
  return {plus, minus};
}

Complex d_eit_double_reciprocal(Complex delta, const SystemParams& sys, const FieldParams& fields,
                                double w_d, double g) {
  const auto [dp, dm] = dressed_pair(sys, fields.omega3, fields.delta3, g);
  const Complex pole(fields.delta2 - 0.5 * fields.delta3, sys.gamma41);
  const Complex x = w_d * delta;
  const Complex num = (x + fields.delta3 - I * sys.gamma41) * (x - pole);
  const Complex den = I * ((x - dp) * (x - pole) + g * fields.omega2 * fields.omega2) * (x - dm);
  return num / den;
}

void check_grid(std::span<const double> grid, double window) {
  if (grid.empty()) throw InvalidParameter("delta grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || std::abs(grid[i]) > window)
      throw InvalidParameter("delta grid value " + std::to_string(grid[i]) +
                             " outside the resolved window");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw InvalidParameter("delta grid must be strictly increasing");
  }
}

template <class Integrand>
ComplexSpectrum doppler_average(std::span<const double> grid, const SystemParams& sys,
                                const FieldParams& fields, const DopplerModel& doppler,
                                const ChiParams& chi, Axis axis, Exec exec, Integrand integrand) {
  sys.validate();
  fields.validate();
  if (chi.prefactor1 == Complex(0.0) || chi.prefactor3 == Complex(0.0))
    throw InvalidParameter("susceptibility prefactor must be nonzero");
  check_grid(grid, chi.window);

  const auto nodes = velocity_nodes(doppler, sys);
  std::vector<NodeDetunings> dets(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n)
    dets[n] = node_detunings(nodes[n].velocity, sys, fields, doppler);

  ComplexSpectrum out;
  out.delta.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  out.axis = axis;
  for_each_index(exec, grid.size(), [&](std::size_t k) {
    const Complex delta = axis == Axis::real_delta ? Complex(grid[k]) : Complex(0.0, grid[k]);
    Complex acc = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const Complex v = integrand(delta, dets[n]);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericalError("non-finite integrand at quadrature node " + std::to_string(n) +
                             " (v = " + std::to_string(nodes[n].velocity) + " m/s, delta = " +
                             std::to_string(grid[k]) + ")");
      acc += nodes[n].weight * v;
    }
    out.values[k] = acc;
  });
  return out;
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw InvalidParameter("grid needs at least one point");
  if (!(hi >= lo)) throw InvalidParameter("grid upper bound below lower bound");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

std::vector<double> default_delta_grid() { return uniform_grid(-20.0, 20.0, 4096); }

NodeDetunings node_detunings(double velocity, const SystemParams& sys, const FieldParams& fields,
                             const DopplerModel& doppler) {
  NodeDetunings d{1.0, fields.delta1, fields.delta2, fields.delta3};
  if (!doppler.enabled) return d;
  const double beta = velocity / constants::speed_of_light;
  d.w_d = 1.0 + beta;
  // optical frequency of a field in internal rate units
  auto omega = [&](double wavelength) {
    return 2.0 * constants::pi * constants::speed_of_light / wavelength / sys.rad_per_s();
  };
  if (doppler.shift_e1) d.delta1 -= doppler.direction_e1 * beta * omega(fields.wavelength1);
  if (doppler.shift_e2) d.delta2 -= doppler.direction_e2 * beta * omega(fields.wavelength2);
  if (doppler.shift_e3) d.delta3 -= doppler.direction_e3 * beta * omega(fields.wavelength3);
  return d;
}

Complex d_eit(Complex delta, const SystemParams& sys, const FieldParams& fields, double w_d,
              double coupling_factor) {
  const Complex inner = sys.gamma41 + I * (w_d * delta + fields.delta3);
  const Complex head = sys.gamma21() + I * w_d * delta;
  const double coupling = coupling_factor * fields.omega3 * fields.omega3;
  if (std::abs(inner) < 1e-12) return (head * inner + coupling) / inner;
  return head + coupling / inner;
}

Complex d_eit_reciprocal(Complex delta, const SystemParams& sys, const FieldParams& fields,
                         double w_d, double coupling_factor) {
  const Complex inner = sys.gamma41 + I * (w_d * delta + fields.delta3);
  const Complex head = sys.gamma21() + I * w_d * delta;
  return inner / (head * inner + coupling_factor * fields.omega3 * fields.omega3);
}

std::array<Complex, 3> d_eit_cleared_coefficients(const SystemParams& sys,
                                                  const FieldParams& fields, double w_d,
                                                  double coupling_factor) {
  // (G21 + i W d)(G41 + i D3 + i W d) + g W3^2
  const Complex a = sys.gamma21();
  const Complex b = sys.gamma41 + I * fields.delta3;
  return {-w_d * w_d, I * w_d * (a + b),
          a * b + coupling_factor * fields.omega3 * fields.omega3};
}

Complex d_eit_double(Complex delta, const SystemParams& sys, const FieldParams& fields, double w_d,
                     double coupling_factor) {
  return 1.0 / d_eit_double_reciprocal(delta, sys, fields, w_d, coupling_factor);
}

Complex chi3_integrand(Complex delta, const SystemParams& sys, const FieldParams& fields,
                       const NodeDetunings& det, const ChiParams& chi) {
  FieldParams f = fields;
  f.delta2 = det.delta2;
  f.delta3 = det.delta3;
  const Complex pump = sys.gamma31() + I * det.delta1;
  const Complex tail = sys.gamma41 + I * (det.delta2 + det.w_d * delta) + fields.d2_const;

  if (chi.double_dressing) {
    const Complex inv =
        d_eit_double_reciprocal(delta, sys, f, det.w_d, chi.coupling_factor);
    return chi.prefactor3 * inv / (pump * tail);
  }
  // d_EIT * tail in cleared form; when tail and the embedded denominator
  // coincide they cancel exactly, which keeps the imaginary-axis evaluation
  // finite at delta = i Gamma41.
  const Complex inner = sys.gamma41 + I * (det.w_d * delta + det.delta3);
  const Complex head = sys.gamma21() + I * det.w_d * delta;
  const Complex cleared = head * inner + chi.coupling_factor * fields.omega3 * fields.omega3;
  const Complex ratio = tail == inner ? Complex(1.0) : tail / inner;
  return chi.prefactor3 / (pump * cleared * ratio);
}

Complex chi1_integrand(Complex delta, const SystemParams& sys, const FieldParams& fields,
                       const NodeDetunings& det, const ChiParams& chi) {
  const Complex x = det.w_d * delta;
  const Complex upper = x - I * sys.gamma21() - I * det.delta3;
  const Complex den = (x - I * sys.gamma41) * upper -
                      chi.coupling_factor * fields.omega3 * fields.omega3 - fields.c2_const;
  return -chi.prefactor1 * upper / den;
}

ComplexSpectrum chi3(std::span<const double> grid, const SystemParams& sys,
                     const FieldParams& fields, const DopplerModel& doppler, const ChiParams& chi,
                     Axis axis, Exec exec) {
  if (chi.double_dressing && !(fields.omega2 >= 0.0))
    throw InvalidParameter("omega2 must be >= 0");
  return doppler_average(grid, sys, fields, doppler, chi, axis, exec,
                         [&](Complex d, const NodeDetunings& det) {
                           return chi3_integrand(d, sys, fields, det, chi);
                         });
}

ComplexSpectrum chi1(std::span<const double> grid, const SystemParams& sys,
                     const FieldParams& fields, const DopplerModel& doppler, const ChiParams& chi,
                     Axis axis, Exec exec) {
  return doppler_average(grid, sys, fields, doppler, chi, axis, exec,
                         [&](Complex d, const NodeDetunings& det) {
                           return chi1_integrand(d, sys, fields, det, chi);
                         });
}

ComplexSpectrum evaluate(const SpectrumRequest& r, Axis axis, Exec exec) {
  if (r.which == Susceptibility::chi1)
    return chi1(r.grid, r.sys, r.fields, r.doppler, r.chi, axis, exec);
  return chi3(r.grid, r.sys, r.fields, r.doppler, r.chi, axis, exec);
}

ComplexSpectrum to_imaginary_basis(const SpectrumRequest& request, Exec exec) {
  return evaluate(request, Axis::imaginary_delta, exec);
}

}  // namespace nhb
