#pragma once

#include <array>
#include <span>
#include <vector>

#include "nhb/exec.hpp"
#include "nhb/params.hpp"

namespace nhb {

enum class Axis { real_delta, imaginary_delta };

/// Complex samples of a function of the offset delta. For
/// Axis::imaginary_delta the value at grid point y was evaluated at delta = i*y.
struct ComplexSpectrum {
  std::vector<double> delta;
  std::vector<Complex> values;
  Axis axis = Axis::real_delta;
};

/// Evenly spaced grid with n points, both ends included.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);
/// 4096 points on [-20, 20].
std::vector<double> default_delta_grid();

struct ChiParams {
  Complex prefactor3 = 1.0;
  Complex prefactor1 = 1.0;
  /// Multiplies |W3|^2 (and |W2|^2) in the EIT terms. 1/4 puts the
  /// susceptibility poles on the eigenvalues; 1 is the bare form.
  double coupling_factor = 0.25;
  /// Replace d_EIT by its double-dressed version (E2 dressing of level 4).
  bool double_dressing = false;
  /// Largest |delta| accepted on a grid.
  double window = 1e3;
};

/// Detunings seen by an atom with velocity v.
struct NodeDetunings {
  double w_d = 1.0;  // 1 + v/c
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
};

NodeDetunings node_detunings(double velocity, const SystemParams& sys, const FieldParams& fields,
                             const DopplerModel& doppler);

/// Gamma21 + i W delta + g|W3|^2 / (Gamma41 + i W delta + i D3D).
/// Zero of the embedded denominator gives complex infinity.
Complex d_eit(Complex delta, const SystemParams& sys, const FieldParams& fields, double w_d = 1.0,
              double coupling_factor = 0.25);

/// 1 / d_eit from the cleared form, finite at the embedded pole.
Complex d_eit_reciprocal(Complex delta, const SystemParams& sys, const FieldParams& fields,
                         double w_d = 1.0, double coupling_factor = 0.25);

/// Descending coefficients in delta of d_eit * (Gamma41 + i W delta + i D3).
std::array<Complex, 3> d_eit_cleared_coefficients(const SystemParams& sys,
                                                  const FieldParams& fields, double w_d = 1.0,
                                                  double coupling_factor = 0.25);

/// Double-dressed EIT term,
///   i [(Wd - d+) + g|W2|^2 / (Wd - p)] (Wd - d-) / (Wd + D3 - i G41).
/// Equal to d_eit when omega2 = 0. Detunings are taken from `fields`.
Complex d_eit_double(Complex delta, const SystemParams& sys, const FieldParams& fields,
                     double w_d = 1.0, double coupling_factor = 0.25);

/// Single-node integrands (Doppler shifts already folded into `det`).
Complex chi3_integrand(Complex delta, const SystemParams& sys, const FieldParams& fields,
                       const NodeDetunings& det, const ChiParams& chi = {});
Complex chi1_integrand(Complex delta, const SystemParams& sys, const FieldParams& fields,
                       const NodeDetunings& det, const ChiParams& chi = {});

/// Doppler-averaged third-order susceptibility on the grid.
ComplexSpectrum chi3(std::span<const double> grid, const SystemParams& sys,
                     const FieldParams& fields, const DopplerModel& doppler,
                     const ChiParams& chi = {}, Axis axis = Axis::real_delta,
                     Exec exec = default_exec);

/// Doppler-averaged linear susceptibility of the anti-Stokes field.
ComplexSpectrum chi1(std::span<const double> grid, const SystemParams& sys,
                     const FieldParams& fields, const DopplerModel& doppler,
                     const ChiParams& chi = {}, Axis axis = Axis::real_delta,
                     Exec exec = default_exec);

enum class Susceptibility { chi1, chi3 };

/// Everything needed to re-evaluate a spectrum on a different axis.
struct SpectrumRequest {
  Susceptibility which = Susceptibility::chi3;
  std::vector<double> grid;
  SystemParams sys;
  FieldParams fields;
  DopplerModel doppler;
  ChiParams chi;
};

ComplexSpectrum evaluate(const SpectrumRequest& request, Axis axis = Axis::real_delta,
                         Exec exec = default_exec);

/// Re-evaluates the request at delta = i*y for each grid value y.
ComplexSpectrum to_imaginary_basis(const SpectrumRequest& request, Exec exec = default_exec);

}  // namespace nhb
