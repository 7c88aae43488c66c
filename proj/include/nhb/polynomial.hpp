#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nhb {

/// Evaluates a polynomial given by descending coefficients (Horner).
std::complex<double> polyval(std::span<const std::complex<double>> coeffs,
                             std::complex<double> x);

/// All roots of a polynomial with descending coefficients, by simultaneous
/// Aberth-Ehrlich iteration followed by a Newton polish of each root.
/// Throws NumericalError when the iteration does not converge.
std::vector<std::complex<double>> polynomial_roots(std::span<const std::complex<double>> coeffs,
                                                   int max_iterations = 500);

}  // namespace nhb
