#include "nhb/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nhb/errors.hpp"

namespace nhb {

using cd = std::complex<double>;

cd polyval(std::span<const cd> coeffs, cd x) {
  cd acc = 0.0;
  for (const cd& c : coeffs) acc = acc * x + c;
  return acc;
}

namespace {

// p(x) and p'(x) in one Horner pass.
std::pair<cd, cd> polyval_with_derivative(std::span<const cd> coeffs, cd x) {
  cd p = 0.0, dp = 0.0;
  for (const cd& c : coeffs) {
    dp = dp * x + p;
    p = p * x + c;
  }
  return {p, dp};
}

}  // namespace

std::vector<cd> polynomial_roots(std::span<const cd> coeffs_in, int max_iterations) {
  // strip leading zeros
  std::size_t first = 0;
  while (first < coeffs_in.size() && coeffs_in[first] == cd(0.0)) ++first;
  if (coeffs_in.size() - first < 2) return {};
  std::vector<cd> coeffs(coeffs_in.begin() + static_cast<std::ptrdiff_t>(first), coeffs_in.end());
  const cd lead = coeffs.front();
  for (cd& c : coeffs) c /= lead;
  const std::size_t degree = coeffs.size() - 1;

  // Cauchy bound for the initial circle.
  double radius = 0.0;
  for (std::size_t k = 1; k < coeffs.size(); ++k) radius = std::max(radius, std::abs(coeffs[k]));
  radius = 1.0 + radius;

  std::vector<cd> z(degree);
  for (std::size_t k = 0; k < degree; ++k) {
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) /
                         static_cast<double>(degree);
    z[k] = std::polar(0.5 * radius, angle);
  }

  double scale = 0.0;
  for (const cd& c : coeffs) scale = std::max(scale, std::abs(c));

  bool converged = false;
  for (int iter = 0; iter < max_iterations && !converged; ++iter) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < degree; ++k) {
      auto [p, dp] = polyval_with_derivative(coeffs, z[k]);
      if (p == cd(0.0)) continue;
      const cd ratio = p / dp;
      cd repulsion = 0.0;
      for (std::size_t j = 0; j < degree; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      const cd step = ratio / (1.0 - ratio * repulsion);
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    converged = max_step < 1e-15;
  }
  for (const cd& r : z)
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
      throw NumericalError("polynomial root iteration produced a non-finite root");
  if (!converged) {
    // Accept if every residual is at rounding level; clustered roots converge
    // only linearly and may not meet the step criterion.
    for (const cd& r : z) {
      const double bound = 1e-10 * scale * std::pow(std::max(1.0, std::abs(r)), degree);
      if (std::abs(polyval(coeffs, r)) > bound)
        throw NumericalError("polynomial root iteration did not converge");
    }
  }

  for (cd& r : z) {
    for (int k = 0; k < 3; ++k) {
      auto [p, dp] = polyval_with_derivative(coeffs, r);
      if (dp == cd(0.0) || p == cd(0.0)) break;
      const cd next = r - p / dp;
      if (std::abs(polyval(coeffs, next)) >= std::abs(p)) break;
      r = next;
    }
  }
  return z;
}

}  // namespace nhb
