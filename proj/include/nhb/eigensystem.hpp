#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <vector>

#include "nhb/exec.hpp"
#include "nhb/params.hpp"

namespace nhb {

/// Two-level effective Hamiltonian of the dressed |2> - |4> transition.
struct EffectiveHamiltonian {
  Complex h11, h12, h21, h22;
};

EffectiveHamiltonian effective_hamiltonian(const SystemParams& sys, const FieldParams& fields);

/// Complex eigenenergies of the biphoton channels.
///
/// The eigenvalues follow the closed form
///   delta_pm = -D3/2 + i G_eff +- sqrt(|W3|^2/4 + (D3/2 - i G_diff)^2),
/// which equals the negated spectrum of EffectiveHamiltonian: the photon
/// detuning convention is delta = -eig(H_eff). Ordering: Re(plus) >= Re(minus),
/// ties broken by Im(plus) >= Im(minus).
struct EigenPair {
  Complex delta_plus;
  Complex delta_minus;
  Complex omega_e;             // delta_plus - delta_minus
  double gamma_e_plus = 0.0;   // larger of the two linewidths Im(delta)
  double gamma_e_minus = 0.0;  // smaller one
};

EigenPair eigenvalues(const SystemParams& sys, const FieldParams& fields);

inline constexpr double default_ep_tolerance = 1e-6;

/// Coupling strength omega3 at which the two eigenvalues coalesce, by
/// bisection on the discriminant. Throws NoCoalescence (carrying the smallest
/// attainable |omega_e|) when that minimum exceeds `ep_tolerance`, which
/// happens for any delta3 != 0 with unequal linewidths.
double find_ep(const SystemParams& sys, double delta3, double ep_tolerance = default_ep_tolerance);

enum class Regime { R1_rabi_oscillation, R2_group_delay, R3_antibunching_decay, EP };

std::string_view to_string(Regime regime);

struct RegimeLabel {
  Regime regime;
  double splitting;       // |omega_e|
  double gamma_eff;
  double bandwidth;       // phase-matching bandwidth used for the decision
  double two_gamma_diff;  // omega3 threshold separating strong from weak
};

RegimeLabel classify_regime(const SystemParams& sys, const FieldParams& fields, double bandwidth,
                            double ep_tolerance = default_ep_tolerance);

/// Omega3 outer, delta3 inner. Each axis must be non-empty and monotone.
struct SweepGrid {
  std::vector<double> omega3;
  std::vector<double> delta3;
};

struct SweepRow {
  double omega3;
  double delta3;
  Complex plus;
  Complex minus;
};

/// Eigenvalues on the grid in row-major order. Branch labels are carried
/// along the sweep path by nearest-neighbour matching, so `plus` and `minus`
/// are continuous rather than re-sorted at every point. The first point of
/// each row is matched against the first point of the previous row.
std::vector<SweepRow> sweep_eigenvalues(const SystemParams& sys, const FieldParams& base,
                                        const SweepGrid& grid, Exec exec = default_exec);

/// Cubic whose zeros are the double-dressed channel energies, descending
/// coefficients. Built from the product of the two dressing factors:
///   [(d - d+)(d - p) + g |W2|^2] (d - d-),  p = D2 - D3/2 + i G41,
/// with d+- the single-dressing eigenvalues and g the coupling factor.
std::array<Complex, 4> double_dressing_polynomial(const SystemParams& sys,
                                                  const FieldParams& fields,
                                                  double coupling_factor = 0.25);

/// Zeros of double_dressing_polynomial sorted by real part (then imaginary).
std::array<Complex, 3> double_dressing_channels(const SystemParams& sys, const FieldParams& fields,
                                                double coupling_factor = 0.25);

}  // namespace nhb
