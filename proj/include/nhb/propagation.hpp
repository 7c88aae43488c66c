#pragma once

#include <span>

#include "nhb/exec.hpp"
#include "nhb/params.hpp"
#include "nhb/susceptibility.hpp"

namespace nhb {

enum class GroupVelocityForm {
  /// 2 k14 L c (W3^2 - G41 G21)^2 / (w14 OD G41 W_D [W3^2 + c2 - G21^2]).
  printed,
  /// Slope of Re chi1 at delta = 0: 2 L (K + G41 G21)^2 / (OD G41 W_D (K - G21^2)),
  /// K = g W3^2 + c2. Agrees with a finite-difference group index.
  dispersion,
};

/// Group velocity in m/s. Only Re(c2) enters. Throws SingularParameter when
/// the denominator vanishes.
double group_velocity(const SystemParams& sys, const FieldParams& fields, double w_d = 1.0,
                      GroupVelocityForm form = GroupVelocityForm::printed,
                      double coupling_factor = 0.25);

/// EIT loss coefficient in 1/m: 2 N s14 G41 G21 / (4 g W3^2 + 4 G41 G21).
double absorption_alpha(const SystemParams& sys, const FieldParams& fields,
                        double coupling_factor = 0.25);

struct Bandwidth {
  double exact = 0.0;   // 2 pi v_g / L, internal units
  double approx = 0.0;  // pi W3^2 / (OD G41)
  double ratio() const { return approx / exact; }
};

Bandwidth bandwidth(const SystemParams& sys, const FieldParams& fields,
                    GroupVelocityForm form = GroupVelocityForm::printed,
                    double coupling_factor = 0.25);

/// sin(z)/z, power series below |z| = 1e-2.
Complex complex_sinc(Complex z);

/// Linear phase-matching model. Offsets are in internal units; the
/// conversion to physical wavenumbers uses `rate_unit` (rad/s per unit).
///
/// Sign convention: the biphoton amplitude uses the kernel exp(+i delta tau)
/// (photon detunings are -eig(H_eff), so the channel poles lie in the upper
/// half plane). For the same causal structure the mismatch is taken as
/// dk = delta / v_g - i alpha, so that Phi has its only singularity at
/// delta = i alpha v_g and the group-delay waveform is zero for tau < 0.
struct PhaseMatching {
  double v_g = 0.0;        // m/s
  double alpha = 0.0;      // 1/m
  double k_as0 = 0.0;      // 1/m
  double length = 0.0;     // m
  double rate_unit = 1.0;  // rad/s per internal unit
  bool bypass = false;     // Phi == 1
  Bandwidth bw;

  /// Group delay L / v_g in internal time units.
  double group_delay() const;
  /// Complex mismatch dk(delta) in 1/m.
  Complex dk(Complex delta) const;
  Complex phi(Complex delta) const;
};

struct PhaseMatchingOptions {
  GroupVelocityForm form = GroupVelocityForm::printed;
  double coupling_factor = 0.25;
  double w_d = 1.0;
  bool bypass = false;
};

PhaseMatching phase_matching(const SystemParams& sys, const FieldParams& fields,
                             const PhaseMatchingOptions& opts = {});

/// Phi on the grid. Throws NumericalError when alpha L is large enough for
/// the sinc factor to overflow.
ComplexSpectrum phi(std::span<const double> grid, const PhaseMatching& pm,
                    Exec exec = default_exec);

}  // namespace nhb
