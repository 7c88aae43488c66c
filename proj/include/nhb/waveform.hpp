#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nhb/eigensystem.hpp"
#include "nhb/exec.hpp"
#include "nhb/params.hpp"
#include "nhb/propagation.hpp"
#include "nhb/susceptibility.hpp"

namespace nhb {

enum class WaveformMethod { numeric_transform, eq3, eq4, eq4_verbatim, s34_group_delay, ep_limit };

std::string_view to_string(WaveformMethod method);
/// Inverse of to_string; throws InvalidParameter on unknown names.
WaveformMethod waveform_method_from_string(std::string_view name);

/// G2 on a tau grid in internal time units (1/Gamma41).
struct CorrelationWaveform {
  std::vector<double> tau;
  std::vector<double> g2;
  WaveformMethod method = WaveformMethod::eq3;
  std::vector<std::pair<std::string, double>> meta;

  /// Value stored under `key` in meta; throws InvalidParameter if absent.
  double meta_value(std::string_view key) const;
};

struct KappaSpectrum {
  ComplexSpectrum values;
  double kappa0 = 1.0;  // constant surrogate for the group-delay regime
};

/// kappa = -i (k14 / 2) chi3 E1 E2, with omega_S ~ omega_AS ~ omega14.
KappaSpectrum kappa_from_chi3(const ComplexSpectrum& chi3, const SystemParams& sys,
                              const FieldParams& fields);

/// 1 / ((delta - plus)(delta - minus)), the pole structure of chi3 with Phi = 1.
KappaSpectrum two_pole_kappa(std::span<const double> grid, Complex plus, Complex minus);

/// kappa == kappa0 everywhere.
KappaSpectrum constant_kappa(std::span<const double> grid, double kappa0);

struct SynthesisOptions {
  double length_scale = 1.0;    // the L in front of the transform
  double taper_fraction = 0.05;  // raised-cosine taper on each end of the grid
  double leakage_limit = 0.01;   // max acausal |psi|^2 relative to peak
};

/// psi(tau) = (L / 2 pi) sum kappa Phi exp(+i delta tau) d(delta), evaluated
/// directly for each tau. Negative-tau values are zeroed; the largest
/// acausal value relative to the peak goes to meta "acausal_leakage" (probed
/// at -tau when the grid has no negative entries). Throws InvalidParameter on
/// mismatched or non-uniform delta grids, ResolutionError when the spacing
/// exceeds pi / max|tau| or the leakage exceeds the limit.
CorrelationWaveform synthesize_numeric(const KappaSpectrum& kappa, const ComplexSpectrum& phi,
                                       std::span<const double> tau,
                                       const SynthesisOptions& opts = {},
                                       Exec exec = default_exec);

/// W1 exp(-2 tau G_eff / W_D) [1 - cos(W_e tau / W_D)]. Throws WrongRegime for
/// a splitting with nonzero imaginary part.
CorrelationWaveform g2_eq3(std::span<const double> tau, double w1, double gamma_eff,
                           Complex omega_e, double w_d = 1.0);

/// Weak coupling, canonical form
///   (W1 / s^2) [exp(-G_e- tau / W_D) - exp(-G_e+ tau / W_D)]^2,  G_e+- = G_eff +- s/2,
/// with s = |W_e|. `verbatim` switches to
///   (W1 / s^2) exp(-2 G_eff tau / W_D) [exp(s tau / W_D) - exp(-s tau / W_D)]^2.
CorrelationWaveform g2_eq4(std::span<const double> tau, double w1, double gamma_eff,
                           double splitting, double w_d = 1.0, bool verbatim = false);

/// W1 kappa0^2 v_g^2 exp(-2 alpha v_g tau / W_D). `seconds_per_unit` converts
/// the tau grid to seconds (1 when tau is already in seconds).
CorrelationWaveform g2_group_delay(std::span<const double> tau, double kappa0, double v_g,
                                   double alpha, double w_d = 1.0, double w1 = 1.0,
                                   double seconds_per_unit = 1.0);

/// W1 tau^2 exp(-2 G_eff tau / W_D), the coalesced shape.
CorrelationWaveform ep_limit(std::span<const double> tau, double w1, double gamma_eff,
                             double w_d = 1.0);

/// R_cc = G2 + R_S R_AS.
std::vector<double> coincidence_rate(const CorrelationWaveform& waveform, double rate_s,
                                     double rate_as);

struct Channel {
  double signal_offset = 0.0;      // relative to the signal centre frequency
  double anti_stokes_offset = 0.0;
  double linewidth = 0.0;
  Complex amplitude = 0.0;
};

struct ChannelState {
  std::vector<Channel> channels;
  int dimension() const { return static_cast<int>(channels.size()); }
};

/// Two channels with N1 = N2 = 1/sqrt(2) at {S + W_e/2, AS - W_e/2} and
/// {S - W_e/2, AS + W_e/2}; a single channel when |W_e| < ep_tolerance.
ChannelState channel_state(const EigenPair& eig, double ep_tolerance = default_ep_tolerance);

/// Three channels from the double-dressing roots. `weights` are normalized;
/// default equal weights.
ChannelState channel_state(const std::array<Complex, 3>& roots,
                           std::array<Complex, 3> weights = {1.0, 1.0, 1.0});

}  // namespace nhb
