#pragma once

#include <cstdint>
#include <vector>

#include "nhb/exec.hpp"
#include "nhb/params.hpp"
#include "nhb/waveform.hpp"

namespace nhb {

/// Per-bin coincidence counts on a tau axis in ns (bin centres).
struct CoincidenceHistogram {
  double bin_width = 0.2;  // ns
  std::vector<double> tau_ns;
  std::vector<std::int64_t> counts;
  double duration = 600.0;         // s
  double background_rate = 0.0;    // R_S R_AS, per s per ns of delay
  std::uint64_t seed = 0;
};

struct CountingOptions {
  double fiber_efficiency = 0.7;
  double detector_efficiency = 0.4;
  int samples_per_bin = 16;  // midpoint samples used for the bin average
  double efficiency() const { return fiber_efficiency * detector_efficiency; }
};

/// Expected counts per bin before Poisson sampling:
/// mean R_cc over the bin * duration * bin_width * efficiency. The waveform
/// tau is in internal units and its G2 in counts per s per ns of delay; `sys`
/// converts tau to ns. Bins tile [tau_front, tau_back] from the first sample.
std::vector<double> expected_counts(const CorrelationWaveform& waveform, const SystemParams& sys,
                                    double rate_s, double rate_as, double duration,
                                    double bin_width_ns, const CountingOptions& opts = {});

/// Independent Poisson draw per bin. Bin k uses its own generator seeded
/// from (seed, k), so serial and parallel runs agree bit for bit.
CoincidenceHistogram simulate_histogram(const CorrelationWaveform& waveform,
                                        const SystemParams& sys, double rate_s, double rate_as,
                                        double duration, double bin_width_ns, std::uint64_t seed,
                                        const CountingOptions& opts = {},
                                        Exec exec = default_exec);

/// Poisson draws for a given vector of means (same seeding rule).
std::vector<std::int64_t> poisson_counts(const std::vector<double>& means, std::uint64_t seed,
                                         Exec exec = default_exec);

struct NormalizedCurve {
  std::vector<double> tau_ns;
  std::vector<double> values;
  double scale = 1.0;  // background-window mean that was divided out
};

/// Counts divided by the mean of the trailing `background_fraction` of bins.
/// Throws NormalizationError when that window is empty or its mean is 0.
NormalizedCurve normalize_to_g2(const CoincidenceHistogram& hist,
                                double background_fraction = 0.2);

/// Largest value of the normalized curve.
double cross_peak(const NormalizedCurve& curve);

struct CsrReport {
  double g2_cross_peak = 0.0;
  double g2_ss0 = 1.6;
  double g2_asas0 = 2.0;
  double r2 = 0.0;
  double uncertainty = 0.0;
  bool violated = false;
};

struct CsrUncertainty {
  double cross_peak = 0.0;
  double g2_ss0 = 0.2;
  double g2_asas0 = 0.0;
};

/// R2 = peak^2 / (g_ss g_asas); uncertainty by first-order propagation of
/// the relative errors.
CsrReport cauchy_schwarz(double cross_peak, double g2_ss0 = 1.6, double g2_asas0 = 2.0,
                         const CsrUncertainty& sigma = {});

}  // namespace nhb
