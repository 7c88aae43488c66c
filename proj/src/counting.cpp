#include "nhb/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "nhb/errors.hpp"

namespace nhb {

namespace {

// SplitMix64; small state, good enough mixing for per-bin seeding.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

std::uint64_t bin_seed(std::uint64_t seed, std::uint64_t bin) {
  SplitMix64 mix(seed);
  const std::uint64_t a = mix();
  SplitMix64 mix2(a ^ (bin * 0xd1b54a32d192ed03ULL));
  return mix2();
}

// Linear interpolation of the waveform at internal time t.
double interpolate(const CorrelationWaveform& w, double t) {
  const auto& x = w.tau;
  if (t <= x.front()) return w.g2.front();
  if (t >= x.back()) return w.g2.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double f = (t - x[j - 1]) / (x[j] - x[j - 1]);
  return w.g2[j - 1] + f * (w.g2[j] - w.g2[j - 1]);
}

}  // namespace

std::vector<double> expected_counts(const CorrelationWaveform& waveform, const SystemParams& sys,
                                    double rate_s, double rate_as, double duration,
                                    double bin_width_ns, const CountingOptions& opts) {
  if (!(duration > 0.0)) throw InvalidParameter("duration must be positive");
  if (!(bin_width_ns > 0.0)) throw InvalidParameter("bin width must be positive");
  if (!(rate_s >= 0.0) || !(rate_as >= 0.0))
    throw InvalidParameter("singles rates must be non-negative");
  if (opts.samples_per_bin < 1) throw InvalidParameter("samples_per_bin must be >= 1");
  if (waveform.tau.size() < 2) throw InvalidParameter("waveform needs at least two samples");
  for (std::size_t i = 1; i < waveform.tau.size(); ++i)
    if (!(waveform.tau[i] > waveform.tau[i - 1]))
      throw InvalidParameter("waveform tau must be increasing");

  const double t0 = sys.to_ns(waveform.tau.front());
  const double span = sys.to_ns(waveform.tau.back()) - t0;
  const auto nbins = static_cast<std::size_t>(std::floor(span / bin_width_ns + 1e-9));
  if (nbins == 0) throw InvalidParameter("bin width exceeds the waveform span");

  const double background = rate_s * rate_as;
  const double factor = duration * bin_width_ns * opts.efficiency();
  std::vector<double> means(nbins);
  const int m = opts.samples_per_bin;
  for (std::size_t k = 0; k < nbins; ++k) {
    double acc = 0.0;
    for (int s = 0; s < m; ++s) {
      const double t_ns = t0 + bin_width_ns * (static_cast<double>(k) + (s + 0.5) / m);
      acc += interpolate(waveform, sys.from_ns(t_ns));
    }
    const double mean = (acc / m + background) * factor;
    if (!std::isfinite(mean) || mean < 0.0 || mean > 1e15)
      throw InvalidParameter("expected count " + std::to_string(mean) + " in bin " +
                             std::to_string(k) + " is out of range");
    means[k] = mean;
  }
  return means;
}

std::vector<std::int64_t> poisson_counts(const std::vector<double>& means, std::uint64_t seed,
                                         Exec exec) {
  std::vector<std::int64_t> counts(means.size());
  for_each_index(exec, means.size(), [&](std::size_t k) {
    if (means[k] <= 0.0) {
      counts[k] = 0;
      return;
    }
    SplitMix64 gen(bin_seed(seed, k));
    std::poisson_distribution<std::int64_t> dist(means[k]);
    counts[k] = dist(gen);
  });
  return counts;
}

CoincidenceHistogram simulate_histogram(const CorrelationWaveform& waveform,
                                        const SystemParams& sys, double rate_s, double rate_as,
                                        double duration, double bin_width_ns, std::uint64_t seed,
                                        const CountingOptions& opts, Exec exec) {
  const auto means =
      expected_counts(waveform, sys, rate_s, rate_as, duration, bin_width_ns, opts);
  CoincidenceHistogram h;
  h.bin_width = bin_width_ns;
  h.duration = duration;
  h.background_rate = rate_s * rate_as;
  h.seed = seed;
  h.counts = poisson_counts(means, seed, exec);
  const double t0 = sys.to_ns(waveform.tau.front());
  h.tau_ns.resize(means.size());
  for (std::size_t k = 0; k < means.size(); ++k)
    h.tau_ns[k] = t0 + bin_width_ns * (static_cast<double>(k) + 0.5);
  return h;
}

NormalizedCurve normalize_to_g2(const CoincidenceHistogram& hist, double background_fraction) {
  if (!(background_fraction > 0.0) || background_fraction > 1.0)
    throw NormalizationError("background fraction must be in (0, 1]");
  const std::size_t n = hist.counts.size();
  const auto window = static_cast<std::size_t>(std::floor(background_fraction * n));
  if (window == 0) throw NormalizationError("background window is empty");
  double sum = 0.0;
  for (std::size_t k = n - window; k < n; ++k) sum += static_cast<double>(hist.counts[k]);
  const double mean = sum / static_cast<double>(window);
  if (!(mean > 0.0)) throw NormalizationError("background window has no counts");

  NormalizedCurve c;
  c.tau_ns = hist.tau_ns;
  c.scale = mean;
  c.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) c.values[k] = static_cast<double>(hist.counts[k]) / mean;
  return c;
}

double cross_peak(const NormalizedCurve& curve) {
  if (curve.values.empty()) throw NormalizationError("normalized curve is empty");
  return *std::max_element(curve.values.begin(), curve.values.end());
}

CsrReport cauchy_schwarz(double peak, double g2_ss0, double g2_asas0,
                         const CsrUncertainty& sigma) {
  if (!(peak > 0.0) || !(g2_ss0 > 0.0) || !(g2_asas0 > 0.0))
    throw InvalidParameter("Cauchy-Schwarz inputs must be positive");
  CsrReport r;
  r.g2_cross_peak = peak;
  r.g2_ss0 = g2_ss0;
  r.g2_asas0 = g2_asas0;
  r.r2 = peak * peak / (g2_ss0 * g2_asas0);
  const double rel = std::hypot(2.0 * sigma.cross_peak / peak, sigma.g2_ss0 / g2_ss0,
                                sigma.g2_asas0 / g2_asas0);
  r.uncertainty = r.r2 * rel;
  r.violated = r.r2 > 1.0;
  return r;
}

}  // namespace nhb
