#include "nhb/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhb/errors.hpp"

namespace nhb {

namespace {

constexpr Complex I(0.0, 1.0);

CorrelationWaveform make_waveform(std::span<const double> tau, WaveformMethod method) {
  CorrelationWaveform w;
  w.tau.assign(tau.begin(), tau.end());
  w.g2.assign(tau.size(), 0.0);
  w.method = method;
  return w;
}

void check_tau(std::span<const double> tau) {
  for (double t : tau)
    if (!std::isfinite(t)) throw InvalidParameter("tau grid must be finite");
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw InvalidParameter(std::string(name) + " must be positive");
}

// Spacing of a uniform grid; throws when the grid is not uniform.
double uniform_step(const std::vector<double>& grid) {
  if (grid.size() < 2) throw InvalidParameter("delta grid needs at least two points");
  const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(step > 0.0)) throw InvalidParameter("delta grid must be increasing");
  const double tol = 1e-9 * (grid.back() - grid.front());
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (std::abs(grid[k] - (grid.front() + step * static_cast<double>(k))) > tol)
      throw InvalidParameter("delta grid must be uniform");
  return step;
}

std::vector<double> raised_cosine_taper(std::size_t n, double fraction) {
  std::vector<double> w(n, 1.0);
  const auto m = static_cast<std::size_t>(fraction * static_cast<double>(n));
  for (std::size_t k = 0; k < m && k < n; ++k) {
    const double v = 0.5 * (1.0 - std::cos(constants::pi * static_cast<double>(k) /
                                           static_cast<double>(m)));
    w[k] = v;
    w[n - 1 - k] = v;
  }
  return w;
}

}  // namespace

std::string_view to_string(WaveformMethod method) {
  switch (method) {
    case WaveformMethod::numeric_transform: return "numeric_transform";
    case WaveformMethod::eq3: return "eq3";
    case WaveformMethod::eq4: return "eq4";
    case WaveformMethod::eq4_verbatim: return "eq4_verbatim";
    case WaveformMethod::s34_group_delay: return "s34_group_delay";
    case WaveformMethod::ep_limit: return "ep_limit";
  }
  return "unknown";
}

WaveformMethod waveform_method_from_string(std::string_view name) {
  for (auto m : {WaveformMethod::numeric_transform, WaveformMethod::eq3, WaveformMethod::eq4,
                 WaveformMethod::eq4_verbatim, WaveformMethod::s34_group_delay,
                 WaveformMethod::ep_limit})
    if (to_string(m) == name) return m;
  throw InvalidParameter("unknown waveform method '" + std::string(name) + "'");
}

double CorrelationWaveform::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  throw InvalidParameter("waveform has no meta entry '" + std::string(key) + "'");
}

KappaSpectrum kappa_from_chi3(const ComplexSpectrum& chi3, const SystemParams& sys,
                              const FieldParams& fields) {
  KappaSpectrum k;
  k.values = chi3;
  const Complex scale = -I * (0.5 * sys.k14()) * fields.e1_amp * fields.e2_amp;
  for (Complex& v : k.values.values) v *= scale;
  return k;
}

KappaSpectrum two_pole_kappa(std::span<const double> grid, Complex plus, Complex minus) {
  KappaSpectrum k;
  k.values.delta.assign(grid.begin(), grid.end());
  k.values.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    k.values.values[i] = 1.0 / ((grid[i] - plus) * (grid[i] - minus));
  return k;
}

KappaSpectrum constant_kappa(std::span<const double> grid, double kappa0) {
  KappaSpectrum k;
  k.kappa0 = kappa0;
  k.values.delta.assign(grid.begin(), grid.end());
  k.values.values.assign(grid.size(), Complex(kappa0));
  return k;
}

CorrelationWaveform synthesize_numeric(const KappaSpectrum& kappa, const ComplexSpectrum& phi,
                                       std::span<const double> tau,
                                       const SynthesisOptions& opts, Exec exec) {
  const auto& grid = kappa.values.delta;
  if (kappa.values.axis != Axis::real_delta || phi.axis != Axis::real_delta)
    throw InvalidParameter("synthesis needs spectra on the real delta axis");
  if (phi.delta.size() != grid.size() || kappa.values.values.size() != grid.size() ||
      phi.values.size() != grid.size())
    throw InvalidParameter("kappa and Phi must share one delta grid");
  const double step = uniform_step(grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (std::abs(phi.delta[k] - grid[k]) > 1e-9 * step)
      throw InvalidParameter("kappa and Phi must share one delta grid");
  check_tau(tau);
  if (tau.empty()) throw InvalidParameter("tau grid is empty");

  double tau_max = 0.0;
  for (double t : tau) tau_max = std::max(tau_max, std::abs(t));
  if (tau_max > 0.0 && step > constants::pi / tau_max)
    throw ResolutionError("delta spacing " + std::to_string(step) + " exceeds pi/tau_max = " +
                          std::to_string(constants::pi / tau_max));

  const std::vector<double> taper = raised_cosine_taper(grid.size(), opts.taper_fraction);
  std::vector<Complex> weighted(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    weighted[k] = kappa.values.values[k] * phi.values[k] * taper[k] * step;
  const double norm = opts.length_scale / (2.0 * constants::pi);
  const double d0 = grid.front();

  auto psi_sq = [&](double t) {
    // Rotating phasor with a fresh exp every 64 samples to bound drift.
    const Complex rot = std::polar(1.0, step * t);
    Complex acc = 0.0, phase = 1.0;
    for (std::size_t k = 0; k < weighted.size(); ++k) {
      if (k % 64 == 0) phase = std::polar(1.0, (d0 + step * static_cast<double>(k)) * t);
      acc += weighted[k] * phase;
      phase *= rot;
    }
    return std::norm(norm * acc);
  };

  CorrelationWaveform out = make_waveform(tau, WaveformMethod::numeric_transform);
  std::vector<double> raw(tau.size());
  for_each_index(exec, tau.size(), [&](std::size_t i) { raw[i] = psi_sq(tau[i]); });

  bool has_negative = false;
  double peak = 0.0, acausal = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < 0.0) {
      has_negative = true;
      acausal = std::max(acausal, raw[i]);
    } else {
      peak = std::max(peak, raw[i]);
      out.g2[i] = raw[i];
    }
  }
  if (!has_negative) {
    // probe the mirror image of the positive grid, about 256 points
    std::vector<double> probe;
    const std::size_t stride = std::max<std::size_t>(1, tau.size() / 256);
    for (std::size_t i = 0; i < tau.size(); i += stride)
      if (tau[i] > 0.0) probe.push_back(-tau[i]);
    std::vector<double> mirrored(probe.size());
    for_each_index(exec, probe.size(), [&](std::size_t i) { mirrored[i] = psi_sq(probe[i]); });
    for (double v : mirrored) acausal = std::max(acausal, v);
  }
  const double leakage = peak > 0.0 ? acausal / peak : 0.0;
  out.meta = {{"acausal_leakage", leakage}, {"peak", peak}};
  if (leakage > opts.leakage_limit)
    throw ResolutionError("acausal leakage " + std::to_string(leakage) +
                          " of peak exceeds the limit; widen or refine the delta grid");
  return out;
}

CorrelationWaveform g2_eq3(std::span<const double> tau, double w1, double gamma_eff,
                           Complex omega_e, double w_d) {
  check_tau(tau);
  require_positive(w_d, "W_D");
  if (std::abs(omega_e.imag()) > 1e-12 * std::max(1.0, std::abs(omega_e)))
    throw WrongRegime("the oscillatory form needs a real splitting (strong coupling)");
  const double omega = omega_e.real();
  CorrelationWaveform out = make_waveform(tau, WaveformMethod::eq3);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double t = tau[i];
    if (t < 0.0) continue;
    const double s = std::sin(0.5 * omega * t / w_d);
    out.g2[i] = w1 * std::exp(-2.0 * t * gamma_eff / w_d) * 2.0 * s * s;
  }
  out.meta = {{"w1", w1}, {"gamma_eff", gamma_eff}, {"omega_e", omega}, {"w_d", w_d}};
  return out;
}

CorrelationWaveform g2_eq4(std::span<const double> tau, double w1, double gamma_eff,
                           double splitting, double w_d, bool verbatim) {
  check_tau(tau);
  require_positive(w_d, "W_D");
  const double s = std::abs(splitting);
  const double g_minus = gamma_eff - 0.5 * s;
  if (!verbatim && !(g_minus > 0.0))
    throw InvalidParameter("Gamma_e- = " + std::to_string(g_minus) + " is not positive");
  CorrelationWaveform out =
      make_waveform(tau, verbatim ? WaveformMethod::eq4_verbatim : WaveformMethod::eq4);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double t = tau[i] / w_d;
    if (tau[i] < 0.0) continue;
    if (verbatim) {
      const double sh = s > 0.0 ? 2.0 * std::sinh(s * t) / s : 2.0 * t;
      out.g2[i] = w1 * std::exp(-2.0 * gamma_eff * t) * sh * sh;
    } else {
      // [e^{-G- t} - e^{-G+ t}] / s = e^{-G- t} (1 - e^{-s t}) / s
      const double diff = s > 0.0 ? -std::expm1(-s * t) / s : t;
      out.g2[i] = w1 * std::exp(-2.0 * g_minus * t) * diff * diff;
    }
  }
  out.meta = {{"w1", w1},
              {"gamma_eff", gamma_eff},
              {"splitting", s},
              {"gamma_e_plus", gamma_eff + 0.5 * s},
              {"gamma_e_minus", g_minus},
              {"w_d", w_d}};
  return out;
}

CorrelationWaveform g2_group_delay(std::span<const double> tau, double kappa0, double v_g,
                                   double alpha, double w_d, double w1,
                                   double seconds_per_unit) {
  check_tau(tau);
  require_positive(v_g, "v_g");
  require_positive(alpha, "alpha");
  require_positive(w_d, "W_D");
  require_positive(seconds_per_unit, "seconds_per_unit");
  CorrelationWaveform out = make_waveform(tau, WaveformMethod::s34_group_delay);
  const double amp = w1 * kappa0 * kappa0 * v_g * v_g;
  const double rate = 2.0 * alpha * v_g * seconds_per_unit / w_d;
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] >= 0.0) out.g2[i] = amp * std::exp(-rate * tau[i]);
  out.meta = {{"kappa0", kappa0}, {"v_g", v_g}, {"alpha", alpha}, {"w_d", w_d}, {"rate", rate}};
  return out;
}

CorrelationWaveform ep_limit(std::span<const double> tau, double w1, double gamma_eff,
                             double w_d) {
  check_tau(tau);
  require_positive(w_d, "W_D");
  CorrelationWaveform out = make_waveform(tau, WaveformMethod::ep_limit);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double t = tau[i];
    if (t >= 0.0) out.g2[i] = w1 * t * t * std::exp(-2.0 * gamma_eff * t / w_d);
  }
  out.meta = {{"w1", w1}, {"gamma_eff", gamma_eff}, {"w_d", w_d}};
  return out;
}

std::vector<double> coincidence_rate(const CorrelationWaveform& waveform, double rate_s,
                                     double rate_as) {
  if (!(rate_s >= 0.0) || !(rate_as >= 0.0))
    throw InvalidParameter("singles rates must be non-negative");
  std::vector<double> r(waveform.g2.size());
  const double background = rate_s * rate_as;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = waveform.g2[i] + background;
  return r;
}

ChannelState channel_state(const EigenPair& eig, double ep_tolerance) {
  ChannelState st;
  if (std::abs(eig.omega_e) < ep_tolerance) {
    const Complex c = 0.5 * (eig.delta_plus + eig.delta_minus);
    st.channels.push_back({-c.real(), c.real(), c.imag(), 1.0});
    return st;
  }
  const double n = 1.0 / std::sqrt(2.0);
  for (const Complex& d : {eig.delta_plus, eig.delta_minus})
    st.channels.push_back({-d.real(), d.real(), d.imag(), n});
  return st;
}

ChannelState channel_state(const std::array<Complex, 3>& roots, std::array<Complex, 3> weights) {
  double total = 0.0;
  for (const Complex& w : weights) total += std::norm(w);
  if (!(total > 0.0)) throw InvalidParameter("channel weights must not all vanish");
  const double scale = 1.0 / std::sqrt(total);
  ChannelState st;
  for (std::size_t j = 0; j < 3; ++j)
    st.channels.push_back({-roots[j].real(), roots[j].real(), roots[j].imag(), weights[j] * scale});
  return st;
}

}  // namespace nhb
