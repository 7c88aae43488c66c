// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (capped at 1 so ctest reports a plain failure).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhb/counting.hpp"
#include "nhb/eigensystem.hpp"
#include "nhb/fitting.hpp"
#include "nhb/params.hpp"
#include "nhb/susceptibility.hpp"
#include "nhb/waveform.hpp"

using namespace nhb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class... T>
std::string fmtn(const char* f, T... a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Smallest |a - b| relative to max(|b|, floor).
double rel(Complex a, Complex b, double floor = 1.0) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

// Eigen companion-matrix roots of a monic-normalized polynomial, descending coefficients.
template <std::size_t N>
std::vector<Complex> companion_roots(const std::array<Complex, N>& c) {
  const int n = static_cast<int>(N) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) m(0, j) = -c[j + 1] / c[0];
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
  std::vector<Complex> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return r;
}

// Max over a of min over b of |a - b|, scaled.
double match_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    double best = 1e300;
    for (const Complex& y : b) best = std::min(best, rel(x, y));
    worst = std::max(worst, best);
  }
  return worst;
}

double rel_l2_scaled(const std::vector<double>& a, const std::vector<double>& b) {
  // best scale s minimizing |s a - b|
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  const double s = ab / aa;
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err += (s * a[i] - b[i]) * (s * a[i] - b[i]);
  return std::sqrt(err / bb);
}

Outcome ep_location() {
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams sys;
  sys.gamma21_ratio = 0.2;
  const double w = find_ep(sys, 0.0);
  FieldParams f;
  f.omega3 = w;
  f.delta3 = 0.0;
  const EigenPair e = eigenvalues(sys, f);
  const double gap = std::abs(e.delta_plus - e.delta_minus);
  const double dt = seconds_since(t0);
  return {std::abs(w - 0.8) <= 1e-6 && gap < 1e-10 && dt < 1.0,
          fmtn("omega3_EP=%.12f |d+ - d-|=%.3g runtime=%.3fs", w, gap, dt)};
}

Outcome eigen_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_eig = 0.0, worst_sum = 0.0, worst_prod = 0.0;
  for (int k = 0; k < 10000; ++k) {
    SystemParams sys;
    sys.gamma21_ratio = 0.01 + 0.99 * u(rng);
    FieldParams f;
    f.omega3 = 5.0 * u(rng);
    f.delta3 = 10.0 * (u(rng) - 0.5);
    const EigenPair e = eigenvalues(sys, f);
    const EffectiveHamiltonian h = effective_hamiltonian(sys, f);
    Eigen::Matrix2cd m;
    m << h.h11, h.h12, h.h21, h.h22;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(-m);
    const std::vector<Complex> oracle{es.eigenvalues()(0), es.eigenvalues()(1)};
    const double scale = std::max(1.0, m.norm());
    double err = 1e300;
    for (int p = 0; p < 2; ++p)
      err = std::min(err, std::max(std::abs(e.delta_plus - oracle[p]),
                                   std::abs(e.delta_minus - oracle[1 - p])) / scale);
    // Near a coalescence the oracle itself loses half the digits; compare
    // the symmetric functions there instead of individual roots.
    const double gap = std::abs(e.delta_plus - e.delta_minus) / scale;
    if (gap > 1e-4) worst_eig = std::max(worst_eig, err);
    const Complex tr = -(h.h11 + h.h22);
    const Complex det = h.h11 * h.h22 - h.h12 * h.h21;
    worst_sum = std::max(worst_sum, std::abs(e.delta_plus + e.delta_minus - tr) / scale);
    worst_prod = std::max(worst_prod, std::abs(e.delta_plus * e.delta_minus - det) / (scale * scale));
  }
  const double dt = seconds_since(t0);
  return {worst_eig < 1e-12 && worst_sum < 1e-12 && worst_prod < 1e-12 && dt < 5.0,
          fmtn("max rel err: eig %.2g, trace %.2g, det %.2g; runtime=%.2fs", worst_eig, worst_sum,
               worst_prod, dt)};
}

Outcome deit_consistency() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    SystemParams sys;
    sys.gamma21_ratio = 0.01 + 0.99 * u(rng);
    FieldParams f;
    f.omega3 = 5.0 * u(rng);
    f.delta3 = 10.0 * (u(rng) - 0.5);
    const auto c = d_eit_cleared_coefficients(sys, f, 1.0, 0.25);
    const auto roots = companion_roots(c);
    const EigenPair e = eigenvalues(sys, f);
    worst = std::max(worst, match_error({e.delta_plus, e.delta_minus}, roots));
  }
  return {worst < 1e-10, fmt("max |root - delta| = %.3g over 1000 draws", worst)};
}

Outcome closed_vs_numeric() {
  const auto grid = uniform_grid(-400.0, 400.0, 1 << 16);
  const auto tau = uniform_grid(0.0, 15.0, 751);
  const ComplexSpectrum flat{grid, std::vector<Complex>(grid.size(), 1.0), Axis::real_delta};
  std::string detail;
  bool pass = true;
  struct Case {
    const char* name;
    Complex plus, minus;
  };
  const double g = 0.6;
  const double s = 0.946 - 0.254;
  for (const Case& c : {Case{"strong", Complex(1.5, g), Complex(-1.5, g)},
                        Case{"weak", Complex(0.0, g + 0.5 * s), Complex(0.0, g - 0.5 * s)}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto num = synthesize_numeric(two_pole_kappa(grid, c.plus, c.minus), flat, tau);
    const auto closed = std::string(c.name) == "strong"
                            ? g2_eq3(tau, 1.0, g, c.plus - c.minus)
                            : g2_eq4(tau, 1.0, g, s);
    const double err = rel_l2_scaled(num.g2, closed.g2);
    const double dt = seconds_since(t0);
    pass = pass && err < 0.02 && dt < 10.0;
    detail += fmtn("%s: L2 %.2e (%.2fs)  ", c.name, err, dt);
  }
  return {pass, detail};
}

Outcome ep_continuity() {
  const auto tau = uniform_grid(0.0, 20.0, 4001);
  const double g = 0.6;
  const double w = 1e-4;
  auto normalized = [](std::vector<double> v) {
    const double p = *std::max_element(v.begin(), v.end());
    for (double& x : v) x /= p;
    return v;
  };
  const auto ref = normalized(ep_limit(tau, 1.0, g).g2);
  const auto a = normalized(g2_eq3(tau, 1.0, g, Complex(w, 0.0)).g2);
  const auto b = normalized(g2_eq4(tau, 1.0, g, w).g2);
  double ea = 0.0, eb = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    ea = std::max(ea, std::abs(a[i] - ref[i]));
    eb = std::max(eb, std::abs(b[i] - ref[i]));
  }
  return {ea < 1e-3 && eb < 1e-3, fmtn("L-inf: oscillatory %.2e, two-exponential %.2e", ea, eb)};
}

Outcome rabi_period() {
  SystemParams sys;
  const double step_ns = 0.01;
  const double omega_e = 2.0 * constants::pi / sys.from_ns(4.5);
  std::vector<double> tau;
  for (double t = 0.0; t <= 30.0 + 1e-12; t += step_ns) tau.push_back(sys.from_ns(t));
  const auto w = g2_eq3(tau, 1.0, 0.6, Complex(omega_e, 0.0));
  std::vector<double> zeros;
  for (std::size_t i = 1; i + 1 < tau.size(); ++i)
    if (w.g2[i] < w.g2[i - 1] && w.g2[i] <= w.g2[i + 1]) zeros.push_back(sys.to_ns(tau[i]));
  bool pass = zeros.size() >= 3;
  double worst = 0.0;
  for (std::size_t k = 1; k < zeros.size(); ++k)
    worst = std::max(worst, std::abs(zeros[k] - zeros[k - 1] - 4.5));
  pass = pass && worst <= step_ns + 1e-9;
  return {pass, fmtn("%zu zeros, max spacing deviation %.3g ns (grid step %.2g ns)", zeros.size(),
                     worst, step_ns)};
}

Outcome doppler_width() {
  SystemParams sys;
  sys.temperature = 333.15;
  const double a = doppler_width_fwhm(sys, 780e-9) / 1e6;
  const double b = doppler_width_fwhm(sys, 795e-9) / 1e6;
  const bool pass = std::abs(a - 539.0) / 539.0 < 0.03 && std::abs(b - 539.0) / 539.0 < 0.03;
  return {pass, fmtn("780 nm: %.1f MHz, 795 nm: %.1f MHz", a, b)};
}

Outcome csr_pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams sys;
  const double target = 19.3;
  const auto tau = uniform_grid(0.0, sys.from_ns(1000.0), 20001);
  const double duration = 600.0, bin = 0.2;
  CountingOptions opts;
  // ~1000 background counts per bin
  const double background = 1000.0 / (duration * bin * opts.efficiency());
  const double rs = std::sqrt(background);
  // amplitude tuned on the expected counts so the normalized peak is the target
  const auto shape = ep_limit(tau, 1.0, 0.6);
  const auto unit = expected_counts(shape, sys, 0.0, 0.0, duration, bin, opts);
  const double unit_peak = *std::max_element(unit.begin(), unit.end());
  const double w1 = (target - 1.0) * 1000.0 / unit_peak;
  const auto wf = ep_limit(tau, w1, 0.6);
  const auto hist = simulate_histogram(wf, sys, rs, rs, duration, bin, 2024, opts);
  const double peak = cross_peak(normalize_to_g2(hist));
  const CsrReport r = cauchy_schwarz(peak, 1.6, 2.0);
  const double dt = seconds_since(t0);
  const bool pass = std::abs(r.r2 - 116.4) / 116.4 < 0.05 && r.violated && dt < 5.0;
  return {pass, fmtn("cross peak %.2f, R2 = %.1f +- %.1f, violated=%d, runtime=%.2fs", peak, r.r2,
                     r.uncertainty, int(r.violated), dt)};
}

struct RoundTripCase {
  const char* name;
  FitModel expected;
  double gamma_eff;
  double splitting;
};

Outcome fit_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams sys;
  const double bin = 0.2, duration = 600.0;
  const double onset_ns = 5.0;
  CountingOptions opts;
  // peak ~200 counts over ~10 counts of background per bin
  const double bg_counts = 10.0;
  const double rs = std::sqrt(bg_counts / (duration * bin * opts.efficiency()));
  std::vector<double> tau;
  for (double t = -onset_ns; t <= 250.0 + 1e-9; t += 0.05) tau.push_back(sys.from_ns(t));

  std::string detail;
  bool pass = true;
  for (const RoundTripCase& c :
       {RoundTripCase{"strong", FitModel::eq3, 0.6, 3.0},
        RoundTripCase{"weak", FitModel::eq4_canonical, 0.6, 0.946 - 0.254}}) {
    CorrelationWaveform shape = c.expected == FitModel::eq3
                                    ? g2_eq3(tau, 1.0, c.gamma_eff, Complex(c.splitting, 0.0))
                                    : g2_eq4(tau, 1.0, c.gamma_eff, c.splitting);
    const auto unit = expected_counts(shape, sys, 0.0, 0.0, duration, bin, opts);
    const double w1 = 190.0 / *std::max_element(unit.begin(), unit.end());
    for (double& g : shape.g2) g *= w1;

    const int seeds = 100;
    std::vector<double> eg(seeds), es(seeds);
    std::vector<int> correct(seeds), covered(seeds);
    for_each_index(default_exec, seeds, [&](std::size_t k) {
      CoincidenceHistogram h =
          simulate_histogram(shape, sys, rs, rs, duration, bin, 1000 + k, opts, Exec::serial);
      const FitResult fit = fit_waveform(h, sys);
      correct[k] = fit.model == c.expected;
      eg[k] = std::abs(fit.gamma_eff - c.gamma_eff) / c.gamma_eff;
      es[k] = std::abs(fit.splitting - c.splitting) / c.splitting;
      covered[k] = std::abs(fit.gamma_eff - c.gamma_eff) <= fit.gamma_eff_err;
    });
    auto median = [](std::vector<double> v) {
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      return v[v.size() / 2];
    };
    const double mg = median(eg), ms = median(es);
    int ok = 0, cov = 0;
    for (int k = 0; k < seeds; ++k) {
      ok += correct[k];
      cov += covered[k];
    }
    pass = pass && mg < 0.03 && ms < 0.03 && ok >= 95;
    detail += fmtn("%s: median err G %.2f%% W %.2f%%, selected %d/100, 1-sigma cover %d%%; ",
                   c.name, 100 * mg, 100 * ms, ok, cov);
  }
  const double dt = seconds_since(t0);
  pass = pass && dt < 120.0;
  detail += fmt("runtime=%.1fs", dt);
  return {pass, detail};
}

Outcome regime_trajectory() {
  SystemParams sys;
  const RabiCalibration calib{1.0, 0.8};
  const std::vector<double> powers = {15.0, 3.0, 1.0, 0.6, 0.4, 0.25};
  const std::vector<ShapeClass> expected = {ShapeClass::oscillatory,
                                            ShapeClass::oscillatory,
                                            ShapeClass::ep,
                                            ShapeClass::oscillatory_with_offset,
                                            ShapeClass::antibunching,
                                            ShapeClass::antibunching};
  const auto grid = uniform_grid(-400.0, 400.0, 1 << 16);
  const auto tau = uniform_grid(0.0, 25.0, 1001);
  const ComplexSpectrum flat{grid, std::vector<Complex>(grid.size(), 1.0), Axis::real_delta};
  bool pass = true;
  std::string detail;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    FieldParams f;
    f.omega3 = power_to_rabi(powers[k], calib);
    f.delta3 = 0.0;
    const EigenPair e = eigenvalues(sys, f);
    const auto wf = synthesize_numeric(two_pole_kappa(grid, e.delta_plus, e.delta_minus), flat, tau);
    const ShapeReport rep = classify_shape(wf, sys);
    const bool ok = rep.shape == expected[k];
    pass = pass && ok;
    detail += fmtn("%gmW:%s%s ", powers[k], std::string(to_string(rep.shape)).c_str(),
                   ok ? "" : ("(want " + std::string(to_string(expected[k])) + ")").c_str());
  }
  return {pass, detail};
}

Outcome double_dressing() {
  SystemParams sys;
  FieldParams f;
  f.omega3 = 20.0;
  f.omega2 = 8.0;
  f.delta2 = 0.0;
  f.delta3 = 0.0;
  DopplerModel off;
  off.enabled = false;
  ChiParams chi;
  chi.double_dressing = true;
  const auto grid = uniform_grid(-20.0, 20.0, 8001);
  const ComplexSpectrum s = chi3(grid, sys, f, off, chi);
  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double a = std::abs(s.values[i - 1]), b = std::abs(s.values[i]),
                 c = std::abs(s.values[i + 1]);
    if (b > a && b > c) maxima.push_back(grid[i]);
  }
  const auto roots = double_dressing_channels(sys, f);
  const auto oracle = companion_roots(double_dressing_polynomial(sys, f));
  const double err = match_error({roots.begin(), roots.end()}, oracle);
  std::string where;
  for (double m : maxima) where += fmt(" %.2f", m);
  return {maxima.size() == 3 && err < 1e-10,
          fmtn("%zu maxima at", maxima.size()) + where + fmt("; root error %.2g", err)};
}

Outcome statistics() {
  SystemParams sys;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t bins = 10000;
  const double bin = 0.2, duration = 600.0;
  CountingOptions opts;
  const auto tau = uniform_grid(0.0, sys.from_ns(bin * bins), 101);
  CorrelationWaveform flat = ep_limit(tau, 0.0, 0.6);
  const double mean_target = 25.0;
  const double rs = std::sqrt(mean_target / (duration * bin * opts.efficiency()));
  const auto a = simulate_histogram(flat, sys, rs, rs, duration, bin, 99, opts, Exec::parallel);
  const auto b = simulate_histogram(flat, sys, rs, rs, duration, bin, 99, opts, Exec::serial);
  const auto c = simulate_histogram(flat, sys, rs, rs, duration, bin, 99, opts, Exec::parallel);
  double m = 0.0;
  for (auto k : a.counts) m += static_cast<double>(k);
  const double n = static_cast<double>(a.counts.size());
  m /= n;
  double v = 0.0;
  for (auto k : a.counts) v += (k - m) * (k - m);
  v /= (n - 1.0);
  const double index = v / m;
  const double z = (m - mean_target) / std::sqrt(mean_target / n);
  const bool same = a.counts == b.counts && a.counts == c.counts;
  const bool pass = a.counts.size() == bins && std::abs(z) < 4.0 && index >= 0.9 &&
                    index <= 1.1 && same;
  return {pass, fmtn("%zu bins, mean %.3f (z=%.2f), dispersion %.4f, reproducible=%d, %.2fs",
                     a.counts.size(), m, z, index, int(same), seconds_since(t0))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"EP location", ep_location},
      {"eigenvalue oracle", eigen_oracle},
      {"d_EIT / eigenvalue consistency", deit_consistency},
      {"closed form vs numeric transform", closed_vs_numeric},
      {"EP waveform continuity", ep_continuity},
      {"Rabi period", rabi_period},
      {"Doppler width", doppler_width},
      {"Cauchy-Schwarz pipeline", csr_pipeline},
      {"fit round trip", fit_round_trip},
      {"regime trajectory", regime_trajectory},
      {"double-dressing channels", double_dressing},
      {"statistical soundness", statistics},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
