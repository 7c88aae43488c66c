#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nhb/fitting.hpp"

using namespace nhb;

namespace {

// Histogram of `shape` with its peak bin near `peak` counts over ~10 background counts.
CoincidenceHistogram histogram(CorrelationWaveform shape, const SystemParams& sys, double peak,
                               std::uint64_t seed) {
  const double bin = 0.2, duration = 600.0;
  CountingOptions opts;
  const double rs = std::sqrt(10.0 / (duration * bin * opts.efficiency()));
  const auto unit = expected_counts(shape, sys, 0.0, 0.0, duration, bin, opts);
  const double w1 = peak / *std::max_element(unit.begin(), unit.end());
  for (double& g : shape.g2) g *= w1;
  return simulate_histogram(shape, sys, rs, rs, duration, bin, seed, opts);
}

std::vector<double> tau_ns_grid(const SystemParams& sys, double lo, double hi) {
  std::vector<double> tau;
  for (double t = lo; t <= hi + 1e-9; t += 0.05) tau.push_back(sys.from_ns(t));
  return tau;
}

}  // namespace

TEST_CASE("model definitions") {
  const std::vector<double> eq4{2.0, 0.5, 1e-9, 0.1, 1.0};
  const std::vector<double> ep{2.0, 0.5, 0.1, 1.0};
  for (double t : {0.0, 0.5, 2.0, 7.0})
    CHECK(model_value(FitModel::eq4_canonical, eq4, t) ==
          doctest::Approx(model_value(FitModel::ep_limit, ep, t)).epsilon(1e-8));
  CHECK(model_value(FitModel::eq3, std::vector<double>{1, 1, 1, 0.25, 2.0}, 1.0) == 0.25);
  const std::vector<double> s34{3.0, 0.5, 0.2, 1.0};
  CHECK(model_value(FitModel::s34_single_exp, s34, 3.0) == doctest::Approx(3.0 * std::exp(-1.0) + 0.2));
  CHECK_THROWS_AS(model_value(FitModel::eq3, ep, 1.0), InvalidParameter);
  for (auto m : {FitModel::eq3, FitModel::eq4_canonical, FitModel::s34_single_exp, FitModel::ep_limit})
    CHECK(fit_model_from_string(to_string(m)) == m);
  CHECK(parameter_names(FitModel::eq4_canonical).size() == 5);
}

TEST_CASE("oscillatory data is recovered") {
  SystemParams sys;
  const auto tau = tau_ns_grid(sys, -5.0, 150.0);
  const auto h = histogram(g2_eq3(tau, 1.0, 0.6, Complex(3.0, 0.0)), sys, 2000.0, 31);
  const FitResult fit = fit_waveform(h, sys);
  CHECK(fit.model == FitModel::eq3);
  CHECK(fit.converged);
  CHECK(fit.gamma_eff == doctest::Approx(0.6).epsilon(0.03));
  CHECK(fit.splitting == doctest::Approx(3.0).epsilon(0.03));
  CHECK(std::abs(fit.value("tau0")) < 0.1);  // bins start at the waveform front, onset at 0
  CHECK(fit.gamma_eff_err > 0.0);
  CHECK(fit.curve.size() == fit.tau_ns.size());
  CHECK(fit.scores.size() == 4);

  // the normalized curve gives the same rates
  const FitResult norm = fit_waveform(normalize_to_g2(h), sys);
  CHECK(norm.model == fit.model);
  CHECK(norm.gamma_eff == doctest::Approx(fit.gamma_eff).epsilon(1e-6));
  CHECK(norm.splitting == doctest::Approx(fit.splitting).epsilon(1e-6));
}

TEST_CASE("coalesced data selects a single-rate shape") {
  SystemParams sys;
  const auto tau = tau_ns_grid(sys, -5.0, 150.0);
  const auto h = histogram(ep_limit(tau, 1.0, 0.6), sys, 2000.0, 5);
  FitOptions opts;
  opts.models = {FitModel::eq3, FitModel::ep_limit, FitModel::s34_single_exp};
  const FitResult fit = fit_waveform(h, sys, opts);
  CHECK(fit.model == FitModel::ep_limit);
  CHECK(fit.gamma_eff == doctest::Approx(0.6).epsilon(0.05));
}

TEST_CASE("fit guards") {
  SystemParams sys;
  CoincidenceHistogram flat;
  flat.counts = poisson_counts(std::vector<double>(400, 100.0), 3);
  for (int k = 0; k < 400; ++k) flat.tau_ns.push_back(0.1 + 0.2 * k);
  CHECK_THROWS_AS(fit_waveform(flat, sys), NoSignal);
  flat.tau_ns.resize(40);
  flat.counts.resize(40);
  CHECK_THROWS_AS(fit_waveform(flat, sys), InvalidParameter);
  FitData bad{{0, 1}, {1, 2, 3}, {1, 1}};
  CHECK_THROWS_AS(fit_data(bad, sys), InvalidParameter);
}

TEST_CASE("transition trace") {
  SystemParams sys;
  const auto tau = tau_ns_grid(sys, -5.0, 150.0);
  std::vector<TraceInput> in;
  in.push_back({3.0, histogram(g2_eq3(tau, 1.0, 0.6, Complex(3.0, 0.0)), sys, 2000.0, 1)});
  in.push_back({0.5, histogram(g2_eq4(tau, 1.0, 0.6, 0.69), sys, 2000.0, 2)});
  CoincidenceHistogram empty;
  empty.tau_ns = {0.1, 0.3};
  empty.counts = {1, 1};
  in.push_back({1.0, empty});
  const auto rows = trace_transition(in, sys);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].omega3 == 0.5);
  CHECK(rows[1].omega3 == 1.0);
  CHECK(rows[2].omega3 == 3.0);
  CHECK(rows[0].ok);
  CHECK_FALSE(rows[1].ok);
  CHECK_FALSE(rows[1].error.empty());
  CHECK(rows[2].ok);
  CHECK(rows[2].fit.model == FitModel::eq3);

  const auto one = trace_transition({in[0]}, sys);
  CHECK(one.size() == 1);
}

TEST_CASE("shape classes of closed forms") {
  SystemParams sys;
  const auto tau = tau_ns_grid(sys, 0.0, 120.0);
  CHECK(classify_shape(g2_eq3(tau, 1.0, 0.3, Complex(3.0, 0.0)), sys).shape ==
        ShapeClass::oscillatory);
  CHECK(classify_shape(g2_eq4(tau, 1.0, 0.6, 0.69), sys).shape == ShapeClass::antibunching);
  CHECK(classify_shape(ep_limit(tau, 1.0, 0.6), sys).shape == ShapeClass::ep);
  CHECK(classify_shape(g2_group_delay(tau, 1.0, 1.0, 0.2), sys).shape == ShapeClass::group_delay);

  auto offset = g2_eq3(tau, 1.0, 0.3, Complex(3.0, 0.0));
  for (double& g : offset.g2) g += 0.2;
  const ShapeReport r = classify_shape(offset, sys);
  CHECK(r.shape == ShapeClass::oscillatory_with_offset);
  CHECK(r.interior_zeros == 0);
  CHECK(r.interior_minima > 0);
}
