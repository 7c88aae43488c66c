#include <doctest.h>

#include <cmath>

#include "nhb/counting.hpp"
#include "nhb/errors.hpp"

using namespace nhb;

namespace {
CorrelationWaveform linear(const SystemParams& sys, double slope) {
  CorrelationWaveform w;
  w.tau = uniform_grid(0.0, sys.from_ns(100.0), 11);
  for (double t : w.tau) w.g2.push_back(slope * sys.to_ns(t));
  return w;
}
}  // namespace

TEST_CASE("expected counts") {
  SystemParams sys;
  CountingOptions opts;
  // bin average of a linear waveform is its value at the bin centre
  const auto w = linear(sys, 0.5);
  const auto m = expected_counts(w, sys, 2.0, 3.0, 600.0, 1.0, opts);
  REQUIRE(m.size() == 100);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double centre = k + 0.5;
    CHECK(m[k] == doctest::Approx((0.5 * centre + 6.0) * 600.0 * 1.0 * 0.28).epsilon(1e-9));
  }
  CHECK_THROWS_AS(expected_counts(w, sys, 1, 1, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(expected_counts(w, sys, 1, 1, 1.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(expected_counts(w, sys, 1, 1, 1.0, 1000.0), InvalidParameter);
  CHECK_THROWS_AS(expected_counts(w, sys, 1e12, 1e12, 600.0, 1.0), InvalidParameter);
}

TEST_CASE("histogram reproducibility") {
  SystemParams sys;
  const auto w = linear(sys, 0.2);
  const auto a = simulate_histogram(w, sys, 1.0, 1.0, 600.0, 0.2, 7, {}, Exec::serial);
  const auto b = simulate_histogram(w, sys, 1.0, 1.0, 600.0, 0.2, 7, {}, Exec::parallel);
  const auto c = simulate_histogram(w, sys, 1.0, 1.0, 600.0, 0.2, 8, {}, Exec::parallel);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
  CHECK(a.tau_ns.front() == doctest::Approx(0.1));
  CHECK(a.tau_ns[1] - a.tau_ns[0] == doctest::Approx(0.2));
  CHECK(a.seed == 7);
  CHECK(a.background_rate == 1.0);
}

TEST_CASE("Poisson statistics") {
  const std::vector<double> means(20000, 3.5);
  const auto k = poisson_counts(means, 11);
  double m = 0.0, v = 0.0;
  for (auto x : k) m += x;
  m /= k.size();
  for (auto x : k) v += (x - m) * (x - m);
  v /= k.size() - 1;
  CHECK(std::abs(m - 3.5) < 4.0 * std::sqrt(3.5 / k.size()));
  CHECK(v / m == doctest::Approx(1.0).epsilon(0.05));
  CHECK(poisson_counts({0.0, 0.0}, 1) == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("normalization") {
  CoincidenceHistogram h;
  h.tau_ns = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  h.counts = {0, 50, 30, 20, 10, 10, 10, 10, 10, 10};
  const auto c = normalize_to_g2(h, 0.2);
  CHECK(c.scale == 10.0);
  CHECK(c.values[1] == 5.0);
  CHECK(cross_peak(c) == 5.0);
  CHECK_THROWS_AS(normalize_to_g2(h, 0.0), NormalizationError);
  CHECK_THROWS_AS(normalize_to_g2(h, 0.05), NormalizationError);
  h.counts = {1, 2, 3, 4, 5, 6, 7, 8, 0, 0};
  CHECK_THROWS_AS(normalize_to_g2(h, 0.2), NormalizationError);
  CHECK_THROWS_AS(cross_peak(NormalizedCurve{}), NormalizationError);
}

TEST_CASE("Cauchy-Schwarz factor") {
  const CsrReport r = cauchy_schwarz(19.3, 1.6, 2.0);
  CHECK(r.r2 == doctest::Approx(116.4).epsilon(1e-3));
  CHECK(r.violated);
  // first-order propagation: only the g_ss uncertainty by default
  CHECK(r.uncertainty == doctest::Approx(r.r2 * 0.2 / 1.6));
  const CsrReport s = cauchy_schwarz(1.5, 1.6, 2.0, {0.1, 0.0, 0.0});
  CHECK_FALSE(s.violated);
  CHECK(s.uncertainty == doctest::Approx(s.r2 * 2 * 0.1 / 1.5));
  CHECK_THROWS_AS(cauchy_schwarz(0.0), InvalidParameter);
}
