#include <doctest.h>

#include <cmath>

#include "nhb/eigensystem.hpp"
#include "nhb/errors.hpp"
#include "nhb/susceptibility.hpp"
#include "oracles.hpp"

using namespace nhb;

namespace {

DopplerModel off() {
  DopplerModel d;
  d.enabled = false;
  return d;
}

std::vector<double> local_maxima(const ComplexSpectrum& s) {
  std::vector<double> at;
  for (std::size_t i = 1; i + 1 < s.values.size(); ++i) {
    const double a = std::abs(s.values[i - 1]), b = std::abs(s.values[i]),
                 c = std::abs(s.values[i + 1]);
    if (b > a && b > c) at.push_back(s.delta[i]);
  }
  return at;
}

}  // namespace

TEST_CASE("cleared d_EIT has the eigenvalues as zeros") {
  SystemParams sys;
  for (double w : {0.3, 0.8, 2.5})
    for (double d3 : {-1.0, 0.0, 0.7}) {
      FieldParams f;
      f.omega3 = w;
      f.delta3 = d3;
      const auto roots = oracle::companion_roots(d_eit_cleared_coefficients(sys, f));
      const EigenPair e = eigenvalues(sys, f);
      CHECK(oracle::match_error({e.delta_plus, e.delta_minus}, roots) < 1e-10);
      if (w != 0.8 || d3 != 0.0) {
        CHECK(std::abs(d_eit_reciprocal(e.delta_plus, sys, f)) > 1e8);
        CHECK(std::abs(1.0 / d_eit(e.delta_plus + 0.1, sys, f) -
                       d_eit_reciprocal(e.delta_plus + 0.1, sys, f)) < 1e-12);
      }
    }
}

TEST_CASE("double-dressed d_EIT reduces to d_EIT without E2") {
  SystemParams sys;
  FieldParams f;
  f.omega3 = 1.7;
  f.delta3 = 0.3;
  for (double x : {-3.0, -0.2, 0.0, 1.1, 4.0}) {
    const Complex a = d_eit(x, sys, f);
    const Complex b = d_eit_double(x, sys, f);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("chi1 without coupling is a Lorentzian of width 2 G41") {
  SystemParams sys;
  FieldParams f;
  f.omega3 = 0.0;
  const auto grid = uniform_grid(-10.0, 10.0, 2001);
  const auto s = chi1(grid, sys, f, off());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    CHECK(-s.values[i].imag() == doctest::Approx(1.0 / (x * x + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("chi3 strong coupling is double peaked at the dressed energies") {
  SystemParams sys;
  FieldParams f;
  f.omega3 = 10.0;
  const auto grid = default_delta_grid();
  const auto s = chi3(grid, sys, f, DopplerModel{});
  const auto peaks = local_maxima(s);
  REQUIRE(peaks.size() == 2);
  const EigenPair e = eigenvalues(sys, f);
  CHECK(peaks[0] == doctest::Approx(e.delta_minus.real()).epsilon(0.02));
  CHECK(peaks[1] == doctest::Approx(e.delta_plus.real()).epsilon(0.02));
}

TEST_CASE("imaginary basis shows the two linewidths in the weak regime") {
  SystemParams sys;
  FieldParams f;
  f.omega3 = 0.4;
  SpectrumRequest req;
  req.grid = uniform_grid(0.0, 2.0, 2000);
  req.fields = f;
  req.doppler = off();
  const auto s = to_imaginary_basis(req);
  CHECK(s.axis == Axis::imaginary_delta);
  const auto peaks = local_maxima(s);
  REQUIRE(peaks.size() == 2);
  const EigenPair e = eigenvalues(sys, f);
  CHECK(peaks[0] == doctest::Approx(e.gamma_e_minus).epsilon(2e-3));
  CHECK(peaks[1] == doctest::Approx(e.gamma_e_plus).epsilon(2e-3));
  const auto again = evaluate(req, Axis::imaginary_delta);
  CHECK(again.values == s.values);
}

TEST_CASE("disabled Doppler equals the v = 0 integrand bit for bit") {
  SystemParams sys;
  FieldParams f;
  f.omega3 = 1.3;
  f.delta3 = 0.2;
  const auto grid = uniform_grid(-5.0, 5.0, 101);
  const DopplerModel d = off();
  const NodeDetunings det = node_detunings(0.0, sys, f, d);
  CHECK(det.w_d == 1.0);
  const auto s3 = chi3(grid, sys, f, d);
  const auto s1 = chi1(grid, sys, f, d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(s3.values[i] == chi3_integrand(grid[i], sys, f, det));
    CHECK(s1.values[i] == chi1_integrand(grid[i], sys, f, det));
  }
}

TEST_CASE("Doppler average: serial and parallel agree bit for bit") {
  SystemParams sys;
  FieldParams f;
  f.omega3 = 2.0;
  DopplerModel d;
  d.shift_e1 = d.shift_e2 = d.shift_e3 = true;
  const auto grid = uniform_grid(-8.0, 8.0, 513);
  const auto a = chi3(grid, sys, f, d, {}, Axis::real_delta, Exec::serial);
  const auto b = chi3(grid, sys, f, d, {}, Axis::real_delta, Exec::parallel);
  CHECK(a.values == b.values);
  // per-field shifts move the line at thermal velocities
  const auto c = chi3(grid, sys, f, DopplerModel{}, {}, Axis::real_delta, Exec::serial);
  CHECK(a.values != c.values);
}

TEST_CASE("Doppler factor and node detunings") {
  SystemParams sys;
  FieldParams f;
  f.delta3 = 1.0;
  DopplerModel d;
  const double v = 300.0;
  const NodeDetunings plain = node_detunings(v, sys, f, d);
  CHECK(plain.w_d == doctest::Approx(1.0 + v / constants::speed_of_light).epsilon(1e-15));
  CHECK(plain.delta3 == f.delta3);
  d.shift_e3 = true;
  const NodeDetunings shifted = node_detunings(v, sys, f, d);
  const double omega3_internal =
      2.0 * constants::pi * constants::speed_of_light / f.wavelength3 / sys.rad_per_s();
  CHECK(shifted.delta3 ==
        doctest::Approx(f.delta3 - d.direction_e3 * v / constants::speed_of_light * omega3_internal));
}

TEST_CASE("susceptibility input errors") {
  SystemParams sys;
  FieldParams f;
  CHECK_THROWS_AS(chi3(std::vector<double>{}, sys, f, off()), InvalidParameter);
  CHECK_THROWS_AS(chi3(std::vector<double>{0.0, 0.0}, sys, f, off()), InvalidParameter);
  CHECK_THROWS_AS(chi3(std::vector<double>{0.0, 2e3}, sys, f, off()), InvalidParameter);
  ChiParams zero;
  zero.prefactor3 = 0.0;
  CHECK_THROWS_AS(chi3(std::vector<double>{0.0, 1.0}, sys, f, off(), zero), InvalidParameter);
  CHECK(uniform_grid(-1.0, 1.0, 3) == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(default_delta_grid().size() == 4096);
}
