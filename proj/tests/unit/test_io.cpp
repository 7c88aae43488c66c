#include <doctest.h>

#include <sstream>

#include "nhb/errors.hpp"
#include "nhb/io.hpp"

using namespace nhb;

TEST_CASE("number formatting") {
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_number(-2e-7) == "-2e-07");
}

TEST_CASE("sweep and surface round trips") {
  std::vector<SweepRow> rows{{0.5, 0.0, Complex(1, 0.25), Complex(-1, 0.75)},
                             {0.6, -1.0, Complex(0.125, 0.5), Complex(0.5, 0.5)}};
  std::stringstream ss;
  io::write_sweep(ss, rows);
  const auto back = io::read_sweep(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].omega3 == 0.6);
  CHECK(back[1].delta3 == -1.0);
  CHECK(back[0].minus == Complex(-1, 0.75));

  std::vector<io::SurfaceRow> surf{{1.0, 2.0, {Complex(1, 2), Complex(3, 4), Complex(5, 6)}}};
  std::stringstream s2;
  io::write_surface(s2, surf);
  const auto sb = io::read_surface(s2);
  REQUIRE(sb.size() == 1);
  CHECK(sb[0].roots[2] == Complex(5, 6));
}

TEST_CASE("spectrum, waveform and histogram round trips") {
  ComplexSpectrum sp{{-1.0, 0.0, 1.0}, {Complex(1, 2), Complex(0, 0), Complex(-3, 0.5)},
                     Axis::imaginary_delta};
  std::stringstream s1;
  io::write_spectrum(s1, sp);
  CHECK(s1.str().rfind("delta_im,re,im", 0) == 0);
  const auto sb = io::read_spectrum(s1);
  CHECK(sb.axis == Axis::imaginary_delta);
  CHECK(sb.values == sp.values);

  SystemParams sys;
  const auto tau = uniform_grid(0.0, sys.from_ns(10.0), 11);
  const auto w = ep_limit(tau, 2.0, 0.5);
  std::stringstream s2;
  io::write_waveform(s2, w, sys);
  const auto wb = io::read_waveform(s2, sys);
  CHECK(wb.method == WaveformMethod::ep_limit);
  REQUIRE(wb.g2.size() == w.g2.size());
  for (std::size_t i = 0; i < w.g2.size(); ++i) {
    CHECK(wb.g2[i] == doctest::Approx(w.g2[i]).epsilon(1e-11));
    CHECK(wb.tau[i] == doctest::Approx(w.tau[i]).epsilon(1e-11));
  }
  CHECK(wb.meta_value("gamma_eff") == 0.5);

  CoincidenceHistogram h;
  h.bin_width = 0.5;
  h.tau_ns = {0.25, 0.75, 1.25};
  h.counts = {3, 0, 12};
  h.duration = 60.0;
  h.background_rate = 0.25;
  h.seed = 42;
  std::stringstream s3;
  io::write_histogram(s3, h);
  const auto hb = io::read_histogram(s3);
  CHECK(hb.counts == h.counts);
  CHECK(hb.tau_ns == h.tau_ns);
  CHECK(hb.bin_width == 0.5);
  CHECK(hb.seed == 42);
  CHECK(hb.duration == 60.0);

  // without the comment line the bin width comes from the centres
  std::stringstream s4("tau_ns,counts\n0.1,1\n0.3,2\n0.5,3\n");
  CHECK(io::read_histogram(s4).bin_width == doctest::Approx(0.2));
}

TEST_CASE("reports") {
  io::KeyValues kv{{"a", "1"}, {"b", "x y"}};
  std::stringstream ss;
  io::write_report(ss, kv);
  CHECK(io::read_report(ss) == kv);
  const auto csr = io::csr_report(cauchy_schwarz(19.3));
  bool seen = false;
  for (const auto& [k, v] : csr)
    if (k == "violated") seen = v == "true";
  CHECK(seen);
}

TEST_CASE("malformed input") {
  std::stringstream a("omega,delta\n1,2\n");
  CHECK_THROWS_AS(io::read_sweep(a), IoError);
  std::stringstream b("tau_ns,counts\n0.1,abc\n");
  CHECK_THROWS_AS(io::read_histogram(b), IoError);
  std::stringstream c("delta,re,im\n1,2\n");
  CHECK_THROWS_AS(io::read_spectrum(c), IoError);
  CHECK_THROWS_AS(io::read_file("/nonexistent/dir/file.csv"), IoError);
  CHECK_THROWS_AS(io::write_file("/nonexistent/dir/file.csv", "x"), IoError);
}
