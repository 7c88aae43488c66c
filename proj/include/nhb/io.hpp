#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nhb/counting.hpp"
#include "nhb/eigensystem.hpp"
#include "nhb/fitting.hpp"
#include "nhb/susceptibility.hpp"
#include "nhb/waveform.hpp"

namespace nhb::io {

/// 12 significant digits, shortest form.
std::string format_number(double x);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Header `omega3,delta3,re_dplus,im_dplus,re_dminus,im_dminus`.
void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep(std::istream& is);

struct SurfaceRow {
  double omega2 = 0.0;
  double omega3 = 0.0;
  std::array<Complex, 3> roots;
};

/// Double-dressing channel energies on an (omega2, omega3) grid.
void write_surface(std::ostream& os, const std::vector<SurfaceRow>& rows);
std::vector<SurfaceRow> read_surface(std::istream& is);

/// `delta,re,im`, or `delta_im,re,im` for the imaginary basis.
void write_spectrum(std::ostream& os, const ComplexSpectrum& spectrum);
ComplexSpectrum read_spectrum(std::istream& is);

/// `tau_ns,g2` after a `# method=..., key=value, ...` comment line.
void write_waveform(std::ostream& os, const CorrelationWaveform& waveform,
                    const SystemParams& sys);
CorrelationWaveform read_waveform(std::istream& is, const SystemParams& sys);

/// `tau_ns,counts`; bin width, duration, background and seed go in a comment line.
void write_histogram(std::ostream& os, const CoincidenceHistogram& hist);
CoincidenceHistogram read_histogram(std::istream& is);

/// One `key=value` per line.
void write_report(std::ostream& os, const KeyValues& kv);
KeyValues read_report(std::istream& is);

KeyValues fit_report(const FitResult& fit);
KeyValues csr_report(const CsrReport& csr);

/// `tau_ns,data,model`.
void write_fit_curve(std::ostream& os, const FitResult& fit, const std::vector<double>& data);

/// File helpers; IoError on open or write failure.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace nhb::io
