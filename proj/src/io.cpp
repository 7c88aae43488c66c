#include "nhb/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nhb/errors.hpp"

namespace nhb::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    // from_chars rejects "inf"/"nan" spellings from some writers; fall back.
    if (s == "inf" || s == "-inf" || s == "nan") return std::stod(s);
    throw IoError("line " + std::to_string(line) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

struct Table {
  std::vector<std::string> comments;  // text after '#'
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& is, std::size_t min_columns) {
  Table t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      t.comments.push_back(trim(std::string_view(s).substr(1)));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(s, ',');
      if (t.header.size() < min_columns) throw IoError("CSV header has too few columns");
      continue;
    }
    const auto cells = split(s, ',');
    if (cells.size() != t.header.size())
      throw IoError("line " + std::to_string(n) + ": expected " +
                    std::to_string(t.header.size()) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, n));
    t.rows.push_back(std::move(row));
  }
  if (is.bad()) throw IoError("read failed");
  if (t.header.empty()) throw IoError("CSV has no header");
  return t;
}

void expect_header(const Table& t, const std::vector<std::string>& want) {
  if (t.header != want) {
    std::string h;
    for (const auto& c : want) h += (h.empty() ? "" : ",") + c;
    throw IoError("expected CSV header '" + h + "'");
  }
}

// "a=1, b=2" -> pairs
KeyValues parse_meta(const std::string& comment) {
  KeyValues kv;
  for (const auto& part : split(comment, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) continue;
    kv.emplace_back(trim(part.substr(0, eq)), trim(part.substr(eq + 1)));
  }
  return kv;
}

}  // namespace

std::string format_number(double x) {
  if (std::abs(x) < 1e-300) x = 0.0;  // no signed zeros or denormals in output
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "omega3,delta3,re_dplus,im_dplus,re_dminus,im_dminus\n";
  for (const auto& r : rows)
    os << format_number(r.omega3) << ',' << format_number(r.delta3) << ','
       << format_number(r.plus.real()) << ',' << format_number(r.plus.imag()) << ','
       << format_number(r.minus.real()) << ',' << format_number(r.minus.imag()) << '\n';
}

std::vector<SweepRow> read_sweep(std::istream& is) {
  const Table t = read_table(is, 6);
  expect_header(t, {"omega3", "delta3", "re_dplus", "im_dplus", "re_dminus", "im_dminus"});
  std::vector<SweepRow> out;
  for (const auto& r : t.rows)
    out.push_back({r[0], r[1], Complex(r[2], r[3]), Complex(r[4], r[5])});
  return out;
}

void write_surface(std::ostream& os, const std::vector<SurfaceRow>& rows) {
  os << "omega2,omega3,re_r1,im_r1,re_r2,im_r2,re_r3,im_r3\n";
  for (const auto& r : rows) {
    os << format_number(r.omega2) << ',' << format_number(r.omega3);
    for (const auto& z : r.roots) os << ',' << format_number(z.real()) << ',' << format_number(z.imag());
    os << '\n';
  }
}

std::vector<SurfaceRow> read_surface(std::istream& is) {
  const Table t = read_table(is, 8);
  expect_header(t, {"omega2", "omega3", "re_r1", "im_r1", "re_r2", "im_r2", "re_r3", "im_r3"});
  std::vector<SurfaceRow> out;
  for (const auto& r : t.rows)
    out.push_back({r[0], r[1], {Complex(r[2], r[3]), Complex(r[4], r[5]), Complex(r[6], r[7])}});
  return out;
}

void write_spectrum(std::ostream& os, const ComplexSpectrum& s) {
  os << (s.axis == Axis::imaginary_delta ? "delta_im" : "delta") << ",re,im\n";
  for (std::size_t i = 0; i < s.delta.size(); ++i)
    os << format_number(s.delta[i]) << ',' << format_number(s.values[i].real()) << ','
       << format_number(s.values[i].imag()) << '\n';
}

ComplexSpectrum read_spectrum(std::istream& is) {
  const Table t = read_table(is, 3);
  ComplexSpectrum s;
  if (t.header == std::vector<std::string>{"delta_im", "re", "im"})
    s.axis = Axis::imaginary_delta;
  else
    expect_header(t, {"delta", "re", "im"});
  for (const auto& r : t.rows) {
    s.delta.push_back(r[0]);
    s.values.emplace_back(r[1], r[2]);
  }
  return s;
}

void write_waveform(std::ostream& os, const CorrelationWaveform& w, const SystemParams& sys) {
  os << "# method=" << to_string(w.method);
  for (const auto& [k, v] : w.meta) os << ", " << k << '=' << format_number(v);
  os << "\ntau_ns,g2\n";
  for (std::size_t i = 0; i < w.tau.size(); ++i)
    os << format_number(sys.to_ns(w.tau[i])) << ',' << format_number(w.g2[i]) << '\n';
}

CorrelationWaveform read_waveform(std::istream& is, const SystemParams& sys) {
  const Table t = read_table(is, 2);
  expect_header(t, {"tau_ns", "g2"});
  CorrelationWaveform w;
  for (const auto& c : t.comments)
    for (const auto& [k, v] : parse_meta(c)) {
      if (k == "method")
        w.method = waveform_method_from_string(v);
      else
        w.meta.emplace_back(k, parse_double(v, 0));
    }
  for (const auto& r : t.rows) {
    w.tau.push_back(sys.from_ns(r[0]));
    w.g2.push_back(r[1]);
  }
  return w;
}

void write_histogram(std::ostream& os, const CoincidenceHistogram& h) {
  os << "# bin_width=" << format_number(h.bin_width) << ", duration=" << format_number(h.duration)
     << ", background_rate=" << format_number(h.background_rate) << ", seed=" << h.seed << '\n';
  os << "tau_ns,counts\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    os << format_number(h.tau_ns[i]) << ',' << h.counts[i] << '\n';
}

CoincidenceHistogram read_histogram(std::istream& is) {
  const Table t = read_table(is, 2);
  expect_header(t, {"tau_ns", "counts"});
  if (t.rows.empty()) throw IoError("histogram has no rows");
  CoincidenceHistogram h;
  bool have_bin = false;
  for (const auto& c : t.comments)
    for (const auto& [k, v] : parse_meta(c)) {
      if (k == "bin_width") {
        h.bin_width = parse_double(v, 0);
        have_bin = true;
      } else if (k == "duration") {
        h.duration = parse_double(v, 0);
      } else if (k == "background_rate") {
        h.background_rate = parse_double(v, 0);
      } else if (k == "seed") {
        h.seed = std::stoull(v);
      }
    }
  for (const auto& r : t.rows) {
    if (r[1] < 0.0 || r[1] != std::floor(r[1])) throw IoError("counts must be non-negative integers");
    h.tau_ns.push_back(r[0]);
    h.counts.push_back(static_cast<std::int64_t>(r[1]));
  }
  if (!have_bin && h.tau_ns.size() > 1)
    h.bin_width = (h.tau_ns.back() - h.tau_ns.front()) / static_cast<double>(h.tau_ns.size() - 1);
  return h;
}

void write_report(std::ostream& os, const KeyValues& kv) {
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
}

KeyValues read_report(std::istream& is) {
  KeyValues kv;
  std::string line;
  while (std::getline(is, line)) {
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw IoError("report line without '=': " + s);
    kv.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return kv;
}

KeyValues fit_report(const FitResult& fit) {
  KeyValues kv;
  kv.emplace_back("model", std::string(to_string(fit.model)));
  kv.emplace_back("converged", fit.converged ? "true" : "false");
  kv.emplace_back("ambiguous", fit.ambiguous ? "true" : "false");
  kv.emplace_back("chi2", format_number(fit.chi2));
  kv.emplace_back("aicc", format_number(fit.aicc));
  kv.emplace_back("n_points", std::to_string(fit.n_points));
  for (const auto& p : fit.parameters) {
    kv.emplace_back(p.name, format_number(p.value));
    kv.emplace_back(p.name + "_err", format_number(p.uncertainty));
  }
  kv.emplace_back("gamma_eff", format_number(fit.gamma_eff));
  kv.emplace_back("gamma_eff_err", format_number(fit.gamma_eff_err));
  kv.emplace_back("splitting", format_number(fit.splitting));
  kv.emplace_back("splitting_err", format_number(fit.splitting_err));
  kv.emplace_back("re_dplus", format_number(fit.eigen.delta_plus.real()));
  kv.emplace_back("im_dplus", format_number(fit.eigen.delta_plus.imag()));
  kv.emplace_back("re_dminus", format_number(fit.eigen.delta_minus.real()));
  kv.emplace_back("im_dminus", format_number(fit.eigen.delta_minus.imag()));
  for (const auto& s : fit.scores)
    kv.emplace_back("aicc_" + std::string(to_string(s.model)), format_number(s.aicc));
  return kv;
}

KeyValues csr_report(const CsrReport& csr) {
  return {{"g2_cross_peak", format_number(csr.g2_cross_peak)},
          {"g2_ss0", format_number(csr.g2_ss0)},
          {"g2_asas0", format_number(csr.g2_asas0)},
          {"r2", format_number(csr.r2)},
          {"uncertainty", format_number(csr.uncertainty)},
          {"violated", csr.violated ? "true" : "false"}};
}

void write_fit_curve(std::ostream& os, const FitResult& fit, const std::vector<double>& data) {
  if (data.size() != fit.tau_ns.size()) throw InvalidParameter("fit overlay length mismatch");
  os << "tau_ns,data,model\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    os << format_number(fit.tau_ns[i]) << ',' << format_number(data[i]) << ','
       << format_number(fit.curve[i]) << '\n';
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return ss.str();
}

}  // namespace nhb::io
