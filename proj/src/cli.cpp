#include "nhb/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nhb/config.hpp"
#include "nhb/counting.hpp"
#include "nhb/eigensystem.hpp"
#include "nhb/errors.hpp"
#include "nhb/fitting.hpp"
#include "nhb/io.hpp"
#include "nhb/propagation.hpp"
#include "nhb/susceptibility.hpp"
#include "nhb/version.hpp"
#include "nhb/waveform.hpp"

namespace nhb::cli {

namespace {

namespace fs = std::filesystem;

double number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

struct Options {
  std::string config;
  std::string out_dir;
  std::vector<std::string> sets;
  bool gnuplot = false;
  bool serial = false;
  std::string omega3, delta3, omega2, delta2;
};

// Shared state of one invocation.
struct Run {
  std::string subcommand;
  std::vector<std::string> args;
  Config cfg;
  Exec exec = Exec::parallel;
  fs::path dir;
  bool gnuplot = false;
  std::vector<std::string> written;
  std::ostream* out = nullptr;

  void emit(const std::string& name, const std::string& content) {
    io::write_file((dir / name).string(), content);
    written.push_back(name);
  }

  // Script-friendly plot companion for a CSV already written.
  void plot(const std::string& csv, const std::string& columns) {
    if (!gnuplot) return;
    const std::string stem = fs::path(csv).stem().string();
    std::ostringstream gp;
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "plot " << columns << '\n';
    std::string script = gp.str();
    for (std::size_t pos; (pos = script.find("@")) != std::string::npos;)
      script.replace(pos, 1, "'" + csv + "'");
    emit(stem + ".gp", script);
  }

  void meta() {
    std::ostringstream os;
    os << "tool=nhb\nversion=" << version << "\nsubcommand=" << subcommand << "\nargs=";
    for (std::size_t i = 0; i < args.size(); ++i) os << (i ? " " : "") << args[i];
    os << "\nexec=" << (exec == Exec::serial ? "serial" : "parallel") << '\n';
    for (const auto& [k, v] : resolved_values(cfg)) os << k << '=' << v << '\n';
    os << "outputs=";
    for (std::size_t i = 0; i < written.size(); ++i) os << (i ? "," : "") << written[i];
    os << '\n';
    io::write_file((dir / "run_meta.txt").string(), os.str());
  }

  std::vector<double> delta_grid() const {
    return uniform_grid(cfg.numerics.delta_min, cfg.numerics.delta_max,
                        static_cast<std::size_t>(cfg.numerics.delta_points));
  }

  // Non-negative tau grid in internal units.
  std::vector<double> tau_grid() const {
    const double hi = cfg.sys.from_ns(cfg.numerics.tau_max_ns);
    return uniform_grid(0.0, hi, static_cast<std::size_t>(cfg.numerics.tau_points));
  }

  ChiParams chi() const {
    ChiParams c;
    c.coupling_factor = cfg.numerics.coupling_factor;
    c.double_dressing = cfg.numerics.double_dressing;
    return c;
  }
};

void add_common(CLI::App* app, Options& o, bool field_flags = true) {
  app->add_option("--config", o.config, "INI configuration file");
  app->add_option("--out", o.out_dir,
                  std::string("Output directory (default $") + output_dir_env + " or .)");
  app->add_option("--set", o.sets, "Override as section.key=value")->take_all();
  app->add_flag("--gnuplot", o.gnuplot, "Also write a gnuplot script per CSV");
  app->add_flag("--serial", o.serial, "Use the serial reference kernels");
  if (field_flags) {
    app->add_option("--omega3", o.omega3, "Coupling Rabi frequency (Gamma41 units)");
    app->add_option("--delta3", o.delta3, "Coupling detuning (Gamma41 units)");
    app->add_option("--omega2", o.omega2, "Dressing Rabi frequency (Gamma41 units)");
    app->add_option("--delta2", o.delta2, "Dressing detuning (Gamma41 units)");
  }
}

Run prepare(const std::string& name, const std::vector<std::string>& args, const Options& o,
            bool scalar_fields, std::ostream& out) {
  Run r;
  r.subcommand = name;
  r.args = args;
  r.out = &out;
  r.cfg = o.config.empty() ? Config{} : load_config(o.config);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    set_value(r.cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (scalar_fields) {
    if (!o.omega3.empty()) set_value(r.cfg, "fields.omega3", o.omega3);
    if (!o.delta3.empty()) set_value(r.cfg, "fields.delta3", o.delta3);
    if (!o.omega2.empty()) set_value(r.cfg, "fields.omega2", o.omega2);
    if (!o.delta2.empty()) set_value(r.cfg, "fields.delta2", o.delta2);
  } else if (!o.delta2.empty()) {
    set_value(r.cfg, "fields.delta2", o.delta2);
  }
  r.cfg.validate();
  r.exec = o.serial ? Exec::serial : Exec::parallel;
#ifdef _OPENMP
  if (r.cfg.numerics.threads > 0) omp_set_num_threads(r.cfg.numerics.threads);
#endif
  std::string dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(output_dir_env);
    dir = (env && *env) ? env : ".";
  }
  r.dir = dir;
  std::error_code ec;
  fs::create_directories(r.dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  r.gnuplot = o.gnuplot;
  return r;
}

std::string kv_text(const io::KeyValues& kv) {
  std::ostringstream os;
  io::write_report(os, kv);
  return os.str();
}

double bandwidth_or_inf(const Config& c) {
  try {
    return bandwidth(c.sys, c.fields, c.numerics.group_velocity, c.numerics.coupling_factor).exact;
  } catch (const SingularParameter&) {
    return std::numeric_limits<double>::infinity();
  }
}

void cmd_eigen(Run& r, bool want_ep) {
  const auto& c = r.cfg;
  const EigenPair e = eigenvalues(c.sys, c.fields);
  const RegimeLabel label =
      classify_regime(c.sys, c.fields, bandwidth_or_inf(c), c.numerics.ep_tolerance);
  std::ostringstream csv;
  io::write_sweep(csv, {{c.fields.omega3, c.fields.delta3, e.delta_plus, e.delta_minus}});
  r.emit("eigen.csv", csv.str());

  io::KeyValues kv = {{"omega3", io::format_number(c.fields.omega3)},
                      {"delta3", io::format_number(c.fields.delta3)},
                      {"re_dplus", io::format_number(e.delta_plus.real())},
                      {"im_dplus", io::format_number(e.delta_plus.imag())},
                      {"re_dminus", io::format_number(e.delta_minus.real())},
                      {"im_dminus", io::format_number(e.delta_minus.imag())},
                      {"splitting", io::format_number(std::abs(e.omega_e))},
                      {"regime", std::string(to_string(label.regime))},
                      {"bandwidth", io::format_number(label.bandwidth)}};
  if (want_ep) kv.emplace_back("omega3_ep", io::format_number(find_ep(c.sys, c.fields.delta3, c.numerics.ep_tolerance)));
  r.emit("eigen.txt", kv_text(kv));
  *r.out << kv_text(kv);
}

void cmd_sweep(Run& r, const Options& o) {
  const auto& c = r.cfg;
  const std::vector<double> omega3 =
      o.omega3.empty() ? std::vector<double>{c.fields.omega3} : parse_range(o.omega3);
  if (!o.omega2.empty()) {
    const std::vector<double> omega2 = parse_range(o.omega2);
    if (!o.delta3.empty()) throw ConfigError("--delta3 takes a single value with --omega2");
    std::vector<io::SurfaceRow> rows(omega2.size() * omega3.size());
    for_each_index(r.exec, rows.size(), [&](std::size_t k) {
      FieldParams f = c.fields;
      f.omega2 = omega2[k / omega3.size()];
      f.omega3 = omega3[k % omega3.size()];
      rows[k] = {f.omega2, f.omega3, double_dressing_channels(c.sys, f, c.numerics.coupling_factor)};
    });
    std::ostringstream csv;
    io::write_surface(csv, rows);
    r.emit("surface.csv", csv.str());
    r.plot("surface.csv", "@ using 2:3 with points, @ using 2:5 with points, @ using 2:7 with points");
    *r.out << "rows=" << rows.size() << "\nfile=surface.csv\n";
    return;
  }
  SweepGrid grid{omega3, o.delta3.empty() ? std::vector<double>{c.fields.delta3}
                                          : parse_range(o.delta3)};
  const auto rows = sweep_eigenvalues(c.sys, c.fields, grid, r.exec);
  std::ostringstream csv;
  io::write_sweep(csv, rows);
  r.emit("sweep.csv", csv.str());
  r.plot("sweep.csv",
         "@ using 1:3 with lines, @ using 1:5 with lines, @ using 1:4 with lines, @ using 1:6 with lines");
  *r.out << "rows=" << rows.size() << "\nfile=sweep.csv\n";
}

void cmd_spectra(Run& r, int which, const std::string& axis) {
  const auto& c = r.cfg;
  SpectrumRequest req;
  req.which = which == 1 ? Susceptibility::chi1 : Susceptibility::chi3;
  req.grid = r.delta_grid();
  req.sys = c.sys;
  req.fields = c.fields;
  req.doppler = c.doppler;
  req.chi = r.chi();
  const Axis ax = axis == "imaginary" ? Axis::imaginary_delta : Axis::real_delta;
  const ComplexSpectrum s = evaluate(req, ax, r.exec);
  const std::string name = which == 1 ? "chi1.csv" : "chi3.csv";
  std::ostringstream csv;
  io::write_spectrum(csv, s);
  r.emit(name, csv.str());
  r.plot(name, "@ using 1:(sqrt($2**2+$3**2)) with lines title '|chi|', @ using 1:2 with lines, @ using 1:3 with lines");
  *r.out << "points=" << s.delta.size() << "\nfile=" << name << '\n';
}

// Closed form chosen from the eigenvalue structure when no method is given.
WaveformMethod auto_method(const Config& c) {
  const EigenPair e = eigenvalues(c.sys, c.fields);
  const double tol = c.numerics.ep_tolerance;
  if (std::abs(e.omega_e) < tol) return WaveformMethod::ep_limit;
  if (std::abs(e.omega_e.imag()) <= tol * std::max(1.0, std::abs(e.omega_e)))
    return WaveformMethod::eq3;
  return WaveformMethod::eq4;
}

CorrelationWaveform build_waveform(const Run& r, WaveformMethod method) {
  const auto& c = r.cfg;
  const auto tau = r.tau_grid();
  const double w1 = c.numerics.w1;
  const EigenPair e = eigenvalues(c.sys, c.fields);
  const double gamma_eff = 0.5 * (e.delta_plus.imag() + e.delta_minus.imag());
  switch (method) {
    case WaveformMethod::eq3:
      return g2_eq3(tau, w1, gamma_eff, e.omega_e);
    case WaveformMethod::eq4:
    case WaveformMethod::eq4_verbatim:
      return g2_eq4(tau, w1, gamma_eff, std::abs(e.omega_e), 1.0,
                    method == WaveformMethod::eq4_verbatim);
    case WaveformMethod::ep_limit:
      return ep_limit(tau, w1, gamma_eff);
    case WaveformMethod::s34_group_delay: {
      const PhaseMatching pm =
          phase_matching(c.sys, c.fields, {c.numerics.group_velocity, c.numerics.coupling_factor});
      // kappa0 = 1 / v_g puts the onset value at w1.
      return g2_group_delay(tau, 1.0 / pm.v_g, pm.v_g, pm.alpha, 1.0, w1, 1.0 / c.sys.rad_per_s());
    }
    case WaveformMethod::numeric_transform: {
      const auto grid = r.delta_grid();
      const ComplexSpectrum x3 = chi3(grid, c.sys, c.fields, c.doppler, r.chi(),
                                      Axis::real_delta, r.exec);
      const KappaSpectrum kappa = kappa_from_chi3(x3, c.sys, c.fields);
      PhaseMatchingOptions po;
      po.form = c.numerics.group_velocity;
      po.coupling_factor = c.numerics.coupling_factor;
      po.bypass = !c.numerics.phase_matching;
      const PhaseMatching pm = phase_matching(c.sys, c.fields, po);
      SynthesisOptions so;
      so.length_scale = c.sys.cell_length;
      so.taper_fraction = c.numerics.taper_fraction;
      CorrelationWaveform w = synthesize_numeric(kappa, phi(grid, pm, r.exec), tau, so, r.exec);
      // Absolute scale is arbitrary; rescale so that the peak equals w1.
      const double peak = *std::max_element(w.g2.begin(), w.g2.end());
      if (!(peak > 0.0)) throw NumericalError("numeric transform produced an empty waveform");
      for (double& g : w.g2) g *= w1 / peak;
      w.meta.emplace_back("scale", w1 / peak);
      return w;
    }
  }
  throw InvalidParameter("unhandled waveform method");
}

WaveformMethod method_from(const std::string& name, const Config& c) {
  if (name.empty() || name == "auto") return auto_method(c);
  return waveform_method_from_string(name);
}

void cmd_waveform(Run& r, const std::string& method_name) {
  const WaveformMethod m = method_from(method_name, r.cfg);
  CorrelationWaveform w = build_waveform(r, m);
  w.meta.emplace_back("omega3", r.cfg.fields.omega3);
  w.meta.emplace_back("delta3", r.cfg.fields.delta3);
  std::ostringstream csv;
  io::write_waveform(csv, w, r.cfg.sys);
  r.emit("waveform.csv", csv.str());
  r.plot("waveform.csv", "@ using 1:2 with lines");
  *r.out << "method=" << to_string(m) << "\npoints=" << w.tau.size() << "\nfile=waveform.csv\n";
}

CoincidenceHistogram read_histogram_file(const std::string& path) {
  std::istringstream is(io::read_file(path));
  return io::read_histogram(is);
}

void cmd_counts(Run& r, std::uint64_t seed, const std::string& in, const std::string& method_name) {
  const auto& c = r.cfg;
  CorrelationWaveform w;
  if (!in.empty()) {
    std::istringstream is(io::read_file(in));
    w = io::read_waveform(is, c.sys);
  } else {
    w = build_waveform(r, method_from(method_name, c));
  }
  const CoincidenceHistogram h =
      simulate_histogram(w, c.sys, c.numerics.rate_s, c.numerics.rate_as, c.numerics.duration,
                         c.numerics.bin_width, seed, c.counting(), r.exec);
  std::ostringstream csv;
  io::write_histogram(csv, h);
  r.emit("counts.csv", csv.str());
  r.plot("counts.csv", "@ using 1:2 with steps");
  std::int64_t total = 0;
  for (auto k : h.counts) total += k;
  *r.out << "bins=" << h.counts.size() << "\ntotal=" << total << "\nfile=counts.csv\n";
}

void cmd_fit(Run& r, const std::string& in, const std::vector<std::string>& models) {
  const CoincidenceHistogram h = read_histogram_file(in);
  FitOptions fo;
  fo.mask_after_onset = r.cfg.numerics.mask_after_onset;
  if (!models.empty()) {
    fo.models.clear();
    for (const auto& m : models) fo.models.push_back(fit_model_from_string(m));
  }
  const FitResult fit = fit_waveform(h, r.cfg.sys, fo);
  const std::string report = kv_text(io::fit_report(fit));
  r.emit("fit.txt", report);
  std::vector<double> data(h.counts.begin(), h.counts.end());
  std::ostringstream csv;
  io::write_fit_curve(csv, fit, data);
  r.emit("fit_curve.csv", csv.str());
  r.plot("fit_curve.csv", "@ using 1:2 with points, @ using 1:3 with lines");
  *r.out << report;
}

void cmd_csr(Run& r, const std::string& in, std::optional<double> peak, double gss, double gasas,
             const CsrUncertainty& sigma, double fraction) {
  double p = 0.0;
  if (peak) {
    p = *peak;
  } else {
    if (in.empty()) throw ConfigError("csr needs --in or --peak");
    p = cross_peak(normalize_to_g2(read_histogram_file(in), fraction));
  }
  const CsrReport rep = cauchy_schwarz(p, gss, gasas, sigma);
  const std::string text = kv_text(io::csr_report(rep));
  r.emit("csr.txt", text);
  *r.out << text;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() == 1) return {number(parts[0], "range")};
  if (parts.size() > 3) throw ConfigError("range '" + text + "' must be start:stop[:step]");
  const double lo = number(parts[0], "range start");
  const double hi = number(parts[1], "range stop");
  const double step = parts.size() == 3 ? number(parts[2], "range step") : 0.1;
  if (!(step > 0.0)) throw ConfigError("range step must be positive");
  if (hi < lo) throw ConfigError("range stop must not be below start");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (n > 10'000'000) throw ConfigError("range '" + text + "' has too many points");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-Hermitian biphoton toolkit: eigenvalues, spectra, waveforms, counts, fits"};
  app.name("nhb");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  Options o;
  bool want_ep = false;
  auto* eigen = app.add_subcommand("eigen", "Eigenvalues and regime at one setting");
  add_common(eigen, o);
  eigen->add_flag("--find-ep", want_ep, "Also locate the exceptional point");

  auto* sweep = app.add_subcommand("sweep", "Eigenvalue table over omega3/delta3, or omega2 x omega3 surface");
  add_common(sweep, o);

  int chi_order = 3;
  std::string axis = "real";
  auto* spectra = app.add_subcommand("spectra", "Susceptibility spectrum");
  add_common(spectra, o);
  spectra->add_option("--chi", chi_order, "1 or 3")->check(CLI::IsMember({1, 3}));
  spectra->add_option("--axis", axis, "real or imaginary")->check(CLI::IsMember({"real", "imaginary"}));

  std::string method;
  auto* waveform = app.add_subcommand("waveform", "Two-photon correlation waveform");
  add_common(waveform, o);
  waveform->add_option("--method", method,
                       "auto, eq3, eq4, eq4_verbatim, ep_limit, s34_group_delay, numeric_transform");

  std::uint64_t seed = 0;
  std::string in;
  std::optional<double> duration, bin;
  auto* counts = app.add_subcommand("counts", "Poisson coincidence histogram");
  add_common(counts, o);
  counts->add_option("--seed", seed, "Random seed")->required();
  counts->add_option("--duration", duration, "Integration time in s");
  counts->add_option("--bin", bin, "Bin width in ns");
  counts->add_option("--in", in, "Waveform CSV (default: generate with --method)");
  counts->add_option("--method", method, "Waveform method when --in is absent");

  std::vector<std::string> models;
  auto* fit = app.add_subcommand("fit", "Fit closed-form models to a histogram");
  add_common(fit, o, false);
  fit->add_option("--in", in, "Histogram CSV")->required();
  fit->add_option("--models", models, "Subset of eq3, eq4_canonical, s34_single_exp, ep_limit")
      ->delimiter(',');

  std::optional<double> peak;
  double gss = 1.6, gasas = 2.0, fraction = 0.2;
  CsrUncertainty sigma;
  auto* csr = app.add_subcommand("csr", "Cauchy-Schwarz factor");
  add_common(csr, o, false);
  csr->add_option("--in", in, "Histogram CSV; its normalized peak is used");
  csr->add_option("--peak", peak, "Cross-correlation peak, instead of --in");
  csr->add_option("--gss", gss, "Signal auto-correlation at zero delay");
  csr->add_option("--gasas", gasas, "Anti-Stokes auto-correlation at zero delay");
  csr->add_option("--sigma-peak", sigma.cross_peak, "Uncertainty of the peak");
  csr->add_option("--sigma-gss", sigma.g2_ss0, "Uncertainty of g_ss");
  csr->add_option("--sigma-gasas", sigma.g2_asas0, "Uncertainty of g_asas");
  csr->add_option("--background-fraction", fraction, "Trailing fraction used for normalization");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Run r = prepare(name, args, o, name != "sweep", out);
    if (name == "eigen") {
      cmd_eigen(r, want_ep);
    } else if (name == "sweep") {
      cmd_sweep(r, o);
    } else if (name == "spectra") {
      cmd_spectra(r, chi_order, axis);
    } else if (name == "waveform") {
      cmd_waveform(r, method);
    } else if (name == "counts") {
      if (duration) set_value(r.cfg, "numerics.duration", io::format_number(*duration));
      if (bin) set_value(r.cfg, "numerics.bin_width", io::format_number(*bin));
      r.cfg.validate();
      cmd_counts(r, seed, in, method);
    } else if (name == "fit") {
      cmd_fit(r, in, models);
    } else if (name == "csr") {
      cmd_csr(r, in, peak, gss, gasas, sigma, fraction);
    }
    r.meta();
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const WrongRegime& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const SingularParameter& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const InvalidParameter& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return exit_config;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numeric;
  }
}

}  // namespace nhb::cli
