#include "nhb/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nhb/errors.hpp"
#include "nhb/io.hpp"

namespace nhb {

namespace {

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("key '" + key + "': '" + text + "' is not a boolean");
}

// "re", "re,im" or "(re,im)".
Complex to_complex(const std::string& key, std::string text) {
  if (!text.empty() && text.front() == '(' && text.back() == ')')
    text = text.substr(1, text.size() - 2);
  const auto comma = text.find(',');
  if (comma == std::string::npos) return to_double(key, text);
  auto part = [&](std::string s) {
    const auto b = s.find_first_not_of(' ');
    const auto e = s.find_last_not_of(' ');
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  return {to_double(key, part(text.substr(0, comma))), to_double(key, part(text.substr(comma + 1)))};
}

std::string from_bool(bool b) { return b ? "true" : "false"; }
std::string from_complex(Complex z) {
  return io::format_number(z.real()) + "," + io::format_number(z.imag());
}

struct Key {
  std::string name;  // section.key
  std::function<void(Config&, const std::string&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

#define NHB_DOUBLE(section, member, field)                                                   \
  Key {                                                                                      \
    #section "." #field,                                                                     \
        [](Config& c, const std::string& k, const std::string& v) { c.member.field = to_double(k, v); }, \
        [](const Config& c) { return io::format_number(c.member.field); }                    \
  }
#define NHB_INT(section, member, field)                                                      \
  Key {                                                                                      \
    #section "." #field,                                                                     \
        [](Config& c, const std::string& k, const std::string& v) { c.member.field = to_int(k, v); }, \
        [](const Config& c) { return std::to_string(c.member.field); }                       \
  }
#define NHB_BOOL(section, member, field)                                                     \
  Key {                                                                                      \
    #section "." #field,                                                                     \
        [](Config& c, const std::string& k, const std::string& v) { c.member.field = to_bool(k, v); }, \
        [](const Config& c) { return from_bool(c.member.field); }                            \
  }
#define NHB_COMPLEX(section, member, field)                                                  \
  Key {                                                                                      \
    #section "." #field,                                                                     \
        [](Config& c, const std::string& k, const std::string& v) { c.member.field = to_complex(k, v); }, \
        [](const Config& c) { return from_complex(c.member.field); }                         \
  }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      NHB_DOUBLE(atom, sys, gamma41),
      NHB_DOUBLE(atom, sys, gamma21_ratio),
      NHB_DOUBLE(atom, sys, gamma31_ratio),
      NHB_DOUBLE(atom, sys, gamma11_ratio),
      NHB_DOUBLE(atom, sys, gamma41_mhz),
      NHB_DOUBLE(atom, sys, od),
      NHB_DOUBLE(atom, sys, cell_length),
      NHB_DOUBLE(atom, sys, temperature),
      NHB_DOUBLE(atom, sys, atomic_mass),
      NHB_DOUBLE(atom, sys, atomic_density),
      NHB_DOUBLE(atom, sys, wavelength14),
      Key{"atom.dipole14",
          [](Config& c, const std::string& k, const std::string& v) {
            if (v == "none" || v.empty())
              c.sys.dipole14.reset();
            else
              c.sys.dipole14 = to_double(k, v);
          },
          [](const Config& c) {
            return c.sys.dipole14 ? io::format_number(*c.sys.dipole14) : std::string("none");
          }},
      NHB_DOUBLE(fields, fields, omega3),
      NHB_DOUBLE(fields, fields, delta3),
      NHB_DOUBLE(fields, fields, omega2),
      NHB_DOUBLE(fields, fields, delta2),
      NHB_DOUBLE(fields, fields, delta1),
      NHB_COMPLEX(fields, fields, d2_const),
      NHB_COMPLEX(fields, fields, c2_const),
      NHB_DOUBLE(fields, fields, e1_amp),
      NHB_DOUBLE(fields, fields, e2_amp),
      NHB_DOUBLE(fields, fields, wavelength1),
      NHB_DOUBLE(fields, fields, wavelength2),
      NHB_DOUBLE(fields, fields, wavelength3),
      NHB_BOOL(doppler, doppler, enabled),
      NHB_INT(doppler, doppler, n_nodes),
      NHB_BOOL(doppler, doppler, shift_e1),
      NHB_BOOL(doppler, doppler, shift_e2),
      NHB_BOOL(doppler, doppler, shift_e3),
      NHB_INT(doppler, doppler, direction_e1),
      NHB_INT(doppler, doppler, direction_e2),
      NHB_INT(doppler, doppler, direction_e3),
      NHB_DOUBLE(numerics, numerics, coupling_factor),
      NHB_DOUBLE(numerics, numerics, ep_tolerance),
      NHB_DOUBLE(numerics, numerics, delta_min),
      NHB_DOUBLE(numerics, numerics, delta_max),
      NHB_INT(numerics, numerics, delta_points),
      NHB_DOUBLE(numerics, numerics, tau_max_ns),
      NHB_INT(numerics, numerics, tau_points),
      NHB_DOUBLE(numerics, numerics, taper_fraction),
      Key{"numerics.group_velocity",
          [](Config& c, const std::string& k, const std::string& v) {
            if (v == "printed")
              c.numerics.group_velocity = GroupVelocityForm::printed;
            else if (v == "dispersion")
              c.numerics.group_velocity = GroupVelocityForm::dispersion;
            else
              throw ConfigError("key '" + k + "': expected printed or dispersion");
          },
          [](const Config& c) {
            return std::string(c.numerics.group_velocity == GroupVelocityForm::printed
                                   ? "printed"
                                   : "dispersion");
          }},
      NHB_BOOL(numerics, numerics, phase_matching),
      NHB_BOOL(numerics, numerics, double_dressing),
      NHB_DOUBLE(numerics, numerics, w1),
      NHB_DOUBLE(numerics, numerics, rate_s),
      NHB_DOUBLE(numerics, numerics, rate_as),
      NHB_DOUBLE(numerics, numerics, duration),
      NHB_DOUBLE(numerics, numerics, bin_width),
      NHB_DOUBLE(numerics, numerics, fiber_efficiency),
      NHB_DOUBLE(numerics, numerics, detector_efficiency),
      NHB_INT(numerics, numerics, mask_after_onset),
      NHB_DOUBLE(numerics, numerics, p_ref_mw),
      NHB_DOUBLE(numerics, numerics, omega_ref),
      NHB_INT(numerics, numerics, threads),
  };
  return keys;
}

#undef NHB_DOUBLE
#undef NHB_INT
#undef NHB_BOOL
#undef NHB_COMPLEX

}  // namespace

void Config::validate() const {
  try {
    sys.validate();
    fields.validate();
    doppler.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  const auto& n = numerics;
  if (!(n.coupling_factor > 0.0)) throw ConfigError("numerics.coupling_factor must be positive");
  if (!(n.ep_tolerance > 0.0)) throw ConfigError("numerics.ep_tolerance must be positive");
  if (!(n.delta_max > n.delta_min)) throw ConfigError("numerics.delta_max must exceed delta_min");
  if (n.delta_points < 2) throw ConfigError("numerics.delta_points must be >= 2");
  if (!(n.tau_max_ns > 0.0)) throw ConfigError("numerics.tau_max_ns must be positive");
  if (n.tau_points < 2) throw ConfigError("numerics.tau_points must be >= 2");
  if (!(n.taper_fraction >= 0.0 && n.taper_fraction < 0.5))
    throw ConfigError("numerics.taper_fraction must be in [0, 0.5)");
  if (!(n.w1 >= 0.0)) throw ConfigError("numerics.w1 must be non-negative");
  if (!(n.rate_s >= 0.0) || !(n.rate_as >= 0.0))
    throw ConfigError("numerics.rate_s and rate_as must be non-negative");
  if (!(n.duration > 0.0)) throw ConfigError("numerics.duration must be positive");
  if (!(n.bin_width > 0.0)) throw ConfigError("numerics.bin_width must be positive");
  if (!(n.fiber_efficiency > 0.0 && n.fiber_efficiency <= 1.0) ||
      !(n.detector_efficiency > 0.0 && n.detector_efficiency <= 1.0))
    throw ConfigError("numerics efficiencies must be in (0, 1]");
  if (n.mask_after_onset < 0) throw ConfigError("numerics.mask_after_onset must be >= 0");
  if (!(n.p_ref_mw > 0.0)) throw ConfigError("numerics.p_ref_mw must be positive");
  if (!(n.omega_ref >= 0.0)) throw ConfigError("numerics.omega_ref must be non-negative");
  if (n.threads < 0) throw ConfigError("numerics.threads must be >= 0");
}

CountingOptions Config::counting() const {
  CountingOptions o;
  o.fiber_efficiency = numerics.fiber_efficiency;
  o.detector_efficiency = numerics.detector_efficiency;
  return o;
}

RabiCalibration Config::calibration() const { return {numerics.p_ref_mw, numerics.omega_ref}; }

void set_value(Config& config, const std::string& dotted_key, const std::string& value) {
  for (const auto& k : registry())
    if (k.name == dotted_key) {
      k.set(config, dotted_key, value);
      return;
    }
  throw ConfigError("unknown config key '" + dotted_key + "'");
}

Config parse_config(const std::string& text, Config base) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' is outside any section");
    for (const auto& [key, leaf] : body) set_value(base, section + "." + key, leaf.data());
  }
  return base;
}

Config load_config(const std::string& path) { return parse_config(io::read_file(path)); }

std::vector<std::pair<std::string, std::string>> resolved_values(const Config& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : registry()) out.emplace_back(k.name, k.get(config));
  return out;
}

}  // namespace nhb
