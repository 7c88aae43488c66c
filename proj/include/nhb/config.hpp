#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nhb/counting.hpp"
#include "nhb/params.hpp"
#include "nhb/propagation.hpp"

namespace nhb {

/// Grid sizes, counting and fitting knobs. Detunings in internal units,
/// times in ns.
struct Numerics {
  double coupling_factor = 0.25;
  double ep_tolerance = 1e-6;
  double delta_min = -20.0;
  double delta_max = 20.0;
  int delta_points = 4096;
  double tau_max_ns = 100.0;
  int tau_points = 2001;
  double taper_fraction = 0.05;
  GroupVelocityForm group_velocity = GroupVelocityForm::printed;
  bool phase_matching = true;
  bool double_dressing = false;
  double w1 = 20.0;      // G2 amplitude, counts per s per ns of delay
  double rate_s = 1.0;   // R_S R_AS is the flat background in the same units
  double rate_as = 1.0;
  double duration = 600.0;  // s
  double bin_width = 0.2;   // ns
  double fiber_efficiency = 0.7;
  double detector_efficiency = 0.4;
  int mask_after_onset = 0;
  double p_ref_mw = 1.0;
  double omega_ref = 0.8;
  int threads = 0;  // 0: OpenMP default
};

struct Config {
  SystemParams sys;
  FieldParams fields;
  DopplerModel doppler;
  Numerics numerics;

  /// Throws ConfigError naming the first invalid value.
  void validate() const;
  CountingOptions counting() const;
  RabiCalibration calibration() const;
};

/// Parses an INI file with sections [atom], [fields], [doppler], [numerics]
/// on top of the defaults. Unknown sections or keys raise ConfigError naming
/// the key; unreadable files raise IoError.
Config load_config(const std::string& path);
Config parse_config(const std::string& text, Config base = {});

/// Sets `section.key` from its text form.
void set_value(Config& config, const std::string& dotted_key, const std::string& value);

/// Every key with its resolved value, in a fixed order.
std::vector<std::pair<std::string, std::string>> resolved_values(const Config& config);

}  // namespace nhb
