#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vlcsec/rates.hpp"
#include "vlcsec/sca.hpp"

namespace vlcsec {

// Malformed or out-of-range configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scheme incompatible with the classified channel case; maps to exit code 3.
struct CaseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Scenario {
  Matrix Hb, He;
  std::vector<double> snr_db;       // SNR_dB = 20 log10 A
  Vector alpha;                     // broadcast to length nT
  std::vector<std::string> schemes; // validated against the channel case
  double log_base = 2.0;            // 2 or e
  SCAConfig sca;
};

// The two measurement channel groups shipped as presets, plus their
// transposed variants for the nT < nB, nT < nE regime.
Scenario preset_scenario(const std::string& name);

// Parses a JSON config file; throws ConfigError naming the offending field.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_json(const std::string& text);

// Throws CaseError when a requested scheme is not defined for the channel
// case (fc-zf and sc get documented special handling in Case II instead).
void validate_schemes(const Scenario& sc);

// CSV with the fixed header; one row per (snr, scheme).
// cmd `rate` restricts schemes to direct evaluation.
std::string run_rate_csv(const Scenario& sc);
std::string run_optimize_csv(const Scenario& sc);

}  // namespace vlcsec
