#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdms/dynamics.hpp"
#include "cdms/params.hpp"

namespace cdms {

// Malformed or invalid configuration. The message names the offending key
// (or file), so a typo never silently falls back to a default.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::string parameter;  // one of: vartheta, beta_in, eta, gamma, n_atoms
  // Units follow the config file convention for the swept parameter:
  // gamma in linear MHz, vartheta in rad, the others dimensionless counts.
  std::vector<double> values;
};

struct RunConfig {
  PhysicalParams physical = PhysicalParams::defaults();
  StepConfig step;
  std::vector<std::uint64_t> seeds;      // empty + no noise files -> {1}
  std::vector<std::string> noise_files;  // trajectories driven by recorded draws
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";
  int workers = 1;
  bool dump_final_state = false;
  std::string source_text;  // raw config bytes; hashed into the manifest
};

// Parses the flat key=value text format ('#' starts a comment, blank lines
// ignored, angles accept a "pi" suffix, lists are comma or space separated).
// Unknown keys throw ConfigError. No validation beyond per-value syntax.
RunConfig parse_config(const std::string& text);

// Applies defaults (seeds={1} when nothing supplies noise) and checks the
// cross-field invariants: derive_params accepts the base parameters, step
// sizes are sane, sweep values lie in the swept parameter's domain.
void finalize_config(RunConfig& cfg);

// Reads, parses, and finalizes. The file must exist; an empty file is a
// valid config meaning "all defaults, one trajectory with seed 1".
RunConfig load_config(const std::string& path);

// One sweep point applied to the base parameters. gamma values arrive in
// linear MHz and are scaled by 2*pi here; n_atoms values must be integral.
PhysicalParams apply_sweep_value(const PhysicalParams& base,
                                 const std::string& parameter, double value);

// FNV-1a 64-bit over raw bytes; fingerprint for the run manifest.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cdms
