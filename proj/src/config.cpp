#include "cdms/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cdms {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
  throw ConfigError("config key '" + key + "': bad value '" + value + "' (" +
                    why + ")");
}

double parse_number(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) bad_value(key, value, "empty");
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    bad_value(key, value, "not a number");
  return x;
}

// Angles accept a trailing "pi": "0.25pi", "pi", "-pi".
double parse_angle(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.size() >= 2 && v.compare(v.size() - 2, 2, "pi") == 0) {
    const std::string head = trim(v.substr(0, v.size() - 2));
    if (head.empty()) return kPi;
    if (head == "-") return -kPi;
    if (head == "+") return kPi;
    return parse_number(key, head) * kPi;
  }
  return parse_number(key, v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, value, "expected a boolean");
}

long long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) bad_value(key, value, "empty");
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    bad_value(key, value, "not an integer");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty() || v[0] == '-') bad_value(key, value, "expected unsigned");
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    bad_value(key, value, "not an unsigned integer");
  return static_cast<std::uint64_t>(x);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.source_text = text;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");

    PhysicalParams& p = cfg.physical;
    if (key == "physical.omega_ud_mhz") {
      p.omega_ud = kTwoPi * parse_number(key, value);
    } else if (key == "physical.delta_up_mhz") {
      p.delta_up = kTwoPi * parse_number(key, value);
    } else if (key == "physical.delta_dn_mhz") {
      p.delta_dn = kTwoPi * parse_number(key, value);
    } else if (key == "physical.kappa_mhz") {
      p.kappa = kTwoPi * parse_number(key, value);
    } else if (key == "physical.g_mhz") {
      p.g = kTwoPi * parse_number(key, value);
    } else if (key == "physical.gamma_mhz") {
      p.gamma = kTwoPi * parse_number(key, value);
    } else if (key == "physical.eta") {
      p.eta = parse_number(key, value);
    } else if (key == "physical.beta_in") {
      p.beta_in = parse_number(key, value);
    } else if (key == "physical.vartheta_rad") {
      p.vartheta = parse_angle(key, value);
    } else if (key == "physical.theta_rad") {
      p.theta = parse_angle(key, value);
    } else if (key == "physical.phi_rad") {
      p.phi = parse_angle(key, value);
    } else if (key == "physical.n_atoms") {
      const long long n = parse_int(key, value);
      if (n < 1) bad_value(key, value, "must be >= 1");
      p.n_atoms = static_cast<int>(n);
    } else if (key == "step.dt_us") {
      cfg.step.dt = parse_number(key, value);
    } else if (key == "step.t_end_us") {
      cfg.step.t_end = parse_number(key, value);
    } else if (key == "step.record_every") {
      const long long n = parse_int(key, value);
      if (n < 1) bad_value(key, value, "must be >= 1");
      cfg.step.record_every = static_cast<int>(n);
    } else if (key == "step.renormalize_every") {
      const long long n = parse_int(key, value);
      if (n < 1) bad_value(key, value, "must be >= 1");
      cfg.step.renormalize_every = static_cast<int>(n);
    } else if (key == "step.measurement_on") {
      cfg.step.measurement_on = parse_bool(key, value);
    } else if (key == "step.frame_shift_override") {
      cfg.step.frame_shift_override = parse_number(key, value);
    } else if (key == "step.snapshot_times_us") {
      cfg.step.snapshot_times.clear();
      for (const std::string& tok : split_list(value))
        cfg.step.snapshot_times.push_back(parse_number(key, tok));
    } else if (key == "run.seeds") {
      cfg.seeds.clear();
      for (const std::string& tok : split_list(value))
        cfg.seeds.push_back(parse_u64(key, tok));
    } else if (key == "run.noise_files") {
      cfg.noise_files = split_list(value);
    } else if (key == "run.workers") {
      const long long n = parse_int(key, value);
      if (n < 1) bad_value(key, value, "must be >= 1");
      cfg.workers = static_cast<int>(n);
    } else if (key == "run.output_dir") {
      if (value.empty()) bad_value(key, value, "empty path");
      cfg.output_dir = value;
    } else if (key == "run.dump_final_state") {
      cfg.dump_final_state = parse_bool(key, value);
    } else if (key == "sweep.parameter") {
      if (!cfg.sweep) cfg.sweep.emplace();
      cfg.sweep->parameter = value;
    } else if (key == "sweep.values") {
      if (!cfg.sweep) cfg.sweep.emplace();
      cfg.sweep->values.clear();
      for (const std::string& tok : split_list(value))
        cfg.sweep->values.push_back(parse_angle(key, tok));
    } else {
      throw ConfigError("unknown config key: '" + key + "' (line " +
                        std::to_string(lineno) + ")");
    }
  }
  return cfg;
}

PhysicalParams apply_sweep_value(const PhysicalParams& base,
                                 const std::string& parameter, double value) {
  PhysicalParams p = base;
  if (parameter == "vartheta") {
    p.vartheta = value;
  } else if (parameter == "beta_in") {
    p.beta_in = value;
  } else if (parameter == "eta") {
    p.eta = value;
  } else if (parameter == "gamma") {
    p.gamma = kTwoPi * value;
  } else if (parameter == "n_atoms") {
    const double r = std::round(value);
    if (!(std::abs(value - r) < 1e-9) || r < 1.0 || r > 1e9)
      throw ConfigError("sweep.values: n_atoms value " + std::to_string(value) +
                        " is not a positive integer");
    p.n_atoms = static_cast<int>(r);
  } else {
    throw ConfigError("sweep.parameter: unknown parameter '" + parameter +
                      "' (expected vartheta, beta_in, eta, gamma, n_atoms)");
  }
  return p;
}

void finalize_config(RunConfig& cfg) {
  if (cfg.seeds.empty() && cfg.noise_files.empty()) cfg.seeds = {1};

  if (!(cfg.step.dt > 0.0))
    throw ConfigError("step.dt_us must be > 0");
  if (!(cfg.step.t_end >= cfg.step.dt))
    throw ConfigError("step.t_end_us must be >= step.dt_us");
  for (double ts : cfg.step.snapshot_times)
    if (!(ts >= 0.0) || !(ts <= cfg.step.t_end))
      throw ConfigError("step.snapshot_times_us: time " + std::to_string(ts) +
                        " outside [0, t_end]");

  // Every parameter set the batch will run must be derivable. Sweep points
  // replace the base value, so check each one.
  try {
    if (cfg.sweep) {
      if (cfg.sweep->parameter.empty())
        throw ConfigError("sweep.values given without sweep.parameter");
      if (cfg.sweep->values.empty())
        throw ConfigError("sweep.parameter given without sweep.values");
      for (double v : cfg.sweep->values)
        derive_params(apply_sweep_value(cfg.physical, cfg.sweep->parameter, v));
    } else {
      derive_params(cfg.physical);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid physical parameters: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_config(buf.str());
  finalize_config(cfg);
  return cfg;
}

}  // namespace cdms
