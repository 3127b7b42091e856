#pragma once

// JSON device/recipe configuration. Frequencies are plain f in MHz (stored
// internally as 2 pi f in rad/ns), rates in kHz, times in ns or ps as named.

#include "tocq/device_model.hpp"
#include "tocq/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

namespace tocq {

using Json = nlohmann::json;

namespace config {

/// Field access that names the missing or mistyped key in the error.
inline const Json& require(const Json& j, const std::string& key, const std::string& where) {
  const std::string path = where.empty() ? key : where + "." + key;
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing required field '" + path + "'");
  return j.at(key);
}

inline double number(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) throw ConfigError("field '" + (where.empty() ? key : where + "." + key) + "' must be a number");
  return v.get<double>();
}

inline double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j, key, where);
}

inline bool flag_or(const Json& j, const std::string& key, bool fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError("field '" + where + "." + key + "' must be true or false");
  return v.get<bool>();
}

inline Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Applies "a.b.0.c=value" style overrides; the value is parsed as JSON and
/// falls back to a plain string.
inline void apply_override(Json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::parse_error&) {
    value = raw;
  }
  std::string pointer;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) pointer += "/" + part;
  try {
    root[Json::json_pointer(pointer)] = value;
  } catch (const Json::exception& e) {
    throw ConfigError("cannot apply override '" + assignment + "': " + e.what());
  }
}

/// FNV-1a 64-bit hash of the canonical (sorted-key) JSON dump.
inline std::string hash(const Json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline LatticeSpec parse_lattice(const Json& device) {
  const Json& list = require(device, "transmons", "device");
  if (!list.is_array() || list.empty()) throw ConfigError("field 'device.transmons' must be a non-empty list");
  std::vector<TransmonSpec> ts;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "device.transmons[" + std::to_string(k) + "]";
    const Json& t = list[k];
    TransmonSpec spec;
    spec.omega0 = units::mhz(number(t, "omega0_mhz", where));
    spec.alpha = units::mhz(number(t, "alpha_mhz", where));
    spec.r_minus = units::khz(number_or(t, "r_minus_khz", 0.0, where));
    spec.r_z = units::khz(number_or(t, "r_z_khz", 0.0, where));
    spec.levels = static_cast<int>(number_or(t, "levels", 3, where));
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    ts.push_back(spec);
  }
  LatticeSpec lat(ts);
  const Json& cs = require(device, "couplings", "device");
  if (!cs.is_array()) throw ConfigError("field 'device.couplings' must be a list");
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const std::string where = "device.couplings[" + std::to_string(k) + "]";
    const Json& pair = require(cs[k], "pair", where);
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
      throw ConfigError("field '" + where + ".pair' must be two transmon indices");
    try {
      lat.set_coupling(pair[0].get<int>(), pair[1].get<int>(), units::mhz(number(cs[k], "g_mhz", where)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return lat;
}

/// Modulation request: either the index Gamma directly or the amplitude
/// epsilon (then Gamma = epsilon / (nu + eta) once the pulse fixes nu, eta).
struct DriveRequest {
  int target = 1;
  std::optional<double> gamma;
  std::optional<double> epsilon;
  std::optional<double> nu;  // overrides the resonance condition when set

  double resolve_gamma(double nu_value, double eta) const {
    if (gamma) return *gamma;
    return *epsilon / (nu_value + eta);
  }
};

inline DriveRequest parse_drive(const Json& device) {
  const Json& d = require(device, "drive", "device");
  DriveRequest r;
  r.target = static_cast<int>(number_or(d, "target", 1, "device.drive"));
  if (d.contains("gamma")) r.gamma = number(d, "gamma", "device.drive");
  if (d.contains("epsilon_mhz")) r.epsilon = units::mhz(number(d, "epsilon_mhz", "device.drive"));
  if (!r.gamma && !r.epsilon) throw ConfigError("missing required field 'device.drive.gamma' (or 'device.drive.epsilon_mhz')");
  if (d.contains("nu_mhz")) r.nu = units::mhz(number(d, "nu_mhz", "device.drive"));
  return r;
}

struct SimulationOptions {
  double dt_ps = 0.5;
  int n_bessel = 15;
  bool decoherence = true;
  bool full_basis = false;
  double sample_ps = 10.0;  // trajectory output spacing
};

inline SimulationOptions parse_simulation(const Json& root) {
  SimulationOptions o;
  if (!root.contains("simulation")) return o;
  const Json& s = root.at("simulation");
  o.dt_ps = number_or(s, "dt_ps", o.dt_ps, "simulation");
  o.n_bessel = static_cast<int>(number_or(s, "n_bessel", o.n_bessel, "simulation"));
  o.decoherence = flag_or(s, "decoherence", o.decoherence, "simulation");
  o.full_basis = flag_or(s, "full_basis", o.full_basis, "simulation");
  o.sample_ps = number_or(s, "sample_ps", o.sample_ps, "simulation");
  if (!(o.dt_ps > 0.0 && o.dt_ps <= 1.0)) throw ConfigError("simulation.dt_ps must be in (0, 1] for driven models");
  if (o.n_bessel < 1 || o.n_bessel > 64) throw ConfigError("simulation.n_bessel must be in [1, 64]");
  if (!(o.sample_ps > 0.0)) throw ConfigError("simulation.sample_ps must be positive");
  return o;
}

/// Single-logical-qubit device (S1 on transmons T1 T2, drive on T2).
inline Json default_single_qubit() {
  return Json::parse(R"({
  "device": {
    "transmons": [
      {"omega0_mhz": 5520.0, "alpha_mhz": 200.0, "r_minus_khz": 4.0, "r_z_khz": 4.0},
      {"omega0_mhz": 5000.0, "alpha_mhz": 210.0, "r_minus_khz": 4.0, "r_z_khz": 4.0}
    ],
    "couplings": [{"pair": [0, 1], "g_mhz": 14.5}],
    "drive": {"target": 1, "gamma": 1.5}
  },
  "gates": {
    "H": {"delta_mhz": 29.58},
    "S": {"delta_mhz": 25.0},
    "T": {"delta_mhz": 15.0}
  },
  "simulation": {"dt_ps": 0.5, "n_bessel": 15, "decoherence": true, "full_basis": false, "sample_ps": 10.0}
})");
}

/// Two logical qubits on S2 (T1..T4), CP via |11>_L <-> |0200> on the T2-T4 pair.
inline Json default_cp() {
  return Json::parse(R"({
  "device": {
    "transmons": [
      {"omega0_mhz": 5900.0, "alpha_mhz": 200.0, "r_minus_khz": 4.0, "r_z_khz": 4.0},
      {"omega0_mhz": 5000.0, "alpha_mhz": 210.0, "r_minus_khz": 4.0, "r_z_khz": 4.0},
      {"omega0_mhz": 5300.0, "alpha_mhz": 220.0, "r_minus_khz": 4.0, "r_z_khz": 4.0},
      {"omega0_mhz": 4400.0, "alpha_mhz": 230.0, "r_minus_khz": 4.0, "r_z_khz": 4.0}
    ],
    "couplings": [
      {"pair": [1, 3], "g_mhz": 7.0},
      {"pair": [0, 1], "g_mhz": 14.5},
      {"pair": [2, 3], "g_mhz": 14.5}
    ],
    "drive": {"target": 1, "gamma": 1.6}
  },
  "cp": {"delta2_mhz": 27.0, "gamma": 1.5707963267948966},
  "simulation": {"dt_ps": 0.5, "n_bessel": 15, "decoherence": true, "full_basis": false, "sample_ps": 10.0}
})");
}

}  // namespace config
}  // namespace tocq
