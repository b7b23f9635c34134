#pragma once

// Key/value run configuration for sweeps, simulations and convergence studies.
//
//   # comment
//   noise = 0, 0.5, 1          lists are comma separated
//   noise_range = 0, 6, 25     lo, hi, count; expands into `noise`
//   modes = 6.7, 40
//
// Unknown keys are rejected so that typos do not silently fall back to defaults.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tribeam/errors.hpp"
#include "tribeam/photonics/model.hpp"

namespace tribeam {

struct SweepConfig {
  std::vector<double> noise{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0};
  double pair_mean = 0.4;
  double noise_modes = 180.0;
  std::vector<double> modes{6.7, 40.0};
  std::vector<std::uint64_t> realizations{10000, 100000, 1000000};
  /// realizations per Monte Carlo sweep point; 0 disables the MC part of sweeps
  std::uint64_t sweep_realizations = 100000;
  photonics::DetectorSpec signal = photonics::signal_detector();
  photonics::DetectorSpec idler = photonics::idler_detector();
  bool symmetrize_detectors = true;
  std::vector<int> orders{2, 4, 6};
  std::string out = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  int grid = 200;
  /// extent of the rotated-purity grid (mu1 + mu2) / 2 and (mu1 - mu2) / 2
  double rotated_sum_min = 0.0, rotated_sum_max = 1.0;
  double rotated_diff_min = 0.0, rotated_diff_max = 0.5;
  int resamples = 200;
  double usability_threshold = 0.05;
  double fit_tolerance = 1.0;
  bool use_em = false;

  photonics::DetectorSet detectors() const {
    if (symmetrize_detectors) {
      const photonics::DetectorSpec avg{0.5 * (signal.efficiency + idler.efficiency),
                                        0.5 * (signal.dark_rate + idler.dark_rate)};
      return {avg, avg, avg};
    }
    return {signal, idler, signal};
  }

  void validate() const {
    if (noise.empty()) throw ConfigError("noise grid is empty");
    if (modes.empty()) throw ConfigError("modes list is empty");
    if (realizations.empty()) throw ConfigError("realizations list is empty");
    if (orders.empty()) throw ConfigError("orders list is empty");
    for (double n : noise)
      if (!(n >= 0.0)) throw ConfigError("noise values must be >= 0");
    for (double m : modes)
      if (!(m > 0.0)) throw ConfigError("modes must be > 0");
    for (auto n : realizations)
      if (n < 1) throw ConfigError("realizations must be >= 1");
    for (int o : orders)
      if (o != 2 && o != 4 && o != 6) throw ConfigError("orders must be 2, 4 or 6");
    if (!(pair_mean > 0.0)) throw ConfigError("pair_mean must be > 0");
    if (noise_modes < 0.0) throw ConfigError("noise_modes must be >= 0");
    if (grid < 2) throw ConfigError("grid must be >= 2");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (resamples < 2) throw ConfigError("resamples must be >= 2");
    if (!(usability_threshold > 0.0)) throw ConfigError("usability_threshold must be > 0");
    if (!(fit_tolerance > 0.0)) throw ConfigError("fit_tolerance must be > 0");
    if (!(rotated_sum_max > rotated_sum_min) || !(rotated_diff_max > rotated_diff_min))
      throw ConfigError("rotated grid extents must be increasing");
    signal.validate();
    idler.validate();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_value(const std::string& key, const std::string& s) {
  std::istringstream is(s);
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) throw ConfigError("bad value for " + key + ": '" + s + "'");
  return v;
}

template <>
inline bool parse_value<bool>(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + s + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& s) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) out.push_back(parse_value<T>(key, item));
  return out;
}

}  // namespace detail

inline void apply_setting(SweepConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_list;
  using detail::parse_value;
  if (key == "noise") c.noise = parse_list<double>(key, value);
  else if (key == "noise_range") {
    const auto r = parse_list<double>(key, value);
    if (r.size() != 3 || r[2] < 1) throw ConfigError("noise_range needs lo, hi, count");
    const int n = static_cast<int>(r[2]);
    c.noise.clear();
    for (int i = 0; i < n; ++i) c.noise.push_back(n == 1 ? r[0] : r[0] + (r[1] - r[0]) * i / (n - 1));
  } else if (key == "pair_mean") c.pair_mean = parse_value<double>(key, value);
  else if (key == "noise_modes") c.noise_modes = parse_value<double>(key, value);
  else if (key == "modes") c.modes = parse_list<double>(key, value);
  else if (key == "realizations") c.realizations = parse_list<std::uint64_t>(key, value);
  else if (key == "sweep_realizations") c.sweep_realizations = parse_value<std::uint64_t>(key, value);
  else if (key == "signal_efficiency") c.signal.efficiency = parse_value<double>(key, value);
  else if (key == "signal_dark") c.signal.dark_rate = parse_value<double>(key, value);
  else if (key == "idler_efficiency") c.idler.efficiency = parse_value<double>(key, value);
  else if (key == "idler_dark") c.idler.dark_rate = parse_value<double>(key, value);
  else if (key == "symmetrize_detectors") c.symmetrize_detectors = parse_value<bool>(key, value);
  else if (key == "orders") c.orders = parse_list<int>(key, value);
  else if (key == "out") c.out = value;
  else if (key == "seed") c.seed = parse_value<std::uint64_t>(key, value);
  else if (key == "threads") c.threads = parse_value<int>(key, value);
  else if (key == "grid") c.grid = parse_value<int>(key, value);
  else if (key == "rotated_sum") {
    const auto r = parse_list<double>(key, value);
    if (r.size() != 2) throw ConfigError("rotated_sum needs min, max");
    c.rotated_sum_min = r[0];
    c.rotated_sum_max = r[1];
  } else if (key == "rotated_diff") {
    const auto r = parse_list<double>(key, value);
    if (r.size() != 2) throw ConfigError("rotated_diff needs min, max");
    c.rotated_diff_min = r[0];
    c.rotated_diff_max = r[1];
  } else if (key == "resamples") c.resamples = parse_value<int>(key, value);
  else if (key == "usability_threshold") c.usability_threshold = parse_value<double>(key, value);
  else if (key == "fit_tolerance") c.fit_tolerance = parse_value<double>(key, value);
  else if (key == "use_em") c.use_em = parse_value<bool>(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

inline SweepConfig parse_config(std::istream& is) {
  SweepConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  c.validate();
  return c;
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path);
  return parse_config(is);
}

}  // namespace tribeam
