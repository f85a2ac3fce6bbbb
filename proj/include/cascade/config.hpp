#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cascade/format.hpp"

namespace cascade {

/// Band-limited steady forcing. Coefficients live on retained modes with
/// band_lo <= kappa0 |k| <= band_hi, all with equal magnitude and fixed
/// pseudo-random phases, scaled so that sum_k |f_k|^2 = amplitude^2.
struct ForcingSpec {
  double band_lo = 0.0;
  double band_hi = 0.0;
  double amplitude = 0.0;

  bool active() const { return amplitude != 0.0; }
};

/// Parameters of a 2D Navier-Stokes + passive tracer run.
struct SimulationConfig {
  double length = 2.0 * std::numbers::pi;
  int modes = 64;
  double nu = 0.0;
  double mu = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  double burn_in = 0.0;
  std::uint64_t seed = 0;
  ForcingSpec velocity_forcing;
  ForcingSpec tracer_forcing;
  /// RMS velocity of the initial band-limited noise.
  double init_amp = 0.01;
  /// Steps between checkpoints; 0 writes only the final state.
  int checkpoint_every = 0;
  /// Steps between post-burn-in diagnostic samples.
  int sample_every = 1;
  /// Steps between velocity flux samples (these need two products per kappa).
  int flux_every = 10;

  double schmidt() const { return nu / mu; }
  double kappa0() const { return 2.0 * std::numbers::pi / length; }

  void validate() const {
    auto need = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(what);
    };
    need(length > 0.0 && std::isfinite(length), "L must be positive");
    need(modes >= 8 && modes % 2 == 0, "N must be even and >= 8");
    need(nu > 0.0, "nu must be positive");
    need(mu > 0.0, "mu must be positive");
    need(dt > 0.0, "dt must be positive");
    need(t_end >= 0.0, "t_end must be non-negative");
    need(burn_in >= 0.0, "burn_in must be non-negative");
    need(init_amp >= 0.0, "init_amp must be non-negative");
    need(checkpoint_every >= 0, "checkpoint_every must be non-negative");
    need(sample_every >= 1, "sample_every must be >= 1");
    need(flux_every >= 1, "flux_every must be >= 1");
    for (const auto* f : {&velocity_forcing, &tracer_forcing}) {
      need(f->band_lo >= 0.0 && f->band_lo <= f->band_hi, "forcing band needs 0 <= lo <= hi");
      need(f->amplitude >= 0.0, "forcing amplitude must be non-negative");
    }
  }
};

/// Error in a configuration file, carrying the offending line (0 when the
/// problem is not tied to one line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Bad command-line input or inconsistent inputs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Accepts plain numbers, fractions, and multiples of pi ("2pi", "0.5*pi").
inline double parse_config_number(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
    auto head = text.substr(0, text.size() - 2);
    if (!head.empty() && head.back() == '*') head.remove_suffix(1);
    return (head.empty() ? 1.0 : parse_number(head)) * std::numbers::pi;
  }
  return parse_number(text);
}

}  // namespace detail

/// Parses the flat key-value grammar:
///
///   file    := { line }
///   line    := blank | comment | key '=' value [comment]
///   comment := '#' { any }
///
/// Keys are case-sensitive; each may appear once. Required keys: L, N, nu,
/// mu, dt, t_end, burn_in, seed, vel_band_lo, vel_band_hi, vel_amp,
/// trc_band_lo, trc_band_hi, trc_amp. Optional: init_amp, checkpoint_every,
/// sample_every, flux_every.
inline SimulationConfig parse_config(std::istream& is) {
  static const std::set<std::string> required = {"L",           "N",           "nu",      "mu",
                                                 "dt",          "t_end",       "burn_in", "seed",
                                                 "vel_band_lo", "vel_band_hi", "vel_amp", "trc_band_lo",
                                                 "trc_band_hi", "trc_amp"};
  static const std::set<std::string> optional = {"init_amp", "checkpoint_every", "sample_every", "flux_every"};

  std::map<std::string, std::pair<std::string, int>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    if (key.empty()) throw ConfigError(lineno, "missing key");
    if (value.empty()) throw ConfigError(lineno, "missing value for '" + key + "'");
    if (!required.contains(key) && !optional.contains(key)) throw ConfigError(lineno, "unknown key '" + key + "'");
    if (entries.contains(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
    entries.emplace(key, std::make_pair(value, lineno));
  }
  for (const auto& k : required) {
    if (!entries.contains(k)) throw ConfigError(0, "missing required key '" + k + "'");
  }

  auto number = [&](const std::string& key) {
    const auto& [text, at] = entries.at(key);
    try {
      return detail::parse_config_number(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(at, key + ": " + e.what());
    }
  };
  auto integer = [&](const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
      throw ConfigError(entries.at(key).second, key + ": expected an integer");
    }
    return v;
  };

  SimulationConfig c;
  c.length = number("L");
  c.modes = static_cast<int>(integer("N"));
  c.nu = number("nu");
  c.mu = number("mu");
  c.dt = number("dt");
  c.t_end = number("t_end");
  c.burn_in = number("burn_in");
  const double seed = integer("seed");
  if (seed < 0) throw ConfigError(entries.at("seed").second, "seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.velocity_forcing = {number("vel_band_lo"), number("vel_band_hi"), number("vel_amp")};
  c.tracer_forcing = {number("trc_band_lo"), number("trc_band_hi"), number("trc_amp")};
  if (entries.contains("init_amp")) c.init_amp = number("init_amp");
  if (entries.contains("checkpoint_every")) c.checkpoint_every = static_cast<int>(integer("checkpoint_every"));
  if (entries.contains("sample_every")) c.sample_every = static_cast<int>(integer("sample_every"));
  if (entries.contains("flux_every")) c.flux_every = static_cast<int>(integer("flux_every"));
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return c;
}

inline SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::ios_base::failure("cannot open config file " + path.string());
  return parse_config(is);
}

/// Canonical text form; parse_config(write_config(c)) reproduces c exactly.
inline void write_config(std::ostream& os, const SimulationConfig& c) {
  auto kv = [&os](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
  kv("L", format_double(c.length));
  kv("N", std::to_string(c.modes));
  kv("nu", format_double(c.nu));
  kv("mu", format_double(c.mu));
  kv("dt", format_double(c.dt));
  kv("t_end", format_double(c.t_end));
  kv("burn_in", format_double(c.burn_in));
  kv("seed", std::to_string(c.seed));
  kv("vel_band_lo", format_double(c.velocity_forcing.band_lo));
  kv("vel_band_hi", format_double(c.velocity_forcing.band_hi));
  kv("vel_amp", format_double(c.velocity_forcing.amplitude));
  kv("trc_band_lo", format_double(c.tracer_forcing.band_lo));
  kv("trc_band_hi", format_double(c.tracer_forcing.band_hi));
  kv("trc_amp", format_double(c.tracer_forcing.amplitude));
  kv("init_amp", format_double(c.init_amp));
  kv("checkpoint_every", std::to_string(c.checkpoint_every));
  kv("sample_every", std::to_string(c.sample_every));
  kv("flux_every", std::to_string(c.flux_every));
}

}  // namespace cascade
