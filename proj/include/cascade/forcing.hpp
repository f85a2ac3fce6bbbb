#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/field.hpp"

namespace cascade {

/// Independent phase streams drawn from one seed.
enum class PhaseStream : std::uint32_t {
  velocity_forcing = 1,
  tracer_forcing = 2,
  initial_velocity = 3,
  synthetic = 4,
};

/// Deterministic phase in [0, 2pi) for one lattice mode. The value depends
/// only on (seed, stream, k), never on grid size or traversal order.
inline double mode_phase(std::uint64_t seed, PhaseStream stream, const Mode& k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xFFFFFFFFu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(k[0]),
                    static_cast<std::uint32_t>(k[1]), static_cast<std::uint32_t>(k[2])};
  std::mt19937_64 rng(seq);
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * std::numbers::pi * unit;
}

/// Flat indices of retained upper-half modes with lo <= kappa0 |k| <= hi.
inline std::vector<std::size_t> band_modes(const WavenumberGrid& g, double lo, double hi) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (!g.retained(f) || !g.in_upper_half(f)) continue;
    const double kappa = g.wavenumber(f);
    if (kappa >= lo && kappa <= hi) out.push_back(f);
  }
  return out;
}

/// Scalar with equal-magnitude band modes and sum_k |s_k|^2 = rms^2.
inline SpectralScalarField band_scalar(const WavenumberGrid& g, const ForcingSpec& spec, std::uint64_t seed,
                                       PhaseStream stream) {
  SpectralScalarField s(g);
  const auto modes = band_modes(g, spec.band_lo, spec.band_hi);
  if (modes.empty() || spec.amplitude == 0.0) return s;
  const double c = spec.amplitude / std::sqrt(2.0 * static_cast<double>(modes.size()));
  for (const auto f : modes) s.set_mode(g.mode(f), std::polar(c, mode_phase(seed, stream, g.mode(f))));
  return s;
}

/// Divergence-free 2D vector field f_k = c e^{i phi_k} k_perp / |k| on the
/// band modes, with sum_k |f_k|^2 = rms^2.
inline SpectralVelocityField band_velocity(const WavenumberGrid& g, const ForcingSpec& spec, std::uint64_t seed,
                                           PhaseStream stream) {
  if (g.dim() != 2) throw std::invalid_argument("band_velocity is two-dimensional only");
  SpectralVelocityField u(g);
  const auto modes = band_modes(g, spec.band_lo, spec.band_hi);
  if (modes.empty() || spec.amplitude == 0.0) return u;
  const double c = spec.amplitude / std::sqrt(2.0 * static_cast<double>(modes.size()));
  for (const auto f : modes) {
    const Mode k = g.mode(f);
    const double norm = std::sqrt(static_cast<double>(g.norm2(f)));
    const Complex z = std::polar(c, mode_phase(seed, stream, k));
    u.component(0).set_mode(k, z * (static_cast<double>(k[1]) / norm));
    u.component(1).set_mode(k, z * (-static_cast<double>(k[0]) / norm));
  }
  return u;
}

/// Steady forcing of the velocity (f and its curl) and of the tracer (g).
struct ForcingFields {
  SpectralVelocityField velocity;
  SpectralScalarField vorticity;
  SpectralScalarField tracer;
};

inline ForcingFields make_forcing(const WavenumberGrid& g, const SimulationConfig& config) {
  auto f = band_velocity(g, config.velocity_forcing, config.seed, PhaseStream::velocity_forcing);
  auto curl = vorticity_of(f);
  auto src = band_scalar(g, config.tracer_forcing, config.seed, PhaseStream::tracer_forcing);
  return {std::move(f), std::move(curl), std::move(src)};
}

}  // namespace cascade
