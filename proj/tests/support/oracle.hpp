#pragma once

// Brute-force references that share no code path with the FFT products:
// full-lattice convolution sums, explicit inner products and per-mode
// projections.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "cascade/field.hpp"
#include "cascade/spectral_ops.hpp"

namespace cascade::oracle {

/// Gaussian coefficients on retained modes with |k|^-decay envelope.
inline SpectralScalarField random_scalar(const WavenumberGrid& g, std::uint64_t seed, double decay = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralScalarField f(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (!g.retained(m) || !g.in_upper_half(m)) continue;
    const double env = std::pow(std::sqrt(static_cast<double>(g.norm2(m))), -decay);
    const double re = n(rng);
    const double im = n(rng);
    f.set_mode(g.mode(m), env * Complex(re, im));
  }
  return f;
}

inline SpectralVelocityField random_velocity(const WavenumberGrid& g, std::uint64_t seed, bool solenoidal = true) {
  SpectralVelocityField u(g);
  for (int c = 0; c < g.dim(); ++c) u.component(c) = random_scalar(g, seed * 7919 + static_cast<std::uint64_t>(c));
  return solenoidal ? leray_project(u) : u;
}

inline bool retained_mode(const WavenumberGrid& g, const Mode& k) {
  const int k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  return k2 > 0 && k2 <= g.dealias_cutoff() * g.dealias_cutoff();
}

/// (u . grad s)^ truncated to the dealiasing disc, by summing every triad
/// p + q = k with u at p and s at q.
inline SpectralScalarField direct_advection(const SpectralVelocityField& u, const SpectralScalarField& s) {
  const auto& g = s.grid();
  const Complex i(0.0, 1.0);
  std::vector<std::size_t> support;
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (g.retained(m)) support.push_back(m);
  }
  SpectralScalarField out(g);
  for (const auto p : support) {
    const Mode kp = g.mode(p);
    for (const auto q : support) {
      const Mode kq = g.mode(q);
      const Mode k = {kp[0] + kq[0], kp[1] + kq[1], kp[2] + kq[2]};
      if (!retained_mode(g, k)) continue;
      Complex term = 0.0;
      for (int c = 0; c < g.dim(); ++c) term += u.component(c)[p] * (i * g.kappa0() * static_cast<double>(kq[c]));
      out[g.flat(k)] += term * s[q];
    }
  }
  return out;
}

/// L^d sum_k Re(a_k conj(b_k)).
inline double inner(const SpectralScalarField& a, const SpectralScalarField& b) {
  long double s = 0.0L;
  for (std::size_t m = 0; m < a.grid().size(); ++m) s += (a[m] * std::conj(b[m])).real();
  return static_cast<double>(s) * a.grid().volume();
}

inline double inner(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  double s = 0.0;
  for (int c = 0; c < a.dim(); ++c) s += inner(a.component(c), b.component(c));
  return s;
}

/// Keeps modes with lo <= kappa0 |k| < hi.
inline SpectralScalarField band(const SpectralScalarField& f, double lo, double hi) {
  const auto& g = f.grid();
  SpectralScalarField out(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double kappa = g.kappa0() * std::sqrt(static_cast<double>(g.norm2(m)));
    if (kappa >= lo && kappa < hi) out[m] = f[m];
  }
  return out;
}

inline SpectralVelocityField band(const SpectralVelocityField& u, double lo, double hi) {
  SpectralVelocityField out(u.grid());
  for (int c = 0; c < u.dim(); ++c) out.component(c) = band(u.component(c), lo, hi);
  return out;
}

/// P (u . grad) v with the projection applied mode by mode.
inline SpectralVelocityField direct_bilinear(const SpectralVelocityField& u, const SpectralVelocityField& v) {
  const auto& g = u.grid();
  SpectralVelocityField w(g);
  for (int c = 0; c < g.dim(); ++c) w.component(c) = direct_advection(u, v.component(c));
  SpectralVelocityField out(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const int k2 = g.norm2(m);
    if (k2 == 0) continue;
    const Mode k = g.mode(m);
    Complex dot = 0.0;
    for (int c = 0; c < g.dim(); ++c) dot += static_cast<double>(k[c]) * w.component(c)[m];
    for (int c = 0; c < g.dim(); ++c) {
      out.component(c)[m] = w.component(c)[m] - static_cast<double>(k[c]) * dot / static_cast<double>(k2);
    }
  }
  return out;
}

/// A u = -Delta u, mode by mode.
inline SpectralVelocityField stokes(const SpectralVelocityField& u) {
  const auto& g = u.grid();
  SpectralVelocityField out(g);
  const double k0sq = g.kappa0() * g.kappa0();
  for (int c = 0; c < g.dim(); ++c) {
    for (std::size_t m = 0; m < g.size(); ++m) out.component(c)[m] = k0sq * g.norm2(m) * u.component(c)[m];
  }
  return out;
}

struct DirectFlux {
  double enstrophy_forward, enstrophy_backward, energy_forward, energy_backward;
};

/// Enstrophy and energy transfer parts through kappa from the convolution sums.
inline DirectFlux direct_velocity_flux(const SpectralVelocityField& u, double kappa) {
  const double vol = u.grid().volume();
  const auto ul = band(u, 0.0, kappa);
  const auto uh = band(u, kappa, INFINITY);
  const auto bl = direct_bilinear(ul, ul);
  const auto bh = direct_bilinear(uh, uh);
  return {-inner(bl, stokes(uh)) / vol, -inner(bh, stokes(ul)) / vol, -inner(bl, uh) / vol, -inner(bh, ul) / vol};
}

/// Triad form of the tracer flux from the convolution sums.
inline double direct_tracer_flux(const SpectralVelocityField& u, const SpectralScalarField& theta, double kappa) {
  const auto ul = band(u, 0.0, kappa);
  const auto uh = band(u, kappa, INFINITY);
  const auto tl = band(theta, 0.0, kappa);
  const auto th = band(theta, kappa, INFINITY);
  return (-inner(direct_advection(ul, tl), th) + inner(direct_advection(uh, th), tl)) / u.grid().volume();
}

/// Relative difference scaled by the larger magnitude (absolute below `floor`).
inline double rel(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace cascade::oracle
