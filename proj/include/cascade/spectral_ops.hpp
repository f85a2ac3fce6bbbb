#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cascade/fft.hpp"
#include "cascade/field.hpp"
#include "cascade/spectrum_table.hpp"

namespace cascade {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Inner products and norms. All follow (f, g) = int_Omega f.g dx, evaluated
// through Parseval: (f, g) = L^d sum_k Re(f_k conj(g_k)).
// ---------------------------------------------------------------------------

namespace detail {

template <class Weight>
double weighted_sum(const SpectralScalarField& a, const SpectralScalarField& b, Weight w) {
  require_same_grid(a.grid(), b.grid());
  const auto& g = a.grid();
  double s = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (g.norm2(f) == 0) continue;
    s += w(f) * (a[f].real() * b[f].real() + a[f].imag() * b[f].imag());
  }
  return s * g.volume();
}

}  // namespace detail

inline double inner_product(const SpectralScalarField& a, const SpectralScalarField& b) {
  return detail::weighted_sum(a, b, [](std::size_t) { return 1.0; });
}

inline double inner_product(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  double s = 0.0;
  for (int c = 0; c < a.dim(); ++c) s += inner_product(a.component(c), b.component(c));
  return s;
}

/// |f|^2 = L^d sum_k |f_k|^2.
inline double parseval_energy(const SpectralScalarField& f) { return inner_product(f, f); }
inline double parseval_energy(const SpectralVelocityField& u) { return inner_product(u, u); }

/// ||f||^2 = |A^{1/2} f|^2 = |grad f|^2.
inline double gradient_norm2(const SpectralScalarField& f) {
  const auto& g = f.grid();
  return detail::weighted_sum(f, f, [&g](std::size_t m) { return g.eigenvalue(m); });
}
inline double gradient_norm2(const SpectralVelocityField& u) {
  double s = 0.0;
  for (int c = 0; c < u.dim(); ++c) s += gradient_norm2(u.component(c));
  return s;
}

/// |A f|^2 = |Laplacian f|^2.
inline double laplacian_norm2(const SpectralScalarField& f) {
  const auto& g = f.grid();
  return detail::weighted_sum(f, f, [&g](std::size_t m) { return g.eigenvalue(m) * g.eigenvalue(m); });
}
inline double laplacian_norm2(const SpectralVelocityField& u) {
  double s = 0.0;
  for (int c = 0; c < u.dim(); ++c) s += laplacian_norm2(u.component(c));
  return s;
}

/// A^alpha applied mode by mode (A = -Laplacian; the mean mode maps to zero).
inline SpectralScalarField apply_A_power(const SpectralScalarField& f, double alpha) {
  SpectralScalarField out(f.grid());
  const auto& g = f.grid();
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (g.norm2(m) == 0) continue;
    out[m] = std::pow(g.eigenvalue(m), alpha) * f[m];
  }
  return out;
}

inline SpectralVelocityField apply_A_power(const SpectralVelocityField& u, double alpha) {
  SpectralVelocityField out(u.grid());
  for (int c = 0; c < u.dim(); ++c) out.component(c) = apply_A_power(u.component(c), alpha);
  return out;
}

/// Partial derivative along `axis`: i kappa0 k_axis f_k.
inline SpectralScalarField derivative(const SpectralScalarField& f, int axis) {
  const auto& g = f.grid();
  SpectralScalarField out(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double k = static_cast<double>(g.mode(m)[static_cast<std::size_t>(axis)]);
    out[m] = Complex(0.0, g.kappa0() * k) * f[m];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Projection and filtering.
// ---------------------------------------------------------------------------

/// Helmholtz-Leray projection onto divergence-free fields:
/// u_k = v_k - k (k.v_k) / |k|^2.
inline SpectralVelocityField leray_project(const SpectralVelocityField& v) {
  const auto& g = v.grid();
  SpectralVelocityField out(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const int k2 = g.norm2(m);
    if (k2 == 0) continue;
    const Mode k = g.mode(m);
    Complex kdotv = 0.0;
    for (int c = 0; c < v.dim(); ++c) kdotv += static_cast<double>(k[static_cast<std::size_t>(c)]) * v.component(c)[m];
    const Complex s = kdotv / static_cast<double>(k2);
    for (int c = 0; c < v.dim(); ++c) {
      out.component(c)[m] = v.component(c)[m] - static_cast<double>(k[static_cast<std::size_t>(c)]) * s;
    }
  }
  return out;
}

/// Keeps exactly the modes with kappa_lo <= kappa0 |k| < kappa_hi.
inline SpectralScalarField shell_filter(const SpectralScalarField& f, double kappa_lo, double kappa_hi) {
  if (!(kappa_lo >= 0.0) || !(kappa_lo < kappa_hi)) {
    throw std::invalid_argument("shell_filter needs 0 <= kappa_lo < kappa_hi");
  }
  const auto& g = f.grid();
  SpectralScalarField out(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double kappa = g.wavenumber(m);
    if (kappa >= kappa_lo && kappa < kappa_hi) out[m] = f[m];
  }
  return out;
}

inline SpectralVelocityField shell_filter(const SpectralVelocityField& u, double kappa_lo, double kappa_hi) {
  SpectralVelocityField out(u.grid());
  for (int c = 0; c < u.dim(); ++c) out.component(c) = shell_filter(u.component(c), kappa_lo, kappa_hi);
  return out;
}

/// Low-pass part f_{kappa0, kappa}.
template <class Field>
Field low_pass(const Field& f, double kappa) {
  return shell_filter(f, 0.0, kappa);
}

/// High-pass part f_{kappa, inf}.
template <class Field>
Field high_pass(const Field& f, double kappa) {
  return shell_filter(f, kappa, kInfinity);
}

// ---------------------------------------------------------------------------
// Binned spectra.
// ---------------------------------------------------------------------------

namespace detail {

inline void add_mode_power(const WavenumberGrid& g, const SpectrumTable& layout, std::vector<double>& values,
                           std::size_t m, double power) {
  const int k2 = g.norm2(m);
  if (k2 == 0 || power == 0.0) return;
  const auto bin = layout.bin_of_norm2(k2, g.kappa0());
  if (bin) values[*bin] += power;
}

}  // namespace detail

/// Per-bin sums of |f_k|^2, i.e. (1/L^d) times the Parseval content of
/// each bin. Bins tile [kappa0, kappa_max].
inline SpectrumTable binned_spectrum(const SpectralScalarField& f, Binning binning) {
  const auto& g = f.grid();
  SpectrumTable table = SpectrumTable::layout_for(g, binning);
  for (std::size_t m = 0; m < g.size(); ++m) detail::add_mode_power(g, table, table.values, m, std::norm(f[m]));
  return table;
}

inline SpectrumTable binned_spectrum(const SpectralVelocityField& u, Binning binning) {
  const auto& g = u.grid();
  SpectrumTable table = SpectrumTable::layout_for(g, binning);
  for (std::size_t m = 0; m < g.size(); ++m) {
    double p = 0.0;
    for (int c = 0; c < u.dim(); ++c) p += std::norm(u.component(c)[m]);
    detail::add_mode_power(g, table, table.values, m, p);
  }
  return table;
}

/// Octave bins [2^j kappa0, 2^{j+1} kappa0).
template <class Field>
SpectrumTable dyadic_spectrum(const Field& f) {
  return binned_spectrum(f, Binning::dyadic);
}

/// Unit-width shells [m kappa0, (m+1) kappa0).
template <class Field>
SpectrumTable shell_spectrum(const Field& f) {
  return binned_spectrum(f, Binning::unit_shell);
}

// ---------------------------------------------------------------------------
// Dealiased pseudo-spectral products.
// ---------------------------------------------------------------------------

/// Collocation samples of several fields, transformed two at a time.
inline std::vector<PhysicalField> to_physical_many(const std::vector<const SpectralScalarField*>& fields) {
  std::vector<PhysicalField> out(fields.size());
  for (std::size_t i = 0; i < fields.size(); i += 2) {
    const SpectralScalarField* second = i + 1 < fields.size() ? fields[i + 1] : nullptr;
    auto [re, im] = to_physical_pair(*fields[i], second);
    out[i] = std::move(re);
    if (second != nullptr) out[i + 1] = std::move(im);
  }
  return out;
}

/// u . grad s for each scalar in `scalars`, sharing one evaluation of u.
/// Each product is transformed back on its own so that results for one
/// scalar never depend on the values of another. When `max_speed` is given
/// it receives max_x |u(x)| over the collocation grid.
inline std::vector<SpectralScalarField> advect_scalars(const SpectralVelocityField& u,
                                                       const std::vector<const SpectralScalarField*>& scalars,
                                                       double* max_speed = nullptr) {
  const auto& g = u.grid();
  const int d = u.dim();
  std::vector<const SpectralScalarField*> ucomps;
  for (int c = 0; c < d; ++c) ucomps.push_back(&u.component(c));
  const auto uphys = to_physical_many(ucomps);
  if (max_speed != nullptr) {
    double m2 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      double s2 = 0.0;
      for (int c = 0; c < d; ++c) s2 += uphys[static_cast<std::size_t>(c)][j] * uphys[static_cast<std::size_t>(c)][j];
      m2 = std::max(m2, s2);
    }
    *max_speed = std::sqrt(m2);
  }

  std::vector<SpectralScalarField> out;
  out.reserve(scalars.size());
  for (const auto* s : scalars) {
    require_same_grid(g, s->grid());
    std::vector<SpectralScalarField> grads;
    grads.reserve(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) grads.push_back(derivative(*s, c));
    std::vector<const SpectralScalarField*> gp;
    for (const auto& gr : grads) gp.push_back(&gr);
    const auto sphys = to_physical_many(gp);
    PhysicalField prod(g.size(), 0.0);
    for (int c = 0; c < d; ++c) {
      const auto& uc = uphys[static_cast<std::size_t>(c)];
      const auto& sc = sphys[static_cast<std::size_t>(c)];
      for (std::size_t j = 0; j < prod.size(); ++j) prod[j] += uc[j] * sc[j];
    }
    out.push_back(to_spectral(g, prod));
  }
  return out;
}

/// Dealiased u . grad s.
inline SpectralScalarField bilinear_advection(const SpectralVelocityField& u, const SpectralScalarField& s) {
  require_same_grid(u.grid(), s.grid());
  return std::move(advect_scalars(u, {&s}).front());
}

/// B(u, v) = P((u . grad) v), dealiased.
inline SpectralVelocityField bilinear_advection(const SpectralVelocityField& u, const SpectralVelocityField& v) {
  require_same_grid(u.grid(), v.grid());
  std::vector<const SpectralScalarField*> vcomps;
  for (int c = 0; c < v.dim(); ++c) vcomps.push_back(&v.component(c));
  auto parts = advect_scalars(u, vcomps);
  return leray_project(SpectralVelocityField(std::move(parts)));
}

}  // namespace cascade
