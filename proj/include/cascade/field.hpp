#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cascade/grid.hpp"

namespace cascade {

using Complex = std::complex<double>;

/// Fourier coefficients of a real, zero-mean periodic scalar on a grid.
class SpectralScalarField {
 public:
  explicit SpectralScalarField(WavenumberGrid grid) : grid_(std::move(grid)), coeffs_(grid_.size()) {}

  SpectralScalarField(WavenumberGrid grid, std::vector<Complex> coeffs)
      : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) throw std::invalid_argument("coefficient count does not match grid");
  }

  const WavenumberGrid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  const Complex& operator[](std::size_t f) const { return coeffs_[f]; }
  Complex& operator[](std::size_t f) { return coeffs_[f]; }

  /// Sets the pair (k, -k) so that the field stays real.
  void set_mode(const Mode& k, Complex value) {
    const std::size_t f = grid_.flat(k);
    coeffs_[f] = value;
    coeffs_[grid_.conjugate(f)] = std::conj(value);
  }

  /// Zeroes the mean and every mode outside the dealiasing disc, then makes
  /// each conjugate pair exactly Hermitian by averaging.
  void enforce_invariants() {
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
      if (!grid_.retained(f)) {
        coeffs_[f] = 0.0;
      } else if (grid_.in_upper_half(f)) {
        const std::size_t g = grid_.conjugate(f);
        const Complex avg = 0.5 * (coeffs_[f] + std::conj(coeffs_[g]));
        coeffs_[f] = avg;
        coeffs_[g] = std::conj(avg);
      }
    }
  }

  /// Largest violation of zero mean, Hermitian symmetry, or truncation,
  /// relative to the largest coefficient magnitude.
  double invariant_violation() const {
    double scale = 0.0;
    for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
      if (!grid_.retained(f)) {
        worst = std::max(worst, std::abs(coeffs_[f]));
      } else {
        worst = std::max(worst, std::abs(coeffs_[f] - std::conj(coeffs_[grid_.conjugate(f)])));
      }
    }
    return worst / scale;
  }

  bool all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  }

  bool operator==(const SpectralScalarField& other) const {
    return grid_ == other.grid_ && coeffs_ == other.coeffs_;
  }

  SpectralScalarField& operator+=(const SpectralScalarField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t f = 0; f < coeffs_.size(); ++f) coeffs_[f] += other.coeffs_[f];
    return *this;
  }
  SpectralScalarField& operator-=(const SpectralScalarField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t f = 0; f < coeffs_.size(); ++f) coeffs_[f] -= other.coeffs_[f];
    return *this;
  }
  SpectralScalarField& operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend SpectralScalarField operator+(SpectralScalarField a, const SpectralScalarField& b) { return a += b; }
  friend SpectralScalarField operator-(SpectralScalarField a, const SpectralScalarField& b) { return a -= b; }
  friend SpectralScalarField operator*(double s, SpectralScalarField a) { return a *= s; }

 private:
  WavenumberGrid grid_;
  std::vector<Complex> coeffs_;
};

/// Fourier coefficients of a real, zero-mean vector field, one component per
/// spatial direction. Divergence-free once it has been through leray_project
/// or velocity_from_vorticity.
class SpectralVelocityField {
 public:
  explicit SpectralVelocityField(const WavenumberGrid& grid)
      : components_(static_cast<std::size_t>(grid.dim()), SpectralScalarField(grid)) {}

  explicit SpectralVelocityField(std::vector<SpectralScalarField> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("velocity field needs components");
    const auto& g = components_.front().grid();
    if (components_.size() != static_cast<std::size_t>(g.dim())) {
      throw std::invalid_argument("velocity field needs one component per dimension");
    }
    for (const auto& c : components_) require_same_grid(g, c.grid());
  }

  const WavenumberGrid& grid() const { return components_.front().grid(); }
  int dim() const { return static_cast<int>(components_.size()); }
  const SpectralScalarField& component(int a) const { return components_[static_cast<std::size_t>(a)]; }
  SpectralScalarField& component(int a) { return components_[static_cast<std::size_t>(a)]; }

  void enforce_invariants() {
    for (auto& c : components_) c.enforce_invariants();
  }

  /// max_k |k . u_k| / (|k| max_k |u_k|).
  double divergence_violation() const {
    const auto& g = grid();
    double scale = 0.0;
    double worst = 0.0;
    for (std::size_t f = 0; f < g.size(); ++f) {
      const Mode k = g.mode(f);
      Complex div = 0.0;
      double mag2 = 0.0;
      for (int a = 0; a < dim(); ++a) {
        div += static_cast<double>(k[a]) * component(a)[f];
        mag2 += std::norm(component(a)[f]);
      }
      scale = std::max(scale, std::sqrt(mag2));
      if (g.norm2(f) > 0) worst = std::max(worst, std::abs(div) / std::sqrt(static_cast<double>(g.norm2(f))));
    }
    return scale == 0.0 ? 0.0 : worst / scale;
  }

  bool operator==(const SpectralVelocityField& other) const { return components_ == other.components_; }

  SpectralVelocityField& operator+=(const SpectralVelocityField& other) {
    for (int a = 0; a < dim(); ++a) component(a) += other.component(a);
    return *this;
  }
  SpectralVelocityField& operator-=(const SpectralVelocityField& other) {
    for (int a = 0; a < dim(); ++a) component(a) -= other.component(a);
    return *this;
  }
  friend SpectralVelocityField operator+(SpectralVelocityField a, const SpectralVelocityField& b) { return a += b; }
  friend SpectralVelocityField operator-(SpectralVelocityField a, const SpectralVelocityField& b) { return a -= b; }

 private:
  std::vector<SpectralScalarField> components_;
};

/// 2D velocity from scalar vorticity: u_k = i k_perp w_k / (kappa0 |k|^2),
/// with k_perp = (k_y, -k_x). Divergence-free by construction.
inline SpectralVelocityField velocity_from_vorticity(const SpectralScalarField& omega) {
  const auto& g = omega.grid();
  if (g.dim() != 2) throw std::invalid_argument("vorticity storage is two-dimensional only");
  SpectralVelocityField u(g);
  const Complex i(0.0, 1.0);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const int k2 = g.norm2(f);
    if (k2 == 0) continue;
    const Mode k = g.mode(f);
    const Complex s = i * omega[f] / (g.kappa0() * static_cast<double>(k2));
    u.component(0)[f] = static_cast<double>(k[1]) * s;
    u.component(1)[f] = -static_cast<double>(k[0]) * s;
  }
  return u;
}

/// 2D vorticity w = d_x u_y - d_y u_x.
inline SpectralScalarField vorticity_of(const SpectralVelocityField& u) {
  const auto& g = u.grid();
  if (g.dim() != 2) throw std::invalid_argument("vorticity storage is two-dimensional only");
  SpectralScalarField w(g);
  const Complex i(0.0, 1.0);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Mode k = g.mode(f);
    w[f] = i * g.kappa0() * (static_cast<double>(k[0]) * u.component(1)[f] - static_cast<double>(k[1]) * u.component(0)[f]);
  }
  return w;
}

}  // namespace cascade
