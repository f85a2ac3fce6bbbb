#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

/// Integer lattice wavevector. Components beyond the grid dimension are zero.
using Mode = std::array<int, 3>;

/// Periodic box [0,L]^d sampled with N modes per direction.
///
/// The mode lattice holds every k in Z^d with components in [-N/2, N/2),
/// stored row-major with the FFT index convention (i < N/2 maps to k = i,
/// otherwise k = i - N). Copies share the immutable lattice tables.
class WavenumberGrid {
 public:
  WavenumberGrid(double length, int modes, int dim) {
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw std::invalid_argument("grid length must be positive and finite");
    }
    if (dim != 2 && dim != 3) {
      throw std::invalid_argument("grid dimension must be 2 or 3, got " + std::to_string(dim));
    }
    if (modes < 8 || modes % 2 != 0 || modes > 4096) {
      throw std::invalid_argument("modes per dimension must be even and in [8, 4096], got " +
                                  std::to_string(modes));
    }
    auto tables = std::make_shared<Tables>();
    tables->length = length;
    tables->modes = modes;
    tables->dim = dim;
    tables->kappa0 = 2.0 * std::numbers::pi / length;
    // Largest K with 3K < N: products of two fields truncated at K alias
    // only onto |k_i| >= N - 2K > K.
    tables->cutoff = (modes - 1) / 3;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(modes);
    tables->size = total;
    tables->norm2.resize(total);
    tables->modes_of.resize(total);
    for (std::size_t f = 0; f < total; ++f) {
      const Mode k = decompose(f, modes, dim);
      tables->modes_of[f] = {static_cast<std::int16_t>(k[0]), static_cast<std::int16_t>(k[1]),
                             static_cast<std::int16_t>(k[2])};
      tables->norm2[f] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    }
    tables_ = std::move(tables);
  }

  double length() const { return tables_->length; }
  int modes() const { return tables_->modes; }
  int dim() const { return tables_->dim; }
  double kappa0() const { return tables_->kappa0; }
  int dealias_cutoff() const { return tables_->cutoff; }
  std::size_t size() const { return tables_->size; }

  /// L^d.
  double volume() const { return tables_->dim == 2 ? length() * length() : length() * length() * length(); }

  /// Largest wavenumber carried by a retained mode.
  double kappa_max() const { return kappa0() * dealias_cutoff(); }

  Mode mode(std::size_t flat) const {
    const auto& k = tables_->modes_of[flat];
    return {k[0], k[1], k[2]};
  }

  std::size_t flat(const Mode& k) const {
    const int n = modes();
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a) {
      const int i = k[a] >= 0 ? k[a] : k[a] + n;
      f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    }
    return f;
  }

  /// Flat index of -k. Only meaningful for modes away from the Nyquist plane.
  std::size_t conjugate(std::size_t f) const {
    Mode k = mode(f);
    for (int a = 0; a < dim(); ++a) k[a] = -k[a];
    return flat(k);
  }

  /// |k|^2 as an integer.
  int norm2(std::size_t f) const { return tables_->norm2[f]; }

  /// kappa0 |k|.
  double wavenumber(std::size_t f) const { return kappa0() * std::sqrt(static_cast<double>(norm2(f))); }

  /// Eigenvalue of A = -Laplacian on mode f.
  double eigenvalue(std::size_t f) const { return kappa0() * kappa0() * static_cast<double>(norm2(f)); }

  /// Nonzero mode inside the dealiasing disc.
  bool retained(std::size_t f) const {
    const int k2 = norm2(f);
    return k2 > 0 && k2 <= dealias_cutoff() * dealias_cutoff();
  }

  /// Canonical half of the lattice: the first nonzero component is positive.
  /// Each conjugate pair of retained modes has exactly one member here.
  bool in_upper_half(std::size_t f) const {
    const Mode k = mode(f);
    for (int a = 0; a < dim(); ++a) {
      if (k[a] != 0) return k[a] > 0;
    }
    return false;
  }

  bool operator==(const WavenumberGrid& other) const {
    return tables_ == other.tables_ ||
           (length() == other.length() && modes() == other.modes() && dim() == other.dim());
  }
  bool operator!=(const WavenumberGrid& other) const { return !(*this == other); }

 private:
  struct Tables {
    double length = 0.0;
    int modes = 0;
    int dim = 0;
    double kappa0 = 0.0;
    int cutoff = 0;
    std::size_t size = 0;
    std::vector<std::int32_t> norm2;
    std::vector<std::array<std::int16_t, 3>> modes_of;
  };

  static Mode decompose(std::size_t f, int n, int dim) {
    Mode k{0, 0, 0};
    const auto un = static_cast<std::size_t>(n);
    for (int a = dim - 1; a >= 0; --a) {
      const int i = static_cast<int>(f % un);
      f /= un;
      k[a] = i < n / 2 ? i : i - n;
    }
    return k;
  }

  std::shared_ptr<const Tables> tables_;
};

inline WavenumberGrid make_grid(double length, int modes, int dim) { return WavenumberGrid(length, modes, dim); }

inline void require_same_grid(const WavenumberGrid& a, const WavenumberGrid& b) {
  if (a != b) throw std::invalid_argument("fields live on different grids");
}

}  // namespace cascade
