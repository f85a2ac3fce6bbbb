#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "cascade/field.hpp"
#include "cascade/spectrum_table.hpp"

namespace cascade {

/// Scalar field whose binned spectrum equals `table`: each bin's value is
/// spread evenly over the retained lattice modes in that bin, with phases
/// drawn from one seeded stream in flat-index order.
inline SpectralScalarField synthetic_field_from_spectrum(const SpectrumTable& table, const WavenumberGrid& g,
                                                         std::uint64_t seed) {
  const std::size_t nb = table.size();
  std::vector<std::size_t> count(nb, 0);
  std::vector<std::int64_t> bin_of(g.size(), -1);
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (!g.retained(f)) continue;
    if (const auto b = table.bin_of_norm2(g.norm2(f), g.kappa0())) {
      bin_of[f] = static_cast<std::int64_t>(*b);
      ++count[*b];
    }
  }
  for (std::size_t j = 0; j < nb; ++j) {
    if (table.values[j] < 0.0) throw std::invalid_argument("spectrum bins must be non-negative");
    if (table.values[j] > 0.0 && count[j] == 0) {
      throw std::invalid_argument("spectrum bin " + std::to_string(j) + " has no lattice modes");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  SpectralScalarField out(g);
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (bin_of[f] < 0 || !g.in_upper_half(f)) continue;
    const auto j = static_cast<std::size_t>(bin_of[f]);
    const double amp = std::sqrt(table.values[j] / static_cast<double>(count[j]));
    const Complex z = std::polar(amp, phase(rng));
    out[f] = z;
    out[g.conjugate(f)] = std::conj(z);
  }
  return out;
}

/// Piece of a continuous spectrum
///   T(kappa) = coefficient kappa^exponent (ln(kappa/log_ref))^log_power
/// on [lo, hi). A nonzero log_power requires exponent -1.
struct SpectrumSegment {
  double lo = 0.0;
  double hi = 0.0;
  double coefficient = 0.0;
  double exponent = 0.0;
  double log_power = 0.0;
  double log_ref = 1.0;

  double antiderivative(double x) const {
    if (log_power != 0.0) {
      const double e = log_power + 1.0;
      return coefficient * std::pow(std::log(x / log_ref), e) / e;
    }
    if (exponent == -1.0) return coefficient * std::log(x);
    return coefficient * std::pow(x, exponent + 1.0) / (exponent + 1.0);
  }

  /// Integral of T over [a, b] intersected with [lo, hi).
  double integral(double a, double b) const {
    const double x0 = std::max(a, lo);
    const double x1 = std::min(b, hi);
    return x1 > x0 ? antiderivative(x1) - antiderivative(x0) : 0.0;
  }
};

/// Unit-shell table of the grid holding the integrals of the segments.
inline SpectrumTable integrate_spectrum(const std::vector<SpectrumSegment>& segments, const WavenumberGrid& g) {
  for (const auto& s : segments) {
    if (s.log_power != 0.0 && (s.exponent != -1.0 || s.lo < s.log_ref)) {
      throw std::invalid_argument("log-corrected segment needs exponent -1 and lo >= log_ref");
    }
    if (!(s.lo > 0.0) || !(s.lo < s.hi)) throw std::invalid_argument("segment needs 0 < lo < hi");
  }
  auto t = SpectrumTable::layout_for(g, Binning::unit_shell);
  for (std::size_t j = 0; j < t.size(); ++j) {
    for (const auto& s : segments) t.values[j] += s.integral(t.kappa_lo(j), t.kappa_hi(j));
  }
  return t;
}

/// Per-bin mode count and eigenvalue sum, for quadratic forms of a field
/// built by synthetic_field_from_spectrum.
struct BinMoments {
  std::vector<double> count;
  std::vector<double> eigen_sum;
};

inline BinMoments bin_moments(const SpectrumTable& layout, const WavenumberGrid& g) {
  BinMoments m{std::vector<double>(layout.size(), 0.0), std::vector<double>(layout.size(), 0.0)};
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (!g.retained(f)) continue;
    if (const auto b = layout.bin_of_norm2(g.norm2(f), g.kappa0())) {
      m.count[*b] += 1.0;
      m.eigen_sum[*b] += g.eigenvalue(f);
    }
  }
  return m;
}

/// Sets the top edge of the last segment so that the synthetic field has
/// mu sum_k lambda_k |th_k|^2 = chi, i.e. the dissipation rate the spectrum
/// was drawn with. Returns the closed table; `segments.back().hi` is updated.
inline SpectrumTable close_spectrum(std::vector<SpectrumSegment>& segments, const WavenumberGrid& g, double mu,
                                    double chi) {
  if (segments.empty()) throw std::invalid_argument("close_spectrum needs a segment");
  const auto layout = SpectrumTable::layout_for(g, Binning::unit_shell);
  const auto moments = bin_moments(layout, g);
  auto dissipation = [&](double top) {
    segments.back().hi = top;
    const auto t = integrate_spectrum(segments, g);
    double s = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (moments.count[j] > 0.0) s += t.values[j] / moments.count[j] * moments.eigen_sum[j];
    }
    return mu * s - chi;
  };
  double lo = segments.back().lo * (1.0 + 1e-9);
  double hi = g.kappa_max();
  if (dissipation(hi) < 0.0) throw std::invalid_argument("grid too coarse to carry the requested dissipation");
  if (dissipation(lo) > 0.0) throw std::invalid_argument("dissipation exceeded before the last segment starts");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dissipation(mid) > 0.0 ? hi : lo) = mid;
  }
  segments.back().hi = 0.5 * (lo + hi);
  return integrate_spectrum(segments, g);
}

}  // namespace cascade
