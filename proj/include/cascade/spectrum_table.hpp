#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/format.hpp"
#include "cascade/grid.hpp"

namespace cascade {

enum class Binning { dyadic, unit_shell };

/// Binned spectral content: value j is the sum of |f_k|^2 over modes with
/// edges[j] <= kappa0 |k| < edges[j+1].
struct SpectrumTable {
  Binning binning = Binning::dyadic;
  std::vector<double> edges;
  std::vector<double> values;
  /// The last bin reaches past the largest retained wavenumber.
  bool top_partial = false;

  std::size_t size() const { return values.size(); }
  double kappa_lo(std::size_t j) const { return edges[j]; }
  double kappa_hi(std::size_t j) const { return edges[j + 1]; }
  double total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

  std::optional<std::size_t> bin_of(double kappa) const {
    if (edges.size() < 2 || kappa < edges.front() || !(kappa < edges.back())) return std::nullopt;
    const auto it = std::upper_bound(edges.begin(), edges.end(), kappa);
    return static_cast<std::size_t>(std::distance(edges.begin(), it) - 1);
  }

  std::optional<std::size_t> bin_of_norm2(int k2, double kappa0) const {
    return bin_of(kappa0 * std::sqrt(static_cast<double>(k2)));
  }

  /// Empty table whose bins tile [kappa0, kappa_max] of the grid.
  static SpectrumTable layout_for(const WavenumberGrid& g, Binning binning) {
    SpectrumTable t;
    t.binning = binning;
    const int cutoff = g.dealias_cutoff();
    if (binning == Binning::dyadic) {
      int j = 0;
      for (; (1 << j) <= cutoff; ++j) t.edges.push_back(std::ldexp(g.kappa0(), j));
      t.edges.push_back(std::ldexp(g.kappa0(), j));
    } else {
      for (int m = 1; m <= cutoff + 1; ++m) t.edges.push_back(g.kappa0() * m);
    }
    // Retained modes stop at |k| = cutoff, strictly inside the last bin.
    t.top_partial = true;
    t.values.assign(t.edges.size() - 1, 0.0);
    return t;
  }
};

inline void write_csv(std::ostream& os, const SpectrumTable& t) {
  os << "kappa_lo,kappa_hi,value\n";
  for (std::size_t j = 0; j < t.size(); ++j) {
    os << format_double(t.kappa_lo(j)) << ',' << format_double(t.kappa_hi(j)) << ',' << format_double(t.values[j])
       << '\n';
  }
}

/// Reads the kappa_lo,kappa_hi,value layout written by write_csv. Bins must
/// be contiguous.
inline SpectrumTable read_csv(std::istream& is, Binning binning) {
  SpectrumTable t;
  t.binning = binning;
  std::string line;
  if (!std::getline(is, line) || line.rfind("kappa_lo,kappa_hi,value", 0) != 0) {
    throw std::runtime_error("spectrum CSV must start with header kappa_lo,kappa_hi,value");
  }
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw std::runtime_error("spectrum CSV line " + std::to_string(lineno) + ": expected three columns");
    }
    const double lo = parse_number(a);
    const double hi = parse_number(b);
    if (t.edges.empty()) {
      t.edges.push_back(lo);
    } else if (t.edges.back() != lo) {
      throw std::runtime_error("spectrum CSV line " + std::to_string(lineno) + ": bins are not contiguous");
    }
    t.edges.push_back(hi);
    t.values.push_back(parse_number(c));
  }
  return t;
}

}  // namespace cascade
