#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/field.hpp"

namespace cascade {

/// Field snapshot layout, all integers and floats little-endian:
///
///   bytes 0-4   magic "CSLB1"
///   uint32      d
///   uint32      N
///   float64     L
///   uint32      kind (FieldKind)
///   float64     t (simulation time; 0 for fields without one)
///   then component_count(kind) arrays of N^d (re, im) float64 pairs,
///   row-major in the FFT index order of WavenumberGrid.
enum class FieldKind : std::uint32_t {
  scalar = 0,     ///< tracer or any scalar
  vorticity = 1,  ///< 2D scalar vorticity
  velocity = 2,   ///< d velocity components
  state = 3,      ///< 2D vorticity followed by tracer
};

inline constexpr std::array<char, 5> kSnapshotMagic = {'C', 'S', 'L', 'B', '1'};

inline int component_count(FieldKind kind, int dim) {
  switch (kind) {
    case FieldKind::scalar:
    case FieldKind::vorticity:
      return 1;
    case FieldKind::velocity:
      return dim;
    case FieldKind::state:
      return 2;
  }
  throw std::invalid_argument("unknown field kind");
}

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decoded snapshot: grid plus one scalar array per component.
struct Snapshot {
  FieldKind kind = FieldKind::scalar;
  double time = 0.0;
  std::vector<SpectralScalarField> components;

  const WavenumberGrid& grid() const { return components.front().grid(); }
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(b.data(), b.size());
}

inline void put_f64(std::ostream& os, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  os.write(b.data(), b.size());
}

inline std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw SnapshotError("truncated snapshot header");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

inline double get_f64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw SnapshotError("truncated snapshot data");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return std::bit_cast<double>(v);
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, FieldKind kind, const std::vector<const SpectralScalarField*>& comps,
                           double time = 0.0) {
  if (comps.empty()) throw std::invalid_argument("snapshot needs at least one component");
  const auto& g = comps.front()->grid();
  if (static_cast<int>(comps.size()) != component_count(kind, g.dim())) {
    throw std::invalid_argument("component count does not match field kind");
  }
  os.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  detail::put_u32(os, static_cast<std::uint32_t>(g.dim()));
  detail::put_u32(os, static_cast<std::uint32_t>(g.modes()));
  detail::put_f64(os, g.length());
  detail::put_u32(os, static_cast<std::uint32_t>(kind));
  detail::put_f64(os, time);
  for (const auto* c : comps) {
    require_same_grid(g, c->grid());
    for (const auto& z : c->coeffs()) {
      detail::put_f64(os, z.real());
      detail::put_f64(os, z.imag());
    }
  }
  if (!os) throw SnapshotError("failed writing snapshot");
}

inline void write_snapshot(std::ostream& os, const SpectralScalarField& f, FieldKind kind = FieldKind::scalar) {
  write_snapshot(os, kind, {&f});
}

inline void write_snapshot(std::ostream& os, const SpectralVelocityField& u) {
  std::vector<const SpectralScalarField*> comps;
  for (int c = 0; c < u.dim(); ++c) comps.push_back(&u.component(c));
  write_snapshot(os, FieldKind::velocity, comps);
}

inline Snapshot read_snapshot(std::istream& is) {
  std::array<char, 5> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kSnapshotMagic) {
    throw SnapshotError("not a CSLB1 snapshot (bad magic)");
  }
  const auto dim = static_cast<int>(detail::get_u32(is));
  const auto n = static_cast<int>(detail::get_u32(is));
  const double length = detail::get_f64(is);
  const auto raw_kind = detail::get_u32(is);
  if (raw_kind > static_cast<std::uint32_t>(FieldKind::state)) throw SnapshotError("unknown field kind tag");
  Snapshot snap;
  snap.kind = static_cast<FieldKind>(raw_kind);
  snap.time = detail::get_f64(is);
  WavenumberGrid grid = [&] {
    try {
      return WavenumberGrid(length, n, dim);
    } catch (const std::invalid_argument& e) {
      throw SnapshotError(std::string("invalid snapshot geometry: ") + e.what());
    }
  }();
  const int ncomp = component_count(snap.kind, dim);
  for (int c = 0; c < ncomp; ++c) {
    std::vector<Complex> coeffs(grid.size());
    for (auto& z : coeffs) {
      const double re = detail::get_f64(is);
      const double im = detail::get_f64(is);
      z = Complex(re, im);
    }
    snap.components.emplace_back(grid, std::move(coeffs));
  }
  return snap;
}

inline void save_snapshot(const std::filesystem::path& path, FieldKind kind,
                          const std::vector<const SpectralScalarField*>& comps, double time = 0.0) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("cannot open " + path.string() + " for writing");
  write_snapshot(os, kind, comps, time);
}

inline Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("cannot open " + path.string());
  return read_snapshot(is);
}

}  // namespace cascade
