#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <new>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cascade/field.hpp"

namespace cascade {

namespace detail {

// FFTW planning is not thread-safe; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// In-place complex-to-complex transforms for one lattice shape, executed on
/// a SIMD-aligned buffer owned by the plan. Plans use FFTW_ESTIMATE so that
/// the arithmetic is reproducible run to run.
class FftPlan {
 public:
  FftPlan(int dim, int n) : dim_(dim), n_(n) {
    int dims[3] = {n, n, n};
    size_ = 1;
    for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);
    std::lock_guard lock(detail::fftw_planner_mutex());
    buffer_ = fftw_alloc_complex(size_);
    if (buffer_ == nullptr) throw std::bad_alloc();
    forward_ = fftw_plan_dft(dim, dims, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(dim, dims, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }

  /// Work array the transforms act on.
  std::span<Complex> buffer() const { return {reinterpret_cast<Complex*>(buffer_), size_}; }

  /// buffer <- sum_x buffer(x) e^{-i k.x}, unnormalized.
  void forward() const { fftw_execute(forward_); }

  /// buffer <- sum_k buffer_k e^{+i k.x}: evaluates a Fourier series on the
  /// collocation grid.
  void backward() const { fftw_execute(backward_); }

  int dim() const { return dim_; }
  int modes() const { return n_; }

 private:
  int dim_;
  int n_;
  std::size_t size_ = 0;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Per-thread plan cache keyed by lattice shape.
inline const FftPlan& plan_for(const WavenumberGrid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[{grid.dim(), grid.modes()}];
  if (!slot) slot = std::make_unique<FftPlan>(grid.dim(), grid.modes());
  return *slot;
}

/// Real samples of a field on the uniform collocation grid x_j = j L / N.
using PhysicalField = std::vector<double>;

/// Evaluates one or two real fields on the collocation grid with a single
/// transform by packing them as a + i b.
inline std::pair<PhysicalField, PhysicalField> to_physical_pair(const SpectralScalarField& a,
                                                                const SpectralScalarField* b) {
  const auto& g = a.grid();
  const auto& plan = plan_for(g);
  const auto work = plan.buffer();
  if (b != nullptr) {
    require_same_grid(g, b->grid());
    for (std::size_t f = 0; f < work.size(); ++f) {
      work[f] = Complex(a[f].real() - (*b)[f].imag(), a[f].imag() + (*b)[f].real());
    }
  } else {
    std::copy(a.coeffs().begin(), a.coeffs().end(), work.begin());
  }
  plan.backward();
  PhysicalField re(work.size());
  PhysicalField im;
  for (std::size_t j = 0; j < work.size(); ++j) re[j] = work[j].real();
  if (b != nullptr) {
    im.resize(work.size());
    for (std::size_t j = 0; j < work.size(); ++j) im[j] = work[j].imag();
  }
  return {std::move(re), std::move(im)};
}

inline PhysicalField to_physical(const SpectralScalarField& a) { return to_physical_pair(a, nullptr).first; }

/// Inverse of to_physical_pair followed by dealiasing: both outputs are
/// truncated to the retained disc with zero mean and exact Hermitian pairs.
inline std::pair<SpectralScalarField, SpectralScalarField> to_spectral_pair(const WavenumberGrid& g,
                                                                            const PhysicalField& p,
                                                                            const PhysicalField* q) {
  if (p.size() != g.size() || (q != nullptr && q->size() != g.size())) {
    throw std::invalid_argument("physical field size does not match grid");
  }
  const auto& plan = plan_for(g);
  const auto work = plan.buffer();
  for (std::size_t j = 0; j < work.size(); ++j) work[j] = Complex(p[j], q != nullptr ? (*q)[j] : 0.0);
  plan.forward();
  const double norm = 1.0 / static_cast<double>(g.size());
  SpectralScalarField a(g);
  SpectralScalarField b(g);
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (!g.retained(f) || !g.in_upper_half(f)) continue;
    const std::size_t c = g.conjugate(f);
    const Complex z = work[f] * norm;
    const Complex zc = std::conj(work[c] * norm);
    const Complex av = 0.5 * (z + zc);
    a[f] = av;
    a[c] = std::conj(av);
    if (q != nullptr) {
      const Complex bv = (z - zc) / Complex(0.0, 2.0);
      b[f] = bv;
      b[c] = std::conj(bv);
    }
  }
  return {std::move(a), std::move(b)};
}

inline SpectralScalarField to_spectral(const WavenumberGrid& g, const PhysicalField& p) {
  return to_spectral_pair(g, p, nullptr).first;
}

}  // namespace cascade
