#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/solver.hpp"
#include "cascade/spectral_ops.hpp"

namespace cascade {

// ---------------------------------------------------------------------------
// Flux functionals through a wavenumber kappa. Low and high parts follow
// shell_filter: f^< keeps kappa0 |k| < kappa, f^> keeps the rest.
// ---------------------------------------------------------------------------

/// Theta_kappa = (1/L^d) [ -(u^< . grad th^<, th^>) + (u^> . grad th^>, th^<) ].
inline double tracer_flux(const SpectralVelocityField& u, const SpectralScalarField& theta, double kappa) {
  require_same_grid(u.grid(), theta.grid());
  const auto ul = low_pass(u, kappa);
  const auto uh = high_pass(u, kappa);
  const auto tl = low_pass(theta, kappa);
  const auto th = high_pass(theta, kappa);
  const double a = inner_product(bilinear_advection(ul, tl), th);
  const double b = inner_product(bilinear_advection(uh, th), tl);
  return (-a + b) / u.grid().volume();
}

/// -(1/L^d) (u . grad th^<, th), the same quantity by skew-symmetry.
inline double tracer_flux_single(const SpectralVelocityField& u, const SpectralScalarField& theta, double kappa) {
  require_same_grid(u.grid(), theta.grid());
  const auto tl = low_pass(theta, kappa);
  return -inner_product(bilinear_advection(u, tl), theta) / u.grid().volume();
}

namespace detail {

/// Per-|k|^2 sums of w(m) over retained modes, indexed by norm2.
template <class Weight>
std::vector<double> shell_sums(const WavenumberGrid& g, Weight w) {
  const int cutoff = g.dealias_cutoff();
  std::vector<double> sums(static_cast<std::size_t>(cutoff * cutoff + 1), 0.0);
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (!g.retained(m)) continue;
    sums[static_cast<std::size_t>(g.norm2(m))] += w(m);
  }
  return sums;
}

/// sum over |k|^2 = n with kappa0 sqrt(n) < kappa, for each kappa of the ladder.
inline std::vector<double> below_each(const WavenumberGrid& g, const std::vector<double>& sums,
                                      const std::vector<double>& ladder) {
  std::vector<double> out;
  out.reserve(ladder.size());
  for (const double kappa : ladder) {
    double s = 0.0;
    for (std::size_t n = 0; n < sums.size(); ++n) {
      if (g.kappa0() * std::sqrt(static_cast<double>(n)) < kappa) s += sums[n];
    }
    out.push_back(s);
  }
  return out;
}

inline std::vector<double> at_or_above_each(const WavenumberGrid& g, const std::vector<double>& sums,
                                            const std::vector<double>& ladder) {
  std::vector<double> out;
  out.reserve(ladder.size());
  for (const double kappa : ladder) {
    double s = 0.0;
    for (std::size_t n = 0; n < sums.size(); ++n) {
      if (!(g.kappa0() * std::sqrt(static_cast<double>(n)) < kappa)) s += sums[n];
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Theta_kappa for every kappa of the ladder from one product:
/// Theta_kappa = (1/L^d) (u . grad th, th^<).
inline std::vector<double> tracer_flux_profile(const SpectralVelocityField& u, const SpectralScalarField& theta,
                                               const std::vector<double>& ladder) {
  const auto& g = theta.grid();
  const auto transfer = bilinear_advection(u, theta);
  const auto sums = detail::shell_sums(
      g, [&](std::size_t m) { return transfer[m].real() * theta[m].real() + transfer[m].imag() * theta[m].imag(); });
  return detail::below_each(g, sums, ladder);
}

/// (mu / L^d) |grad th^>|^2 for every kappa of the ladder.
inline std::vector<double> tracer_dissipation_tail(const SpectralScalarField& theta, double mu,
                                                   const std::vector<double>& ladder) {
  const auto& g = theta.grid();
  const auto sums = detail::shell_sums(g, [&](std::size_t m) { return mu * g.eigenvalue(m) * std::norm(theta[m]); });
  return detail::at_or_above_each(g, sums, ladder);
}

/// Transfer rates low to high (forward) and high to low (backward).
struct CascadeFlux {
  double forward = 0.0;
  double backward = 0.0;
  double net() const { return forward - backward; }
};

struct VelocityFlux {
  CascadeFlux enstrophy;
  CascadeFlux energy;
};

/// Definition form with the projected bilinear term:
///   E->  = -(1/L^d) (B(u^<,u^<), A u^>),   E<-  = -(1/L^d) (B(u^>,u^>), A u^<),
///   e->  = -(1/L^d) (B(u^<,u^<), u^>),     e<-  = -(1/L^d) (B(u^>,u^>), u^<).
inline VelocityFlux enstrophy_energy_flux(const SpectralVelocityField& u, double kappa) {
  const double vol = u.grid().volume();
  const auto ul = low_pass(u, kappa);
  const auto uh = high_pass(u, kappa);
  const auto bl = bilinear_advection(ul, ul);
  const auto bh = bilinear_advection(uh, uh);
  VelocityFlux f;
  f.enstrophy.forward = -inner_product(bl, apply_A_power(uh, 1.0)) / vol;
  f.enstrophy.backward = -inner_product(bh, apply_A_power(ul, 1.0)) / vol;
  f.energy.forward = -inner_product(bl, uh) / vol;
  f.energy.backward = -inner_product(bh, ul) / vol;
  return f;
}

/// 2D form on the vorticity: curl((u.grad)u) = u.grad w, so
///   E-> = -(1/L^2) (u^< . grad w^<, w^>),  e-> = -(1/L^2) (u^< . grad w^<, A^{-1} w^>).
inline VelocityFlux enstrophy_energy_flux_2d(const SpectralScalarField& omega, double kappa) {
  const double vol = omega.grid().volume();
  const auto wl = low_pass(omega, kappa);
  const auto wh = high_pass(omega, kappa);
  const auto nl = bilinear_advection(velocity_from_vorticity(wl), wl);
  const auto nh = bilinear_advection(velocity_from_vorticity(wh), wh);
  VelocityFlux f;
  f.enstrophy.forward = -inner_product(nl, wh) / vol;
  f.enstrophy.backward = -inner_product(nh, wl) / vol;
  f.energy.forward = -inner_product(nl, apply_A_power(wh, -1.0)) / vol;
  f.energy.backward = -inner_product(nh, apply_A_power(wl, -1.0)) / vol;
  return f;
}

/// kappa = m kappa0 for m = 1..cutoff, optionally capped at kappa_max.
inline std::vector<double> default_ladder(const WavenumberGrid& g, double kappa_max = kInfinity) {
  std::vector<double> ladder;
  for (int m = 1; m <= g.dealias_cutoff(); ++m) {
    const double kappa = g.kappa0() * m;
    if (kappa > kappa_max) break;
    ladder.push_back(kappa);
  }
  return ladder;
}

// ---------------------------------------------------------------------------
// Time averaging.
// ---------------------------------------------------------------------------

enum class Weighting { trapezoid, uniform };

/// Finite-time mean of a fixed-length vector of channels. Samples before
/// burn_in are ignored. Trapezoid weighting integrates between consecutive
/// sample times; uniform weighting gives every sample equal weight. Both
/// keep a running mean, so a constant stream averages to itself exactly.
class TimeAverager {
 public:
  explicit TimeAverager(double burn_in = 0.0, Weighting weighting = Weighting::trapezoid)
      : burn_in_(burn_in), weighting_(weighting) {}

  /// Returns false when the sample falls before burn_in.
  bool accumulate(double t, std::span<const double> values) {
    if (t < burn_in_) return false;
    if (count_ == 0) {
      mean_.assign(values.begin(), values.end());
      prev_.assign(values.begin(), values.end());
      t_first_ = t_last_ = t;
      count_ = 1;
      return true;
    }
    if (values.size() != mean_.size()) throw std::invalid_argument("sample length changed");
    if (weighting_ == Weighting::uniform) {
      ++count_;
      const double w = 1.0 / static_cast<double>(count_);
      for (std::size_t i = 0; i < mean_.size(); ++i) mean_[i] += w * (values[i] - mean_[i]);
    } else {
      const double dt = t - t_last_;
      if (!(dt > 0.0)) throw std::invalid_argument("trapezoid samples must have increasing times");
      weight_ += dt;
      const double w = dt / weight_;
      for (std::size_t i = 0; i < mean_.size(); ++i) {
        const double mid = 0.5 * (values[i] + prev_[i]);
        mean_[i] += w * (mid - mean_[i]);
      }
      prev_.assign(values.begin(), values.end());
      ++count_;
    }
    t_last_ = t;
    return true;
  }

  std::size_t sample_count() const { return count_; }
  double t_first() const { return t_first_; }
  double t_last() const { return t_last_; }
  double t_span() const { return t_last_ - t_first_; }
  double burn_in() const { return burn_in_; }
  Weighting weighting() const { return weighting_; }

  const std::vector<double>& mean() const {
    if (count_ == 0) throw std::logic_error("no samples after burn-in");
    return mean_;
  }

 private:
  double burn_in_;
  Weighting weighting_;
  std::size_t count_ = 0;
  double t_first_ = 0.0;
  double t_last_ = 0.0;
  double weight_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> prev_;
};

// ---------------------------------------------------------------------------
// Derived statistics.
// ---------------------------------------------------------------------------

struct DissipationRates {
  double epsilon = 0.0;
  double eta = 0.0;
  double chi = 0.0;
};

/// Time-averaged quadratic norms; all are raw Parseval quantities (no 1/L^d).
struct AveragedNorms {
  double velocity = 0.0;        ///< <|u|^2>
  double velocity_grad = 0.0;   ///< <||u||^2>
  double velocity_lap = 0.0;    ///< <|Au|^2>
  double tracer = 0.0;          ///< <|th|^2>
  double tracer_grad = 0.0;     ///< <||th||^2>
};

/// eps = nu/L^d <||u||^2>, eta = nu/L^d <|Au|^2>, chi = mu/L^d <|grad th|^2>.
inline DissipationRates dissipation_rates(const AveragedNorms& n, double nu, double mu, double volume) {
  return {nu * n.velocity_grad / volume, nu * n.velocity_lap / volume, mu * n.tracer_grad / volume};
}

struct IndicatorWavenumbers {
  std::optional<double> kappa_tau;
  std::optional<double> kappa_sigma;
  std::optional<double> kappa_theta;
};

/// Rayleigh-quotient wavenumbers; undefined when the denominator vanishes.
inline IndicatorWavenumbers indicator_wavenumbers(const AveragedNorms& n) {
  auto quotient = [](double num, double den) -> std::optional<double> {
    if (!(den > 0.0)) return std::nullopt;
    return std::sqrt(num / den);
  };
  return {quotient(n.velocity_grad, n.velocity), quotient(n.velocity_lap, n.velocity_grad),
          quotient(n.tracer_grad, n.tracer)};
}

struct DissipationWavenumbers {
  double kappa_eps = 0.0;
  double kappa_eta = 0.0;
  double kappa_beta = 0.0;
  double kappa_beta_prime = 0.0;
};

/// kappa_eps = (eps/nu^3)^{1/4}, kappa_eta = (eta/nu^3)^{1/6},
/// kappa_beta = Sc^{1/2} kappa_eta = (eta/mu^3)^{1/6},
/// kappa_beta' = Pr^{1/2} kappa_eps = (eps/(nu mu^2))^{1/4}.
inline DissipationWavenumbers dissipation_wavenumbers(const DissipationRates& r, double nu, double mu) {
  if (!(nu > 0.0) || !(mu > 0.0)) throw std::invalid_argument("dissipation_wavenumbers needs nu, mu > 0");
  if (r.epsilon < 0.0 || r.eta < 0.0) throw std::invalid_argument("dissipation rates must be non-negative");
  DissipationWavenumbers w;
  w.kappa_eps = std::pow(r.epsilon / (nu * nu * nu), 0.25);
  w.kappa_eta = std::pow(r.eta / (nu * nu * nu), 1.0 / 6.0);
  const double sc_half = std::sqrt(nu / mu);
  w.kappa_beta = sc_half * w.kappa_eta;
  w.kappa_beta_prime = sc_half * w.kappa_eps;
  return w;
}

/// Averages over a kappa ladder. Velocity parts may be empty when they were
/// not sampled.
struct FluxProfile {
  std::vector<double> ladder;
  std::vector<double> theta_flux;
  std::vector<double> tracer_tail;  ///< (mu/L^d) <|grad th^>|^2>
  std::vector<CascadeFlux> enstrophy_flux;
  std::vector<CascadeFlux> energy_flux;
};

struct DiagnosticsRecord {
  std::size_t samples = 0;
  std::size_t flux_samples = 0;
  double t_first = 0.0;
  double t_last = 0.0;
  double t_span = 0.0;
  AveragedNorms norms;
  double energy = 0.0;           ///< e = <|u|^2>/L^d
  double enstrophy = 0.0;        ///< E = <||u||^2>/L^d
  double tracer_variance = 0.0;  ///< <|th|^2>/L^d
  DissipationRates rates;
  IndicatorWavenumbers indicators;
  DissipationWavenumbers dissipation;
  SpectrumTable energy_spectrum;
  SpectrumTable tracer_spectrum;
  FluxProfile flux;
  /// 1/sqrt(E), the eddy turnover time of the enstrophy-bearing scales.
  std::optional<double> eddy_turnover_time;
  std::optional<double> turnovers;
  /// (|u|^2 at last sample - at first sample) / <|u|^2>.
  std::optional<double> energy_trend;
};

/// Collects post-burn-in samples of a run or a snapshot ensemble.
class DiagnosticsAccumulator {
 public:
  DiagnosticsAccumulator(const WavenumberGrid& grid, double nu, double mu, std::vector<double> ladder,
                         double burn_in, Weighting weighting)
      : grid_(grid),
        nu_(nu),
        mu_(mu),
        ladder_(std::move(ladder)),
        energy_layout_(SpectrumTable::layout_for(grid, Binning::dyadic)),
        scalars_(burn_in, weighting),
        velocity_flux_(burn_in, weighting) {}

  const std::vector<double>& ladder() const { return ladder_; }

  /// Norms, spectra and the tracer flux profile of one snapshot, in the
  /// channel layout the accumulator averages.
  std::vector<double> scalar_channels(const SpectralScalarField& omega, const SpectralScalarField& theta) const {
    const auto u = velocity_from_vorticity(omega);
    std::vector<double> v;
    v.reserve(5 + 2 * energy_layout_.size() + 2 * ladder_.size());
    v.push_back(parseval_energy(u));
    v.push_back(parseval_energy(omega));
    v.push_back(gradient_norm2(omega));
    v.push_back(parseval_energy(theta));
    v.push_back(gradient_norm2(theta));
    for (const double x : dyadic_spectrum(u).values) v.push_back(x);
    for (const double x : dyadic_spectrum(theta).values) v.push_back(x);
    for (const double x : tracer_flux_profile(u, theta, ladder_)) v.push_back(x);
    for (const double x : tracer_dissipation_tail(theta, mu_, ladder_)) v.push_back(x);
    return v;
  }

  /// Enstrophy and energy flux parts over the ladder; costs two products per
  /// ladder entry.
  std::vector<double> velocity_channels(const SpectralScalarField& omega) const {
    std::vector<double> v;
    v.reserve(4 * ladder_.size());
    for (const double kappa : ladder_) {
      const auto f = enstrophy_energy_flux_2d(omega, kappa);
      v.insert(v.end(), {f.enstrophy.forward, f.enstrophy.backward, f.energy.forward, f.energy.backward});
    }
    return v;
  }

  bool accumulate_scalars(double t, const std::vector<double>& v) {
    if (!scalars_.accumulate(t, v)) return false;
    if (!first_energy_) first_energy_ = v[0];
    last_energy_ = v[0];
    return true;
  }

  bool accumulate_velocity(double t, const std::vector<double>& v) { return velocity_flux_.accumulate(t, v); }

  bool accumulate(double t, const SpectralScalarField& omega, const SpectralScalarField& theta) {
    if (t < scalars_.burn_in()) return false;
    return accumulate_scalars(t, scalar_channels(omega, theta));
  }

  bool accumulate(const SimState& s) { return accumulate(s.t, s.omega, s.theta); }

  bool accumulate_velocity_flux(double t, const SpectralScalarField& omega) {
    if (t < velocity_flux_.burn_in()) return false;
    return accumulate_velocity(t, velocity_channels(omega));
  }

  std::size_t sample_count() const { return scalars_.sample_count(); }

  DiagnosticsRecord record() const {
    const auto& m = scalars_.mean();
    DiagnosticsRecord r;
    r.samples = scalars_.sample_count();
    r.flux_samples = velocity_flux_.sample_count();
    r.t_first = scalars_.t_first();
    r.t_last = scalars_.t_last();
    r.t_span = scalars_.t_span();
    r.norms = {m[0], m[1], m[2], m[3], m[4]};
    const double vol = grid_.volume();
    r.energy = m[0] / vol;
    r.enstrophy = m[1] / vol;
    r.tracer_variance = m[3] / vol;
    r.rates = dissipation_rates(r.norms, nu_, mu_, vol);
    r.indicators = indicator_wavenumbers(r.norms);
    r.dissipation = dissipation_wavenumbers(r.rates, nu_, mu_);

    std::size_t at = 5;
    const std::size_t nb = energy_layout_.size();
    r.energy_spectrum = energy_layout_;
    r.tracer_spectrum = energy_layout_;
    std::copy_n(m.begin() + static_cast<std::ptrdiff_t>(at), nb, r.energy_spectrum.values.begin());
    at += nb;
    std::copy_n(m.begin() + static_cast<std::ptrdiff_t>(at), nb, r.tracer_spectrum.values.begin());
    at += nb;
    r.flux.ladder = ladder_;
    r.flux.theta_flux.assign(m.begin() + static_cast<std::ptrdiff_t>(at),
                             m.begin() + static_cast<std::ptrdiff_t>(at + ladder_.size()));
    at += ladder_.size();
    r.flux.tracer_tail.assign(m.begin() + static_cast<std::ptrdiff_t>(at),
                              m.begin() + static_cast<std::ptrdiff_t>(at + ladder_.size()));
    if (velocity_flux_.sample_count() > 0) {
      const auto& f = velocity_flux_.mean();
      for (std::size_t i = 0; i < ladder_.size(); ++i) {
        r.flux.enstrophy_flux.push_back({f[4 * i], f[4 * i + 1]});
        r.flux.energy_flux.push_back({f[4 * i + 2], f[4 * i + 3]});
      }
    }
    if (r.enstrophy > 0.0) {
      r.eddy_turnover_time = 1.0 / std::sqrt(r.enstrophy);
      r.turnovers = r.t_span / *r.eddy_turnover_time;
    }
    if (m[0] > 0.0 && first_energy_) r.energy_trend = (last_energy_ - *first_energy_) / m[0];
    return r;
  }

 private:
  WavenumberGrid grid_;
  double nu_;
  double mu_;
  std::vector<double> ladder_;
  SpectrumTable energy_layout_;
  TimeAverager scalars_;
  TimeAverager velocity_flux_;
  std::optional<double> first_energy_;
  double last_energy_ = 0.0;
};

// ---------------------------------------------------------------------------
// Checks against the rigorous flux inequalities.
// ---------------------------------------------------------------------------

inline constexpr double kDefaultStatTolerance = 0.05;

struct FluxCheckRow {
  double kappa = 0.0;
  double ratio = 0.0;        ///< <flux> / rate
  double lower_bound = 0.0;  ///< 1 - (kappa / kappa_indicator)^2
  bool in_band = false;
  bool pass = true;
};

struct FluxCheckReport {
  std::vector<FluxCheckRow> rows;
  double tolerance = kDefaultStatTolerance;
  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const FluxCheckRow& r) { return r.pass; });
  }
  std::size_t band_size() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.in_band; }));
  }
};

/// 1 - (kappa/kappa_ind)^2 - tol <= <flux>/rate <= 1 + tol on the band
/// band_lo < kappa <= kappa_ind (band_lo inclusive when `inclusive_lo`).
inline FluxCheckReport flux_bound_check(const std::vector<double>& ladder, const std::vector<double>& flux, double rate,
                                        std::optional<double> kappa_ind, double band_lo,
                                        double tol = kDefaultStatTolerance, bool inclusive_lo = false) {
  if (ladder.size() != flux.size()) throw std::invalid_argument("ladder and flux sizes differ");
  FluxCheckReport rep;
  rep.tolerance = tol;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    FluxCheckRow row;
    row.kappa = ladder[i];
    row.ratio = rate > 0.0 ? flux[i] / rate : 0.0;
    if (kappa_ind) {
      const double q = row.kappa / *kappa_ind;
      row.lower_bound = 1.0 - q * q;
      const bool above = inclusive_lo ? row.kappa >= band_lo : row.kappa > band_lo;
      row.in_band = rate > 0.0 && above && row.kappa <= *kappa_ind;
    }
    if (row.in_band) row.pass = row.ratio >= row.lower_bound - tol && row.ratio <= 1.0 + tol;
    rep.rows.push_back(row);
  }
  return rep;
}

/// Tracer inequality: band kappa_g^ < kappa <= kappa_theta, rate chi.
inline FluxCheckReport tracer_flux_check(const DiagnosticsRecord& r, double kappa_g_hi,
                                         double tol = kDefaultStatTolerance) {
  return flux_bound_check(r.flux.ladder, r.flux.theta_flux, r.rates.chi, r.indicators.kappa_theta, kappa_g_hi, tol);
}

namespace detail {
inline std::vector<double> nets(const std::vector<CascadeFlux>& f) {
  std::vector<double> out;
  for (const auto& x : f) out.push_back(x.net());
  return out;
}
}  // namespace detail

/// Enstrophy inequality: band kappa_f^ <= kappa <= kappa_sigma, rate eta.
inline FluxCheckReport enstrophy_flux_check(const DiagnosticsRecord& r, double kappa_f_hi,
                                            double tol = kDefaultStatTolerance) {
  if (r.flux.enstrophy_flux.empty()) return {};
  return flux_bound_check(r.flux.ladder, detail::nets(r.flux.enstrophy_flux), r.rates.eta, r.indicators.kappa_sigma,
                          kappa_f_hi, tol, true);
}

/// Energy inequality: band kappa_f^ <= kappa <= kappa_tau, rate eps.
inline FluxCheckReport energy_flux_check(const DiagnosticsRecord& r, double kappa_f_hi,
                                         double tol = kDefaultStatTolerance) {
  if (r.flux.energy_flux.empty()) return {};
  return flux_bound_check(r.flux.ladder, detail::nets(r.flux.energy_flux), r.rates.epsilon, r.indicators.kappa_tau,
                          kappa_f_hi, tol, true);
}

/// |(mu/L^d)<|grad th^>|^2> - <Theta_kappa>| / chi at ladder index i.
inline double steady_balance_residual(const DiagnosticsRecord& r, std::size_t i) {
  if (!(r.rates.chi > 0.0)) return 0.0;
  return std::abs(r.flux.tracer_tail.at(i) - r.flux.theta_flux.at(i)) / r.rates.chi;
}

/// Largest balance residual over ladder points above kappa_g^.
inline double steady_balance_check(const DiagnosticsRecord& r, double kappa_g_hi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < r.flux.ladder.size(); ++i) {
    if (r.flux.ladder[i] > kappa_g_hi) worst = std::max(worst, steady_balance_residual(r, i));
  }
  return worst;
}

}  // namespace cascade
