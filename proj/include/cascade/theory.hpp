#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

// Closed forms with every "~" taken as equality with unit constants.

/// Sum of a dyadic power law t_{k,2k} = alpha k^{-p} over [k1, k2):
/// alpha (k1^{-p} - k2^{-p}) for p > 0, alpha ln(k2/k1) for p = 0.
/// k2 may be infinite when p > 0.
inline double dyadic_sum(double alpha, double p, double k1, double k2) {
  if (!(p >= 0.0)) throw std::invalid_argument("dyadic_sum needs p >= 0");
  if (!(k1 > 0.0) || !(4.0 * k1 <= k2)) throw std::invalid_argument("dyadic_sum needs 0 < 4 k1 <= k2");
  if (p == 0.0) {
    if (std::isinf(k2)) throw std::invalid_argument("dyadic_sum with p = 0 diverges for infinite k2");
    return alpha * std::log(k2 / k1);
  }
  return alpha * (std::pow(k1, -p) - (std::isinf(k2) ? 0.0 : std::pow(k2, -p)));
}

// ---------------------------------------------------------------------------
// Classical spectra.
// ---------------------------------------------------------------------------

enum class CascadeDirection { forward, backward };

/// coefficient * kappa^exponent, with a symbolic form of the coefficient.
struct PowerLaw {
  double coefficient = 0.0;
  double exponent = 0.0;
  std::string symbol;

  double operator()(double kappa) const { return coefficient * std::pow(kappa, exponent); }
};

struct SpectraRow {
  PowerLaw energy_density;   ///< E(kappa)
  PowerLaw energy_dyadic;    ///< e_{kappa,2kappa}
  PowerLaw tracer_density;   ///< T(kappa)
  PowerLaw tracer_dyadic;    ///< t_{kappa,2kappa}
};

/// Rows of the classical table. Forward 3D and backward 2D follow
/// Kolmogorov scaling in eps; forward 2D follows Kraichnan scaling in eta.
inline SpectraRow classical_spectra(CascadeDirection dir, int dim, double epsilon, double eta, double chi) {
  const bool kolmogorov = (dir == CascadeDirection::forward && dim == 3) || (dir == CascadeDirection::backward && dim == 2);
  if (kolmogorov) {
    if (!(epsilon > 0.0) || !(chi >= 0.0)) throw std::invalid_argument("classical spectra need eps > 0, chi >= 0");
    const double e = std::cbrt(epsilon * epsilon);
    const double t = chi / std::cbrt(epsilon);
    return {{e, -5.0 / 3.0, "eps^(2/3)"},
            {e, -2.0 / 3.0, "eps^(2/3)"},
            {t, -5.0 / 3.0, "chi eps^(-1/3)"},
            {t, -2.0 / 3.0, "chi eps^(-1/3)"}};
  }
  if (dir == CascadeDirection::forward && dim == 2) {
    if (!(eta > 0.0) || !(chi >= 0.0)) throw std::invalid_argument("classical spectra need eta > 0, chi >= 0");
    const double e = std::cbrt(eta * eta);
    const double t = chi / std::cbrt(eta);
    return {{e, -3.0, "eta^(2/3)"}, {e, -2.0, "eta^(2/3)"}, {t, -1.0, "chi eta^(-1/3)"}, {t, 0.0, "chi eta^(-1/3)"}};
  }
  throw std::invalid_argument("no classical spectrum for this direction and dimension");
}

/// Tracer spectrum implied by E(kappa) = K kappa^{-n}: T = chi K^{-1/2} kappa^{(n-5)/2}.
inline PowerLaw tracer_spectrum_for_energy_slope(double K, double n, double chi) {
  if (!(K > 0.0)) throw std::invalid_argument("energy spectrum prefactor must be positive");
  return {chi / std::sqrt(K), 0.5 * (n - 5.0), "chi K^(-1/2)"};
}

// ---------------------------------------------------------------------------
// Estimates of kappa_theta^2.
// ---------------------------------------------------------------------------

/// Parts of a kappa_theta^2 estimate. Hypotheses that fail are listed in
/// `violations`; parts that are not mathematically defined stay empty.
struct TheoryResult {
  std::string branch;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> b_prime;
  std::optional<double> ktheta_sq;
  bool reversed_injection = false;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Wavenumbers for the 2D theorems.
struct Inputs2d {
  double kappa_eta = 0.0;
  double schmidt = 1.0;
  double kappa_g_hi = 0.0;  ///< top of the tracer forcing band
  double kappa_f_lo = 0.0;  ///< bottom of the velocity forcing band
  double kappa_f_hi = 0.0;  ///< top of the velocity forcing band

  double kappa_beta() const { return std::sqrt(schmidt) * kappa_eta; }
};

namespace detail {

inline void finish(TheoryResult& r) {
  const double a = r.a.value_or(0.0);
  const std::optional<double> b = r.b_prime ? r.b_prime : r.b;
  if (!b || !std::isfinite(a) || !std::isfinite(*b)) return;
  const double total = (r.reversed_injection ? 0.0 : a) + *b;
  if (total > 0.0) r.ktheta_sq = 1.0 / total;
}

}  // namespace detail

/// Large Schmidt number, two tracer ranges:
///   a = kb^{-4/3} Sc^{-1/3} (kg^^{-2/3} - kf_v^{-2/3}) ln(k_eta/kf^)^{-1/3},
///   b = kb^{-2} ln(kb/kf^),   kappa_theta^2 = 1/(a + b).
/// With reversed injection (kf^ < kg^) the a term is dropped.
inline TheoryResult ktheta_2d_large_sc(const Inputs2d& in) {
  TheoryResult r;
  r.branch = "2d_large_sc";
  const double kb = in.kappa_beta();
  r.reversed_injection = in.kappa_f_hi < in.kappa_g_hi;
  if (!(in.kappa_eta > 0.0) || !(in.schmidt > 0.0)) r.violations.push_back("kappa_eta and Sc must be positive");
  if (!(kb > in.kappa_f_hi)) r.violations.push_back("needs kappa_beta > kappa_f_hi");
  if (!r.reversed_injection) {
    if (!(in.kappa_g_hi < in.kappa_f_lo)) r.violations.push_back("needs kappa_g_hi < kappa_f_lo");
    if (!(in.kappa_eta > in.kappa_f_hi)) r.violations.push_back("needs kappa_eta > kappa_f_hi");
  }
  if (!r.reversed_injection && in.kappa_eta > in.kappa_f_hi && in.kappa_g_hi > 0.0 && in.kappa_f_lo > 0.0) {
    r.a = std::pow(kb, -4.0 / 3.0) * std::pow(in.schmidt, -1.0 / 3.0) *
          (std::pow(in.kappa_g_hi, -2.0 / 3.0) - std::pow(in.kappa_f_lo, -2.0 / 3.0)) *
          std::pow(std::log(in.kappa_eta / in.kappa_f_hi), -1.0 / 3.0);
  }
  if (kb > in.kappa_f_hi && in.kappa_f_hi > 0.0) r.b = std::log(kb / in.kappa_f_hi) / (kb * kb);
  detail::finish(r);
  return r;
}

/// Moderate Schmidt number. A single tracer range gives
/// kappa_theta^2 = k_eta^2 / ln(k_eta/kf^). With two ranges
/// (4 kg^ <= kf_v) the large-Sc form applies with kappa_beta = kappa_eta.
inline TheoryResult ktheta_2d_moderate(const Inputs2d& in) {
  if (in.kappa_g_hi > 0.0 && in.kappa_f_lo > 0.0 && 4.0 * in.kappa_g_hi <= in.kappa_f_lo) {
    Inputs2d same = in;
    same.schmidt = 1.0;
    auto r = ktheta_2d_large_sc(same);
    r.branch = "2d_moderate_two_range";
    return r;
  }
  TheoryResult r;
  r.branch = "2d_moderate";
  if (!(in.kappa_f_hi > 0.0) || !(in.kappa_eta > in.kappa_f_hi)) {
    r.violations.push_back("needs kappa_eta > kappa_f_hi > 0 (log argument must exceed 1)");
    return r;
  }
  r.b = std::log(in.kappa_eta / in.kappa_f_hi) / (in.kappa_eta * in.kappa_eta);
  detail::finish(r);
  return r;
}

/// Log-corrected enstrophy range: b' = k_eta^{-2} (ln k_eta/kf^)^{2/3}, and
/// kappa_theta^2 = 1/(a + b') with the large-Sc a when one is supplied.
inline TheoryResult ktheta_2d_log_corrected(double kappa_eta, double kappa_f_hi, std::optional<double> a = {}) {
  TheoryResult r;
  r.branch = "2d_log_corrected";
  if (!(kappa_f_hi > 0.0) || !(kappa_eta > kappa_f_hi)) {
    r.violations.push_back("needs kappa_eta > kappa_f_hi > 0 (log argument must exceed 1)");
    return r;
  }
  r.a = a;
  r.b_prime = std::pow(std::log(kappa_eta / kappa_f_hi), 2.0 / 3.0) / (kappa_eta * kappa_eta);
  detail::finish(r);
  return r;
}

/// Telescoped tracer variance of the log-corrected range,
/// t_{kf^, k_eta} = (chi/(mu k_eta^2)) (ln k_eta/kf^)^{2/3}, with k_eta = (eta/mu^3)^{1/6}.
struct LogCorrectedSum {
  double kappa_eta = 0.0;
  double variance = 0.0;
  double b_prime = 0.0;
};

inline LogCorrectedSum log_corrected_sum(double chi, double mu, double eta, double kappa_f_hi) {
  if (!(mu > 0.0) || !(eta > 0.0)) throw std::invalid_argument("log_corrected_sum needs mu, eta > 0");
  LogCorrectedSum s;
  s.kappa_eta = std::pow(eta / (mu * mu * mu), 1.0 / 6.0);
  if (!(s.kappa_eta > kappa_f_hi)) throw std::invalid_argument("log argument must exceed 1");
  const double lg = std::pow(std::log(s.kappa_eta / kappa_f_hi), 2.0 / 3.0);
  s.variance = chi / (mu * s.kappa_eta * s.kappa_eta) * lg;
  s.b_prime = lg / (s.kappa_eta * s.kappa_eta);
  return s;
}

/// Bound on every dyadic tracer bin implied by kappa_theta:
/// t_{k,2k} <= <|th|^2>/L^d = (kappa_beta/kappa_theta)^2 chi eta^{-1/3}.
inline double partial_converse_bound(double chi, double eta, double kappa_beta, double kappa_theta) {
  if (!(eta > 0.0) || !(kappa_theta > 0.0)) throw std::invalid_argument("partial converse needs eta, kappa_theta > 0");
  const double q = kappa_beta / kappa_theta;
  return q * q * chi / std::cbrt(eta);
}

/// Schmidt threshold for the large-Sc asymptotics in 2D.
struct Threshold2d {
  double exponent = 0.0;    ///< (3r - 4) / (12 - 6r)
  double threshold = 0.0;   ///< (zeta G)^exponent
  double gamma = 0.0;       ///< G (ln G)^{1/2}
  bool side_condition = false;  ///< gamma zeta^{-5} >= e
};

inline Threshold2d bigpr_condition_2d(double r, double G, double zeta) {
  if (!(r >= 4.0 / 3.0 && r < 2.0)) throw std::invalid_argument("r must lie in [4/3, 2)");
  if (!(G > 1.0)) throw std::invalid_argument("G must exceed 1");
  if (!(zeta >= 1.0)) throw std::invalid_argument("zeta must be >= 1");
  Threshold2d t;
  t.exponent = (3.0 * r - 4.0) / (12.0 - 6.0 * r);
  t.threshold = std::pow(zeta * G, t.exponent);
  t.gamma = G * std::sqrt(std::log(G));
  t.side_condition = t.gamma * std::pow(zeta, -5.0) >= std::numbers::e;
  return t;
}

/// kappa_theta^2 = kb^r k0^{2-r} / ln(kb/kf^), the large-Sc asymptotic form.
inline std::optional<double> ktheta_2d_asymptotic(double r, double kappa_beta, double kappa0, double kappa_f_hi) {
  if (!(kappa_beta > kappa_f_hi) || !(kappa_f_hi > 0.0)) return std::nullopt;
  return std::pow(kappa_beta, r) * std::pow(kappa0, 2.0 - r) / std::log(kappa_beta / kappa_f_hi);
}

/// phi_p(zeta) = (zeta - 6 ln zeta)^{4/3} / [zeta^{3p/2} e^{p zeta} (1 - zeta^{-2/3})];
/// phi_tilde uses power 1 on the numerator. Undefined unless zeta > 1 and
/// zeta - 6 ln zeta > 0.
inline std::optional<double> phi_general(double p, double zeta, double numerator_power) {
  if (!(zeta > 1.0) || !std::isfinite(zeta)) return std::nullopt;
  const double base = zeta - 6.0 * std::log(zeta);
  if (!(base > 0.0)) return std::nullopt;
  const double den = std::pow(zeta, 1.5 * p) * std::exp(p * zeta) * (1.0 - std::pow(zeta, -2.0 / 3.0));
  return std::pow(base, numerator_power) / den;
}

inline std::optional<double> phi(double p, double zeta) { return phi_general(p, zeta, 4.0 / 3.0); }
inline std::optional<double> phi_tilde(double p, double zeta) { return phi_general(p, zeta, 1.0); }

/// Index p = (3r - 4)/12 that pairs with the spectral exponent r.
inline double phi_index(double r) { return (3.0 * r - 4.0) / 12.0; }

// ---------------------------------------------------------------------------
// Grashof bounds on the dissipation wavenumbers (in units of kappa0).
// ---------------------------------------------------------------------------

/// One side of a scaling window. `exact` marks a plain inequality with no
/// hidden constant; otherwise the value holds up to an unknown factor.
struct ScalingBound {
  double value = 0.0;
  bool exact = false;
};

struct KetaBounds {
  ScalingBound lower;          ///< G^{1/6}
  ScalingBound upper;          ///< G^{1/3}, exact
  ScalingBound sharp_lower;    ///< zeta^{-1/4} G^{1/4} (ln G)^{-1/4}
  ScalingBound sharp_upper;    ///< zeta^{1/4} G^{1/4} (ln G)^{1/8}
};

inline KetaBounds keta_bounds(double G, double zeta) {
  if (!(G > std::numbers::e)) throw std::invalid_argument("keta_bounds needs G > e");
  if (!(zeta >= 1.0)) throw std::invalid_argument("keta_bounds needs zeta >= 1");
  const double lg = std::log(G);
  KetaBounds b;
  b.lower = {std::pow(G, 1.0 / 6.0), false};
  b.upper = {std::cbrt(G), true};
  b.sharp_lower = {std::pow(zeta, -0.25) * std::pow(G, 0.25) * std::pow(lg, -0.25), false};
  b.sharp_upper = {std::pow(zeta, 0.25) * std::pow(G, 0.25) * std::pow(lg, 0.125), false};
  return b;
}

struct KepsBounds {
  ScalingBound lower;        ///< zeta^{-5/8} G^{1/4}
  ScalingBound sharp_lower;  ///< zeta^{-11/16} G^{3/8}
  ScalingBound sharp_upper;  ///< zeta^{-1/8} G^{3/8}
  bool sharp_valid = false;  ///< G >= zeta^{3/2}
};

inline KepsBounds keps_bounds(double G, double zeta) {
  if (!(G > std::numbers::e)) throw std::invalid_argument("keps_bounds needs G > e");
  if (!(zeta >= 1.0)) throw std::invalid_argument("keps_bounds needs zeta >= 1");
  KepsBounds b;
  b.lower = {std::pow(zeta, -5.0 / 8.0) * std::pow(G, 0.25), false};
  b.sharp_lower = {std::pow(zeta, -11.0 / 16.0) * std::pow(G, 3.0 / 8.0), false};
  b.sharp_upper = {std::pow(zeta, -1.0 / 8.0) * std::pow(G, 3.0 / 8.0), false};
  b.sharp_valid = G >= std::pow(zeta, 1.5);
  return b;
}

// ---------------------------------------------------------------------------
// 3D.
// ---------------------------------------------------------------------------

struct Inputs3d {
  double kappa_eps = 0.0;
  double prandtl = 1.0;
  double kappa_g_hi = 0.0;
  double kappa0 = 1.0;

  double kappa_beta_prime() const { return std::sqrt(prandtl) * kappa_eps; }
};

/// a = kb'^{-4/3} Pr^{-1/3} (kg^^{-2/3} - k_eps^{-2/3}), b = kb'^{-2} ln Pr.
/// Pr > 2 gives 1/(a + b); otherwise the single steep range gives 1/a.
inline TheoryResult ktheta_3d(const Inputs3d& in) {
  TheoryResult r;
  const double kb = in.kappa_beta_prime();
  if (!(in.kappa_eps > 0.0) || !(in.prandtl > 0.0) || !(in.kappa_g_hi > 0.0)) {
    r.violations.push_back("kappa_eps, Pr and kappa_g_hi must be positive");
    return r;
  }
  if (!(4.0 * in.kappa_g_hi <= in.kappa_eps)) r.violations.push_back("needs 4 kappa_g_hi <= kappa_eps");
  r.a = std::pow(kb, -4.0 / 3.0) * std::pow(in.prandtl, -1.0 / 3.0) *
        (std::pow(in.kappa_g_hi, -2.0 / 3.0) - std::pow(in.kappa_eps, -2.0 / 3.0));
  if (in.prandtl > 2.0) {
    r.branch = "3d_large_sc";
    r.b = std::log(in.prandtl) / (kb * kb);
  } else {
    r.branch = "3d_moderate";
  }
  if (r.b) {
    detail::finish(r);
  } else if (*r.a > 0.0) {
    r.ktheta_sq = 1.0 / *r.a;
  }
  return r;
}

/// Pr threshold G^{(3r-4)/(8-4r)} for the 3D asymptotics.
inline double bigpr_condition_3d(double r, double G) {
  if (!(r >= 4.0 / 3.0 && r < 2.0)) throw std::invalid_argument("r must lie in [4/3, 2)");
  if (!(G > 1.0)) throw std::invalid_argument("G must exceed 1");
  return std::pow(G, (3.0 * r - 4.0) / (8.0 - 4.0 * r));
}

/// kappa_theta^2 = kb'^r k0^{2-r} / ln(kb'/k_eps).
inline std::optional<double> ktheta_3d_asymptotic(double r, double kappa_beta_prime, double kappa0, double kappa_eps) {
  if (!(kappa_beta_prime > kappa_eps) || !(kappa_eps > 0.0)) return std::nullopt;
  return std::pow(kappa_beta_prime, r) * std::pow(kappa0, 2.0 - r) / std::log(kappa_beta_prime / kappa_eps);
}

/// Tracer exponents for E(kappa) ~ eps^{2/3} k0^{p-5/3} kappa^{-p}.
struct Generalized3d {
  double p = 0.0;
  double q = 0.0;        ///< (p - 3)/2
  double q_prime = 0.0;  ///< (5 - 3p)/6
  /// Range-sum prefactor a = kb'^{-4/3} Sc^{-1/3} k0^{-2/3}, free of p.
  double a = 0.0;
  TheoryResult estimate;
};

inline Generalized3d generalized_3d(double p, const Inputs3d& in) {
  if (!(p > 1.0 && p < 3.0)) throw std::invalid_argument("energy slope p must lie in (1, 3)");
  Generalized3d g;
  g.p = p;
  g.q = 0.5 * (p - 3.0);
  g.q_prime = (5.0 - 3.0 * p) / 6.0;
  const double kb = in.kappa_beta_prime();
  g.a = std::pow(kb, -4.0 / 3.0) * std::pow(in.prandtl, -1.0 / 3.0) * std::pow(in.kappa0, -2.0 / 3.0);
  g.estimate.branch = "3d_generalized";
  g.estimate.a = g.a;
  if (in.prandtl > 2.0) g.estimate.b = std::log(in.prandtl) / (kb * kb);
  if (g.estimate.b) {
    detail::finish(g.estimate);
  } else {
    g.estimate.ktheta_sq = 1.0 / g.a;
  }
  return g;
}

}  // namespace cascade
