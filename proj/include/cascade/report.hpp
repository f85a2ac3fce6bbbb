#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "cascade/config.hpp"
#include "cascade/diagnostics.hpp"
#include "cascade/format.hpp"

namespace cascade {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kSpectrumHeader = "kappa_lo,kappa_hi,energy,tracer";
inline constexpr const char* kFluxHeader = "kappa,theta_flux,enstrophy_flux,energy_flux,lower_bound,ratio,pass";

using Json = nlohmann::ordered_json;

/// Dyadic energy and tracer spectra of an averaged record.
inline void write_spectrum_csv(std::ostream& os, const DiagnosticsRecord& r) {
  os << kSpectrumHeader << '\n';
  for (std::size_t j = 0; j < r.energy_spectrum.size(); ++j) {
    os << format_double(r.energy_spectrum.kappa_lo(j)) << ',' << format_double(r.energy_spectrum.kappa_hi(j)) << ','
       << format_double(r.energy_spectrum.values[j]) << ',' << format_double(r.tracer_spectrum.values[j]) << '\n';
  }
}

/// Flux profile with the tracer bound check. Velocity fluxes are net
/// (forward - backward); `undefined` marks missing values and `out_of_band`
/// rows outside kappa_g^ < kappa <= kappa_theta.
inline void write_flux_csv(std::ostream& os, const DiagnosticsRecord& r, const FluxCheckReport& tracer) {
  os << kFluxHeader << '\n';
  const bool have_velocity = !r.flux.enstrophy_flux.empty();
  for (std::size_t i = 0; i < r.flux.ladder.size(); ++i) {
    const auto& row = tracer.rows.at(i);
    os << format_double(r.flux.ladder[i]) << ',' << format_double(r.flux.theta_flux[i]) << ','
       << (have_velocity ? format_double(r.flux.enstrophy_flux[i].net()) : std::string(kUndefined)) << ','
       << (have_velocity ? format_double(r.flux.energy_flux[i].net()) : std::string(kUndefined)) << ','
       << (r.indicators.kappa_theta ? format_double(row.lower_bound) : std::string(kUndefined)) << ','
       << (r.rates.chi > 0.0 ? format_double(row.ratio) : std::string(kUndefined)) << ','
       << (row.in_band ? (row.pass ? "true" : "false") : "out_of_band") << '\n';
  }
}

namespace detail {

inline Json quantity(std::optional<double> v, const char* unit) {
  Json q;
  q["value"] = v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
  q["unit"] = unit;
  return q;
}

inline Json check_json(const FluxCheckReport& rep) {
  Json j;
  j["tolerance"] = rep.tolerance;
  j["band_size"] = rep.band_size();
  j["all_pass"] = rep.all_pass();
  return j;
}

}  // namespace detail

/// Run bookkeeping reported next to the averages.
struct RunStats {
  std::size_t steps = 0;
  double max_courant = 0.0;
  std::size_t identity_checks = 0;
  double max_identity_residual = 0.0;
};

/// Checks derived from an averaged record and the run configuration.
struct RecordChecks {
  FluxCheckReport tracer;
  FluxCheckReport enstrophy;
  FluxCheckReport energy;
  double balance_residual = 0.0;
  std::optional<bool> kappa_order;  ///< kappa_tau <= kappa_sigma
  double keta_ceiling = 0.0;        ///< G^{1/3}
  std::optional<bool> keta_below_ceiling;
};

inline RecordChecks check_record(const DiagnosticsRecord& r, const SimulationConfig& c, double grashof_number) {
  RecordChecks k;
  k.tracer = tracer_flux_check(r, c.tracer_forcing.band_hi);
  k.enstrophy = enstrophy_flux_check(r, c.velocity_forcing.band_hi);
  k.energy = energy_flux_check(r, c.velocity_forcing.band_hi);
  k.balance_residual = steady_balance_check(r, c.tracer_forcing.band_hi);
  if (r.indicators.kappa_tau && r.indicators.kappa_sigma) {
    k.kappa_order = *r.indicators.kappa_tau <= *r.indicators.kappa_sigma;
  }
  k.keta_ceiling = std::cbrt(grashof_number);
  if (r.rates.eta > 0.0) k.keta_below_ceiling = r.dissipation.kappa_eta / c.kappa0() <= k.keta_ceiling;
  return k;
}

/// Every scalar of the record, each as {value, unit}; null marks undefined.
/// Units: "L" length, "T" time, "Q" tracer concentration.
inline Json summary_json(const DiagnosticsRecord& r, const SimulationConfig& c, double grashof_number,
                         const RecordChecks& checks, const RunStats* stats) {
  using detail::quantity;
  Json j;
  j["format"] = "cascade-summary-1";
  j["version"] = kVersion;
  j["grid"] = {{"dim", 2}, {"N", c.modes}, {"L", quantity(c.length, "L")}, {"kappa0", quantity(c.kappa0(), "L^-1")}};
  j["parameters"] = {{"nu", quantity(c.nu, "L^2 T^-1")},
                     {"mu", quantity(c.mu, "L^2 T^-1")},
                     {"schmidt", quantity(c.schmidt(), "1")},
                     {"grashof", quantity(grashof_number, "1")}};
  j["averaging"] = {{"samples", r.samples},
                    {"flux_samples", r.flux_samples},
                    {"t_first", quantity(r.t_first, "T")},
                    {"t_last", quantity(r.t_last, "T")},
                    {"t_span", quantity(r.t_span, "T")},
                    {"eddy_turnover_time", quantity(r.eddy_turnover_time, "T")},
                    {"turnovers", quantity(r.turnovers, "1")},
                    {"energy_trend", quantity(r.energy_trend, "1")}};
  j["norms"] = {{"velocity", quantity(r.norms.velocity, "L^4 T^-2")},
                {"velocity_grad", quantity(r.norms.velocity_grad, "L^2 T^-2")},
                {"velocity_lap", quantity(r.norms.velocity_lap, "T^-2")},
                {"tracer", quantity(r.norms.tracer, "Q^2 L^2")},
                {"tracer_grad", quantity(r.norms.tracer_grad, "Q^2")}};
  j["means"] = {{"energy", quantity(r.energy, "L^2 T^-2")},
                {"enstrophy", quantity(r.enstrophy, "T^-2")},
                {"tracer_variance", quantity(r.tracer_variance, "Q^2")}};
  j["rates"] = {{"epsilon", quantity(r.rates.epsilon, "L^2 T^-3")},
                {"eta", quantity(r.rates.eta, "T^-3")},
                {"chi", quantity(r.rates.chi, "Q^2 T^-1")}};
  j["indicators"] = {{"kappa_tau", quantity(r.indicators.kappa_tau, "L^-1")},
                     {"kappa_sigma", quantity(r.indicators.kappa_sigma, "L^-1")},
                     {"kappa_theta", quantity(r.indicators.kappa_theta, "L^-1")}};
  j["dissipation_wavenumbers"] = {{"kappa_eps", quantity(r.dissipation.kappa_eps, "L^-1")},
                                  {"kappa_eta", quantity(r.dissipation.kappa_eta, "L^-1")},
                                  {"kappa_beta", quantity(r.dissipation.kappa_beta, "L^-1")},
                                  {"kappa_beta_prime", quantity(r.dissipation.kappa_beta_prime, "L^-1")}};
  Json ch;
  ch["tracer_flux"] = detail::check_json(checks.tracer);
  ch["enstrophy_flux"] = detail::check_json(checks.enstrophy);
  ch["energy_flux"] = detail::check_json(checks.energy);
  ch["steady_balance_residual"] = quantity(checks.balance_residual, "1");
  ch["kappa_order"] = checks.kappa_order ? Json(*checks.kappa_order) : Json(nullptr);
  ch["keta_ceiling"] = quantity(checks.keta_ceiling, "1");
  ch["keta_below_ceiling"] = checks.keta_below_ceiling ? Json(*checks.keta_below_ceiling) : Json(nullptr);
  ch["stationary"] = r.energy_trend ? Json(std::abs(*r.energy_trend) <= 0.1) : Json(nullptr);
  j["checks"] = ch;
  if (stats != nullptr) {
    j["run"] = {{"steps", stats->steps},
                {"max_courant", quantity(stats->max_courant, "1")},
                {"identity_checks", stats->identity_checks},
                {"max_identity_residual", quantity(stats->max_identity_residual, "1")}};
  }
  return j;
}

}  // namespace cascade
