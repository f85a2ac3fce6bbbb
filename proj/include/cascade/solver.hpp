#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/forcing.hpp"
#include "cascade/spectral_ops.hpp"

namespace cascade {

/// Vorticity and tracer at time t.
struct SimState {
  double t = 0.0;
  SpectralScalarField omega;
  SpectralScalarField theta;
};

/// Raised when max|u| dt N / L exceeds the safety limit.
class CflError : public std::runtime_error {
 public:
  static constexpr double kLimit = 0.5;

  CflError(double t, double max_speed, double dt, double courant)
      : std::runtime_error(message(t, max_speed, dt, courant)),
        t_(t),
        max_speed_(max_speed),
        dt_(dt),
        courant_(courant) {}

  double time() const { return t_; }
  double max_speed() const { return max_speed_; }
  double dt() const { return dt_; }
  double courant() const { return courant_; }

 private:
  static std::string message(double t, double speed, double dt, double courant) {
    std::ostringstream os;
    os << "CFL violation at t=" << format_double(t) << ": max|u|=" << format_double(speed)
       << ", dt=" << format_double(dt) << ", courant=" << format_double(courant) << " > " << kLimit;
    return os.str();
  }

  double t_, max_speed_, dt_, courant_;
};

/// Raised when a step produces a non-finite coefficient.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a step needs that does not change in time.
struct Problem {
  SimulationConfig config;
  WavenumberGrid grid;
  ForcingFields forcing;
  std::vector<double> decay_nu;  ///< e^{-nu lambda_k dt}
  std::vector<double> decay_mu;  ///< e^{-mu lambda_k dt}

  Problem(SimulationConfig c, ForcingFields f)
      : config(std::move(c)), grid(f.tracer.grid()), forcing(std::move(f)) {
    config.validate();
    if (grid.dim() != 2 || grid.modes() != config.modes || grid.length() != config.length) {
      throw std::invalid_argument("forcing grid does not match configuration");
    }
    decay_nu.resize(grid.size());
    decay_mu.resize(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
      decay_nu[m] = std::exp(-config.nu * grid.eigenvalue(m) * config.dt);
      decay_mu[m] = std::exp(-config.mu * grid.eigenvalue(m) * config.dt);
    }
  }
};

inline WavenumberGrid grid_of(const SimulationConfig& config) { return WavenumberGrid(config.length, config.modes, 2); }

inline Problem make_problem(const SimulationConfig& config) {
  config.validate();
  const auto g = grid_of(config);
  return Problem(config, make_forcing(g, config));
}

/// Small band-limited vorticity noise from the seed; zero tracer.
inline SimState init_state(const SimulationConfig& config) {
  config.validate();
  const auto g = grid_of(config);
  const ForcingSpec noise{config.velocity_forcing.band_lo, config.velocity_forcing.band_hi, config.init_amp};
  const auto u0 = band_velocity(g, noise, config.seed, PhaseStream::initial_velocity);
  return {0.0, vorticity_of(u0), SpectralScalarField(g)};
}

/// max|u| dt N / L for a vorticity field.
inline double courant_number(const SpectralScalarField& omega, double dt) {
  const auto& g = omega.grid();
  double speed = 0.0;
  const auto u = velocity_from_vorticity(omega);
  const auto uphys = to_physical_pair(u.component(0), &u.component(1));
  for (std::size_t j = 0; j < g.size(); ++j) {
    speed = std::max(speed, std::hypot(uphys.first[j], uphys.second[j]));
  }
  return speed * dt * g.modes() / g.length();
}

namespace detail {

struct Tendencies {
  SpectralScalarField omega;
  SpectralScalarField theta;
};

// -u.grad(w) + curl f and -u.grad(theta) + g. The vorticity product never
// shares a transform with tracer data, so the velocity path is unaffected by
// the tracer bit for bit.
inline Tendencies tendencies(const SpectralScalarField& omega, const SpectralScalarField& theta,
                             const ForcingFields& forcing, double* max_speed) {
  const auto u = velocity_from_vorticity(omega);
  auto adv = advect_scalars(u, {&omega, &theta}, max_speed);
  Tendencies out{forcing.vorticity - adv[0], forcing.tracer - adv[1]};
  return out;
}

}  // namespace detail

/// One integrating-factor Heun step. With E = e^{-nu A dt} (e^{-mu A dt} for
/// the tracer) and N the explicit terms:
///   y* = E (y + dt N(y)),   y_{n+1} = E y + dt/2 (E N(y) + N(y*)).
/// Throws CflError before advancing when the Courant number exceeds 0.5.
inline SimState step(const SimState& s, const Problem& p, double* courant = nullptr) {
  const auto& g = p.grid;
  require_same_grid(g, s.omega.grid());
  require_same_grid(g, s.theta.grid());
  const double dt = p.config.dt;

  double speed = 0.0;
  const auto n0 = detail::tendencies(s.omega, s.theta, p.forcing, &speed);
  const double c = speed * dt * g.modes() / g.length();
  if (courant != nullptr) *courant = c;
  if (c > CflError::kLimit) throw CflError(s.t, speed, dt, c);

  SpectralScalarField w1(g), th1(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    w1[m] = p.decay_nu[m] * (s.omega[m] + dt * n0.omega[m]);
    th1[m] = p.decay_mu[m] * (s.theta[m] + dt * n0.theta[m]);
  }
  const auto n1 = detail::tendencies(w1, th1, p.forcing, nullptr);

  SimState out{s.t + dt, SpectralScalarField(g), SpectralScalarField(g)};
  const double h = 0.5 * dt;
  for (std::size_t m = 0; m < g.size(); ++m) {
    out.omega[m] = p.decay_nu[m] * s.omega[m] + h * (p.decay_nu[m] * n0.omega[m] + n1.omega[m]);
    out.theta[m] = p.decay_mu[m] * s.theta[m] + h * (p.decay_mu[m] * n0.theta[m] + n1.theta[m]);
  }
  if (!out.omega.all_finite() || !out.theta.all_finite()) {
    throw NumericalError("non-finite coefficient after step at t=" + format_double(s.t));
  }
  return out;
}

/// Convenience overload that rebuilds the forcing; prefer the Problem form in
/// loops.
inline SimState step(const SimState& s, const SimulationConfig& config) { return step(s, make_problem(config)); }

/// G = |f| / (nu^2 kappa0^{3 - d/2}).
inline double grashof(double forcing_norm, double nu, double kappa0, int dim) {
  if (!(nu > 0.0)) throw std::invalid_argument("grashof needs nu > 0");
  return forcing_norm / (nu * nu * std::pow(kappa0, 3.0 - 0.5 * dim));
}

inline double grashof(const Problem& p) {
  return grashof(std::sqrt(parseval_energy(p.forcing.velocity)), p.config.nu, p.grid.kappa0(), 2);
}

inline double grashof(const SimulationConfig& config) { return grashof(make_problem(config)); }

/// Discrete energy and tracer-variance budgets across one step:
///   r = [|q|^2(t+dt) - |q|^2(t)] / (2 dt) + D - W
/// with the dissipation D and forcing work W averaged over the two end
/// states by the trapezoid rule. Both residuals are O(dt^2) per unit time.
struct BudgetResidual {
  double tracer = 0.0;
  double energy = 0.0;
};

inline BudgetResidual instant_budget(const SimState& before, const SimState& after, const Problem& p) {
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw std::invalid_argument("instant_budget needs after.t > before.t");
  const auto u0 = velocity_from_vorticity(before.omega);
  const auto u1 = velocity_from_vorticity(after.omega);
  BudgetResidual r;
  r.tracer = (parseval_energy(after.theta) - parseval_energy(before.theta)) / (2.0 * dt) +
             p.config.mu * 0.5 * (gradient_norm2(before.theta) + gradient_norm2(after.theta)) -
             0.5 * (inner_product(p.forcing.tracer, before.theta) + inner_product(p.forcing.tracer, after.theta));
  r.energy = (parseval_energy(u1) - parseval_energy(u0)) / (2.0 * dt) +
             p.config.nu * 0.5 * (gradient_norm2(u0) + gradient_norm2(u1)) -
             0.5 * (inner_product(p.forcing.velocity, u0) + inner_product(p.forcing.velocity, u1));
  return r;
}

}  // namespace cascade
