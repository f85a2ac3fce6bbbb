#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cascade/diagnostics.hpp"
#include "oracle.hpp"

using namespace cascade;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> one(double x) { return {x}; }

}  // namespace

TEST(TimeAverager, ConstantStreamIsExact) {
  for (const auto w : {Weighting::trapezoid, Weighting::uniform}) {
    TimeAverager avg(1.0, w);
    for (int i = 0; i < 37; ++i) avg.accumulate(0.1 * i, std::vector<double>{0.3, -7.0});
    EXPECT_EQ(avg.mean()[0], 0.3);
    EXPECT_EQ(avg.mean()[1], -7.0);
    EXPECT_EQ(avg.sample_count(), 27u);
    EXPECT_NEAR(avg.t_first(), 1.0, 1e-12);
  }
}

TEST(TimeAverager, AlternatingValuesAverageToMidpoint) {
  TimeAverager avg(0.0, Weighting::uniform);
  for (int i = 0; i < 10; ++i) avg.accumulate(i, one(i % 2 ? 3.0 : 1.0));
  EXPECT_DOUBLE_EQ(avg.mean()[0], 2.0);
}

TEST(TimeAverager, TrapezoidIsSecondOrderForExponential) {
  auto err = [](double dt) {
    TimeAverager avg(0.0, Weighting::trapezoid);
    const int n = static_cast<int>(std::lround(2.0 / dt));
    for (int i = 0; i <= n; ++i) avg.accumulate(i * dt, one(std::exp(-1.5 * i * dt)));
    const double exact = (1.0 - std::exp(-3.0)) / (1.5 * 2.0);
    return std::abs(avg.mean()[0] - exact);
  };
  EXPECT_NEAR(err(0.02) / err(0.01), 4.0, 0.05);
}

TEST(TimeAverager, NoSamplesBeforeBurnIn) {
  TimeAverager avg(5.0, Weighting::uniform);
  EXPECT_FALSE(avg.accumulate(1.0, one(1.0)));
  EXPECT_EQ(avg.sample_count(), 0u);
  EXPECT_THROW(avg.mean(), std::logic_error);
}

TEST(Rates, ZeroAndSingleMode) {
  const auto z = dissipation_rates({}, 0.1, 0.2, 1.0);
  EXPECT_EQ(z.epsilon, 0.0);
  EXPECT_EQ(z.eta, 0.0);
  EXPECT_EQ(z.chi, 0.0);

  // Single velocity mode |k| = 1 on L = pi (kappa0 = 2) with total |u_k|^2 = S.
  const WavenumberGrid g(std::numbers::pi, 16, 2);
  SpectralScalarField w(g);
  w.set_mode({1, 0, 0}, Complex(0.7, 0.1));
  const auto u = velocity_from_vorticity(w);
  double S = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (const auto& x : u.component(c).coeffs()) S += std::norm(x);
  }
  const AveragedNorms n{parseval_energy(u), gradient_norm2(u), laplacian_norm2(u), 0.0, 0.0};
  const double nu = 0.01;
  const auto r = dissipation_rates(n, nu, 1.0, g.volume());
  EXPECT_NEAR(r.epsilon, nu * 4.0 * S, 1e-15);
  EXPECT_NEAR(r.eta, nu * 16.0 * S, 1e-15);
}

TEST(Rates, EtaOverEpsilonAtLeastKappa0Squared) {
  const WavenumberGrid g(3.0, 32, 2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = velocity_from_vorticity(oracle::random_scalar(g, seed));
    const AveragedNorms n{parseval_energy(u), gradient_norm2(u), laplacian_norm2(u), 0.0, 0.0};
    const auto r = dissipation_rates(n, 0.1, 0.1, g.volume());
    EXPECT_GE(r.eta / r.epsilon, g.kappa0() * g.kappa0());
  }
}

TEST(Indicators, EigenmodeAndTwoModeQuotients) {
  const WavenumberGrid g(std::numbers::pi, 16, 2);  // kappa0 = 2
  SpectralScalarField w(g);
  w.set_mode({3, 0, 0}, Complex(1.0, 0.0));
  const auto u = velocity_from_vorticity(w);
  SpectralScalarField th(g);
  th.set_mode({1, 0, 0}, Complex(1.0, 0.0));
  th.set_mode({0, 2, 0}, Complex(0.0, 1.0));
  const AveragedNorms n{parseval_energy(u), gradient_norm2(u), laplacian_norm2(u), parseval_energy(th),
                        gradient_norm2(th)};
  const auto k = indicator_wavenumbers(n);
  EXPECT_NEAR(*k.kappa_tau, 6.0, 1e-12);
  EXPECT_NEAR(*k.kappa_sigma, 6.0, 1e-12);
  EXPECT_NEAR(*k.kappa_theta * *k.kappa_theta, 2.5 * 4.0, 1e-12);

  const auto none = indicator_wavenumbers({});
  EXPECT_FALSE(none.kappa_tau);
  EXPECT_FALSE(none.kappa_sigma);
  EXPECT_FALSE(none.kappa_theta);
}

TEST(Indicators, TauNeverExceedsSigma) {
  const WavenumberGrid g(kTwoPi, 32, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto u = velocity_from_vorticity(oracle::random_scalar(g, seed, 0.5 + 0.1 * seed));
    const AveragedNorms n{parseval_energy(u), gradient_norm2(u), laplacian_norm2(u), 0.0, 0.0};
    const auto k = indicator_wavenumbers(n);
    EXPECT_LE(*k.kappa_tau, *k.kappa_sigma);
  }
}

TEST(DissipationWavenumbers, Definitions) {
  const double nu = 0.3, mu = 0.03;
  const auto w = dissipation_wavenumbers({0.8, nu * nu * nu, 0.1}, nu, mu);
  EXPECT_NEAR(w.kappa_eta, 1.0, 1e-15);
  EXPECT_NEAR(w.kappa_beta / w.kappa_eta, std::sqrt(nu / mu), 1e-14);
  EXPECT_NEAR(w.kappa_beta_prime / w.kappa_eps, std::sqrt(nu / mu), 1e-14);
  EXPECT_NEAR(w.kappa_eps, std::pow(0.8 / (nu * nu * nu), 0.25), 1e-14);
}

TEST(TracerFlux, VanishesWhenTracerIsOnOneSide) {
  const WavenumberGrid g(kTwoPi, 32, 2);
  const auto u = oracle::random_velocity(g, 1);
  const auto th = oracle::random_scalar(g, 2);
  EXPECT_EQ(tracer_flux(u, low_pass(th, 4.0), 4.0), 0.0);
  EXPECT_EQ(tracer_flux(u, high_pass(th, 4.0), 4.0), 0.0);
}

TEST(TracerFlux, ResonantTriadClosedForm) {
  for (const double L : {kTwoPi, std::numbers::pi}) {
    const WavenumberGrid g(L, 16, 2);
    const double k0 = g.kappa0();
    const Complex a(0.7, 0.2), t2(0.3, -0.5), t3(-0.4, 0.1);
    SpectralVelocityField u(g);
    u.component(1).set_mode({3, 0, 0}, a);  // perpendicular to k1 = (3, 0)
    SpectralScalarField th(g);
    th.set_mode({1, 1, 0}, t2);
    th.set_mode({4, 1, 0}, t3);
    const double expected = -2.0 * (Complex(0.0, k0) * a * t2 * std::conj(t3)).real();
    const double kappa = 2.0 * k0;
    EXPECT_NEAR(tracer_flux(u, th, kappa), expected, 1e-14);
    EXPECT_NEAR(tracer_flux_single(u, th, kappa), expected, 1e-14);
    EXPECT_NEAR(tracer_flux_profile(u, th, {kappa})[0], expected, 1e-14);
  }
}

TEST(TracerFlux, AllFormsAgreeWithConvolutionOracle) {
  const WavenumberGrid g(2.0, 16, 2);
  const auto u = oracle::random_velocity(g, 3);
  const auto th = oracle::random_scalar(g, 4);
  const auto ladder = default_ladder(g);
  const auto profile = tracer_flux_profile(u, th, ladder);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double ref = oracle::direct_tracer_flux(u, th, ladder[i]);
    EXPECT_LT(oracle::rel(tracer_flux(u, th, ladder[i]), ref), 1e-10);
    EXPECT_LT(oracle::rel(tracer_flux_single(u, th, ladder[i]), ref), 1e-10);
    EXPECT_LT(oracle::rel(profile[i], ref), 1e-10);
  }
}

TEST(TracerFlux, ThreeDimensional) {
  const WavenumberGrid g(1.0, 16, 3);
  const auto u = oracle::random_velocity(g, 5);
  const auto th = oracle::random_scalar(g, 6);
  for (const double m : {1.0, 2.0, 3.5}) {
    const double kappa = m * g.kappa0();
    EXPECT_LT(oracle::rel(tracer_flux(u, th, kappa), oracle::direct_tracer_flux(u, th, kappa)), 1e-10);
  }
}

TEST(TracerTail, NonincreasingAndMatchesDefinition) {
  const WavenumberGrid g(kTwoPi, 32, 2);
  const auto th = oracle::random_scalar(g, 9);
  const auto ladder = default_ladder(g);
  const auto tail = tracer_dissipation_tail(th, 0.01, ladder);
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) EXPECT_GE(tail[i], tail[i + 1]);
  for (std::size_t i = 0; i < ladder.size(); i += 3) {
    EXPECT_LT(oracle::rel(tail[i], 0.01 * gradient_norm2(high_pass(th, ladder[i])) / g.volume()), 1e-12);
  }
}

TEST(VelocityFlux, MatchesConvolutionOracle2d) {
  const WavenumberGrid g(kTwoPi, 16, 2);
  const auto w = oracle::random_scalar(g, 13);
  const auto u = velocity_from_vorticity(w);
  for (const double kappa : {1.5, 2.0, 3.0, 4.0}) {
    const auto ref = oracle::direct_velocity_flux(u, kappa);
    const auto vec = enstrophy_energy_flux(u, kappa);
    const auto fast = enstrophy_energy_flux_2d(w, kappa);
    for (const auto& f : {vec, fast}) {
      EXPECT_LT(oracle::rel(f.enstrophy.forward, ref.enstrophy_forward), 1e-10);
      EXPECT_LT(oracle::rel(f.enstrophy.backward, ref.enstrophy_backward), 1e-10);
      EXPECT_LT(oracle::rel(f.energy.forward, ref.energy_forward), 1e-10);
      EXPECT_LT(oracle::rel(f.energy.backward, ref.energy_backward), 1e-10);
      EXPECT_EQ(f.enstrophy.net(), f.enstrophy.forward - f.enstrophy.backward);
    }
  }
}

TEST(VelocityFlux, MatchesConvolutionOracle3d) {
  const WavenumberGrid g(1.0, 16, 3);
  const auto u = oracle::random_velocity(g, 17);
  const double kappa = 2.5 * g.kappa0();
  const auto ref = oracle::direct_velocity_flux(u, kappa);
  const auto f = enstrophy_energy_flux(u, kappa);
  EXPECT_LT(oracle::rel(f.enstrophy.forward, ref.enstrophy_forward), 1e-10);
  EXPECT_LT(oracle::rel(f.enstrophy.backward, ref.enstrophy_backward), 1e-10);
  EXPECT_LT(oracle::rel(f.energy.forward, ref.energy_forward), 1e-10);
  EXPECT_LT(oracle::rel(f.energy.backward, ref.energy_backward), 1e-10);
}

TEST(VelocityFlux, OneSidedFieldsTransferNothing) {
  const WavenumberGrid g(kTwoPi, 32, 2);
  const auto w = oracle::random_scalar(g, 3);
  const auto low = enstrophy_energy_flux_2d(shell_filter(w, 0.0, 4.0), 6.0);
  EXPECT_EQ(low.enstrophy.forward, 0.0);
  EXPECT_EQ(low.enstrophy.backward, 0.0);
  EXPECT_EQ(low.energy.net(), 0.0);
  const auto high = enstrophy_energy_flux_2d(high_pass(w, 6.0), 6.0);
  EXPECT_EQ(high.enstrophy.forward, 0.0);
  EXPECT_EQ(high.energy.forward, 0.0);
}

TEST(Ladder, DefaultAndCapped) {
  const WavenumberGrid g(std::numbers::pi, 32, 2);
  const auto l = default_ladder(g);
  ASSERT_EQ(l.size(), 10u);
  EXPECT_DOUBLE_EQ(l.front(), 2.0);
  EXPECT_DOUBLE_EQ(l.back(), 20.0);
  EXPECT_EQ(default_ladder(g, 7.0).size(), 3u);
}

TEST(Accumulator, SingleSnapshotEqualsInstantaneousValues) {
  const WavenumberGrid g(kTwoPi, 32, 2);
  const auto w = oracle::random_scalar(g, 1);
  const auto th = oracle::random_scalar(g, 2);
  const auto ladder = default_ladder(g);
  DiagnosticsAccumulator acc(g, 0.01, 0.02, ladder, 0.0, Weighting::uniform);
  acc.accumulate(3.0, w, th);
  acc.accumulate_velocity_flux(3.0, w);
  const auto r = acc.record();
  const auto u = velocity_from_vorticity(w);
  EXPECT_EQ(r.samples, 1u);
  EXPECT_EQ(r.t_span, 0.0);
  EXPECT_DOUBLE_EQ(r.energy, parseval_energy(u) / g.volume());
  EXPECT_DOUBLE_EQ(r.rates.chi, 0.02 * gradient_norm2(th) / g.volume());
  EXPECT_EQ(r.flux.theta_flux, tracer_flux_profile(u, th, ladder));
  EXPECT_EQ(r.tracer_spectrum.values, dyadic_spectrum(th).values);
  EXPECT_DOUBLE_EQ(r.flux.enstrophy_flux[2].forward, enstrophy_energy_flux_2d(w, ladder[2]).enstrophy.forward);
  EXPECT_LT(oracle::rel(r.dissipation.kappa_beta / r.dissipation.kappa_eta, std::sqrt(0.5)), 1e-14);
}

TEST(Accumulator, SharedLadderPointsAgree) {
  const WavenumberGrid g(kTwoPi, 32, 2);
  const auto w = oracle::random_scalar(g, 5);
  const auto th = oracle::random_scalar(g, 6);
  DiagnosticsAccumulator full(g, 0.01, 0.01, default_ladder(g), 0.0, Weighting::uniform);
  DiagnosticsAccumulator sparse(g, 0.01, 0.01, {3.0, 7.0}, 0.0, Weighting::uniform);
  full.accumulate(0.0, w, th);
  sparse.accumulate(0.0, w, th);
  EXPECT_EQ(full.record().flux.theta_flux[2], sparse.record().flux.theta_flux[0]);
  EXPECT_EQ(full.record().flux.theta_flux[6], sparse.record().flux.theta_flux[1]);
}

TEST(FluxCheck, BandAndBounds) {
  const std::vector<double> ladder = {1, 2, 3, 4, 5, 6};
  const std::vector<double> flux = {0.2, 0.99, 0.95, 0.2, 0.0, -0.2};
  const auto rep = flux_bound_check(ladder, flux, 1.0, 5.0, 1.0);
  EXPECT_FALSE(rep.rows[0].in_band);
  EXPECT_TRUE(rep.rows[4].in_band);
  EXPECT_DOUBLE_EQ(rep.rows[4].lower_bound, 0.0);
  EXPECT_TRUE(rep.rows[4].pass);  // kappa = kappa_theta: any ratio in [-tol, 1 + tol]
  EXPECT_FALSE(rep.rows[5].in_band);
  EXPECT_DOUBLE_EQ(rep.rows[2].lower_bound, 1.0 - 9.0 / 25.0);
  EXPECT_TRUE(rep.rows[2].pass);
  EXPECT_FALSE(rep.rows[3].pass);  // 0.2 < 0.36 - 0.05
  EXPECT_FALSE(rep.all_pass());
  EXPECT_EQ(rep.band_size(), 4u);
}

TEST(FluxCheck, NearBandBottomRatioMustBeNearOne) {
  const auto low = flux_bound_check({1.0, 1.1}, {0.5, 0.5}, 1.0, 100.0, 1.0);
  EXPECT_FALSE(low.rows[1].pass);
  const auto ok = flux_bound_check({1.0, 1.1}, {0.5, 0.98}, 1.0, 100.0, 1.0);
  EXPECT_TRUE(ok.all_pass());
  const auto undefined = flux_bound_check({1.0, 2.0}, {0.5, 0.5}, 1.0, std::nullopt, 0.5);
  EXPECT_EQ(undefined.band_size(), 0u);
}

TEST(SteadyBalance, ZeroTracerGivesZero) {
  const WavenumberGrid g(kTwoPi, 16, 2);
  DiagnosticsAccumulator acc(g, 0.01, 0.01, default_ladder(g), 0.0, Weighting::uniform);
  acc.accumulate(0.0, oracle::random_scalar(g, 1), SpectralScalarField(g));
  EXPECT_EQ(steady_balance_check(acc.record(), 2.0), 0.0);
}
