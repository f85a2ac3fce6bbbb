#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cascade/solver.hpp"
#include "oracle.hpp"

using namespace cascade;

namespace {

const char* kBase = R"(# test run
L = 2pi
N = 32
nu = 0.02
mu = 0.01
dt = 0.01
t_end = 1
burn_in = 0.5
seed = 42
vel_band_lo = 3
vel_band_hi = 5
vel_amp = 0.5
trc_band_lo = 2
trc_band_hi = 4
trc_amp = 1
)";

SimulationConfig base_config() {
  std::istringstream is(kBase);
  return parse_config(is);
}

int error_line(const std::string& text) {
  std::istringstream is(text);
  try {
    parse_config(is);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, ParsesAllKeys) {
  const auto c = base_config();
  EXPECT_DOUBLE_EQ(c.length, 2.0 * std::numbers::pi);
  EXPECT_EQ(c.modes, 32);
  EXPECT_DOUBLE_EQ(c.schmidt(), 2.0);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_DOUBLE_EQ(c.velocity_forcing.band_hi, 5.0);
  EXPECT_DOUBLE_EQ(c.tracer_forcing.amplitude, 1.0);
  EXPECT_DOUBLE_EQ(c.init_amp, 0.01);
  EXPECT_DOUBLE_EQ(c.kappa0(), 1.0);
}

TEST(Config, ValueForms) {
  std::string text = kBase;
  text.replace(text.find("L = 2pi"), 7, "L = 0.5*pi");
  text.replace(text.find("nu = 0.02"), 9, "nu = 1/50");
  std::istringstream is(text);
  const auto c = parse_config(is);
  EXPECT_DOUBLE_EQ(c.length, 0.5 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(c.nu, 0.02);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line(std::string(kBase) + "bogus = 1\n"), 16);
  EXPECT_EQ(error_line(std::string(kBase) + "nu = 0.1\n"), 16);
  EXPECT_EQ(error_line(std::string(kBase) + "flux_every\n"), 16);
  std::string bad = kBase;
  bad.replace(bad.find("dt = 0.01"), 9, "dt = fast");
  EXPECT_EQ(error_line(bad), 6);
  std::string half = kBase;
  half.replace(half.find("N = 32"), 6, "N = 32.5");
  EXPECT_EQ(error_line(half), 3);
}

TEST(Config, MissingAndInvalidValues) {
  std::string missing = kBase;
  missing.erase(missing.find("seed = 42"), 10);
  std::istringstream is(missing);
  try {
    parse_config(is);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
  }
  std::string neg = kBase;
  neg.replace(neg.find("mu = 0.01"), 9, "mu = -1");
  std::istringstream is2(neg);
  EXPECT_THROW(parse_config(is2), ConfigError);
}

TEST(Config, CanonicalTextRoundTrips) {
  auto c = base_config();
  c.checkpoint_every = 7;
  c.init_amp = 1.0 / 3.0;
  std::ostringstream os;
  write_config(os, c);
  std::istringstream is(os.str());
  const auto d = parse_config(is);
  std::ostringstream os2;
  write_config(os2, d);
  EXPECT_EQ(os.str(), os2.str());
  EXPECT_EQ(d.init_amp, c.init_amp);
}

TEST(Config, MissingFileIsAnIoFailure) {
  EXPECT_THROW(load_config("/nonexistent/run.cfg"), std::ios_base::failure);
}

TEST(Forcing, SupportNormAndSolenoidality) {
  const auto c = base_config();
  const auto g = grid_of(c);
  const auto f = make_forcing(g, c);
  EXPECT_LT(f.velocity.divergence_violation(), 1e-14);
  double sum_u = 0.0, sum_g = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double kappa = g.wavenumber(m);
    const double pu = std::norm(f.velocity.component(0)[m]) + std::norm(f.velocity.component(1)[m]);
    const double pg = std::norm(f.tracer[m]);
    if (pu > 0.0) {
      EXPECT_GE(kappa, 3.0);
      EXPECT_LE(kappa, 5.0);
    }
    if (pg > 0.0) {
      EXPECT_GE(kappa, 2.0);
      EXPECT_LE(kappa, 4.0);
    }
    sum_u += pu;
    sum_g += pg;
  }
  EXPECT_NEAR(sum_u, 0.25, 1e-14);
  EXPECT_NEAR(sum_g, 1.0, 1e-14);
  EXPECT_EQ(f.vorticity, vorticity_of(f.velocity));
}

TEST(Forcing, PhasesDependOnlyOnSeedStreamAndMode) {
  const Mode k = {3, -2, 0};
  EXPECT_EQ(mode_phase(5, PhaseStream::tracer_forcing, k), mode_phase(5, PhaseStream::tracer_forcing, k));
  EXPECT_NE(mode_phase(5, PhaseStream::tracer_forcing, k), mode_phase(6, PhaseStream::tracer_forcing, k));
  EXPECT_NE(mode_phase(5, PhaseStream::tracer_forcing, k), mode_phase(5, PhaseStream::velocity_forcing, k));
  const ForcingSpec spec{2.0, 4.0, 1.0};
  const auto a = band_scalar(WavenumberGrid(2.0 * std::numbers::pi, 32, 2), spec, 9, PhaseStream::tracer_forcing);
  const auto b = band_scalar(WavenumberGrid(2.0 * std::numbers::pi, 64, 2), spec, 9, PhaseStream::tracer_forcing);
  const auto& ga = a.grid();
  const auto& gb = b.grid();
  for (std::size_t m = 0; m < ga.size(); ++m) {
    if (std::abs(a[m]) == 0.0) continue;
    EXPECT_EQ(a[m], b[gb.flat(ga.mode(m))]);
  }
}

TEST(InitState, DeterministicBandLimitedNoise) {
  const auto c = base_config();
  const auto s1 = init_state(c);
  const auto s2 = init_state(c);
  EXPECT_EQ(s1.omega, s2.omega);
  EXPECT_EQ(s1.t, 0.0);
  EXPECT_EQ(parseval_energy(s1.theta), 0.0);
  const auto u = velocity_from_vorticity(s1.omega);
  EXPECT_NEAR(parseval_energy(u) / s1.omega.grid().volume(), c.init_amp * c.init_amp, 1e-15);

  auto c2 = c;
  c2.seed = 43;
  const auto s3 = init_state(c2);
  EXPECT_FALSE(s3.omega == s1.omega);
  const auto t1 = dyadic_spectrum(velocity_from_vorticity(s1.omega));
  const auto t3 = dyadic_spectrum(velocity_from_vorticity(s3.omega));
  for (std::size_t j = 0; j < t1.size(); ++j) EXPECT_NEAR(t1.values[j], t3.values[j], 1e-18);

  auto c0 = c;
  c0.init_amp = 0.0;
  EXPECT_EQ(parseval_energy(init_state(c0).omega), 0.0);
}

TEST(Step, SingleModeDecaysExactly) {
  auto c = base_config();
  c.velocity_forcing.amplitude = 0.0;
  c.tracer_forcing.amplitude = 0.0;
  const auto p = make_problem(c);
  SimState s{0.0, SpectralScalarField(p.grid), SpectralScalarField(p.grid)};
  const Mode k = {2, 1, 0};
  s.omega.set_mode(k, Complex(0.3, -0.4));
  s.theta.set_mode(k, Complex(1.0, 0.5));
  const auto w0 = s.omega[p.grid.flat(k)];
  const auto t0 = s.theta[p.grid.flat(k)];
  for (int i = 0; i < 20; ++i) s = step(s, p);
  const double lam = 5.0;  // kappa0^2 |k|^2
  const auto w = s.omega[p.grid.flat(k)];
  const auto th = s.theta[p.grid.flat(k)];
  EXPECT_LT(std::abs(w - w0 * std::exp(-c.nu * lam * s.t)), 1e-15);
  EXPECT_LT(std::abs(th - t0 * std::exp(-c.mu * lam * s.t)), 1e-15);
}

TEST(Step, TracerIsPassive) {
  auto c = base_config();
  auto p1 = make_problem(c);
  auto c2 = c;
  c2.mu = 0.05;
  c2.tracer_forcing.amplitude = 3.0;
  auto p2 = make_problem(c2);
  auto a = init_state(c);
  auto b = init_state(c2);
  b.theta.set_mode({1, 1, 0}, Complex(2.0, 1.0));
  for (int i = 0; i < 50; ++i) {
    a = step(a, p1);
    b = step(b, p2);
  }
  EXPECT_EQ(a.omega, b.omega);
  EXPECT_FALSE(a.theta == b.theta);
}

TEST(Step, TracerTracksVorticityWhenForcedByTheCurl) {
  auto c = base_config();
  c.mu = c.nu;
  c.init_amp = 0.2;
  const auto g = grid_of(c);
  auto f = make_forcing(g, c);
  f.tracer = f.vorticity;
  const Problem p(c, f);
  auto s = init_state(c);
  s.theta = s.omega;
  for (int i = 0; i < 100; ++i) s = step(s, p);
  double diff = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    diff = std::max(diff, std::abs(s.omega[m] - s.theta[m]));
    scale = std::max(scale, std::abs(s.omega[m]));
  }
  EXPECT_LE(diff, 1e-10 * scale);
}

TEST(Step, UnforcedEvolutionIsDissipative) {
  auto c = base_config();
  c.velocity_forcing.amplitude = 0.0;
  c.tracer_forcing.amplitude = 0.0;
  const auto p = make_problem(c);
  SimState s{0.0, oracle::random_scalar(p.grid, 1, 2.0), oracle::random_scalar(p.grid, 2, 1.0)};
  double e = parseval_energy(velocity_from_vorticity(s.omega));
  double v = parseval_energy(s.theta);
  for (int i = 0; i < 40; ++i) {
    s = step(s, p);
    const double e1 = parseval_energy(velocity_from_vorticity(s.omega));
    const double v1 = parseval_energy(s.theta);
    EXPECT_LE(e1, e * (1.0 + 1e-10));
    EXPECT_LE(v1, v * (1.0 + 1e-10));
    e = e1;
    v = v1;
  }
}

TEST(Step, StaysInsideDealiasingDisc) {
  const auto c = base_config();
  const auto p = make_problem(c);
  auto s = init_state(c);
  for (int i = 0; i < 30; ++i) s = step(s, p);
  for (std::size_t m = 0; m < p.grid.size(); ++m) {
    if (!p.grid.retained(m)) {
      EXPECT_EQ(s.omega[m], Complex(0.0, 0.0));
      EXPECT_EQ(s.theta[m], Complex(0.0, 0.0));
    }
  }
  EXPECT_LT(s.omega.invariant_violation(), 1e-15);
}

TEST(Step, DeterministicTrajectory) {
  const auto c = base_config();
  const auto p = make_problem(c);
  auto a = init_state(c);
  auto b = init_state(c);
  for (int i = 0; i < 20; ++i) {
    a = step(a, p);
    b = step(b, p);
  }
  EXPECT_EQ(a.omega, b.omega);
  EXPECT_EQ(a.theta, b.theta);
}

TEST(Step, CflViolationCarriesPayload) {
  auto c = base_config();
  c.dt = 0.5;
  const auto p = make_problem(c);
  SimState s{0.0, SpectralScalarField(p.grid), SpectralScalarField(p.grid)};
  s.omega.set_mode({1, 0, 0}, Complex(5.0, 0.0));
  try {
    step(s, p);
    FAIL() << "expected CflError";
  } catch (const CflError& e) {
    EXPECT_NEAR(e.max_speed(), 10.0, 1e-9);
    EXPECT_NEAR(e.courant(), 10.0 * 0.5 * 32 / (2.0 * std::numbers::pi), 1e-9);
    EXPECT_EQ(e.dt(), 0.5);
  }
}

TEST(Step, CourantNumberMatchesStepReport) {
  const auto c = base_config();
  const auto p = make_problem(c);
  auto s = init_state(c);
  for (int i = 0; i < 5; ++i) s = step(s, p);
  double reported = 0.0;
  step(s, p, &reported);
  EXPECT_NEAR(reported, courant_number(s.omega, c.dt), 1e-14);
}

TEST(Grashof, Arithmetic) {
  EXPECT_DOUBLE_EQ(grashof(1.0, 0.1, 1.0, 2), 100.0);
  EXPECT_DOUBLE_EQ(grashof(1.0, 1.0, 4.0, 3), 0.125);
  EXPECT_EQ(grashof(0.0, 0.3, 1.0, 2), 0.0);
  EXPECT_THROW(grashof(1.0, 0.0, 1.0, 2), std::invalid_argument);
  const auto c = base_config();
  // |f| = amp L^{d/2}
  EXPECT_NEAR(grashof(c), 0.5 * 2.0 * std::numbers::pi / (c.nu * c.nu), 1e-9);
}

TEST(Budget, ZeroFieldsGiveZeroResidual) {
  auto c = base_config();
  c.velocity_forcing.amplitude = 0.0;
  c.tracer_forcing.amplitude = 0.0;
  const auto p = make_problem(c);
  const SimState a{0.0, SpectralScalarField(p.grid), SpectralScalarField(p.grid)};
  const auto b = step(a, p);
  const auto r = instant_budget(a, b, p);
  EXPECT_EQ(r.tracer, 0.0);
  EXPECT_EQ(r.energy, 0.0);
}

TEST(Budget, SecondOrderInTime) {
  auto c = base_config();
  c.init_amp = 0.3;
  double prev_t = 0.0, prev_e = 0.0;
  for (const double dt : {0.02, 0.01, 0.005}) {
    c.dt = dt;
    const auto p = make_problem(c);
    auto s = init_state(c);
    s.theta = oracle::random_scalar(p.grid, 3, 2.0);
    const int n = static_cast<int>(std::lround(0.2 / dt));
    for (int i = 0; i < n; ++i) s = step(s, p);
    const auto r = instant_budget(s, step(s, p), p);
    if (prev_t != 0.0) {
      EXPECT_GT(prev_t / std::abs(r.tracer), 3.0);
      EXPECT_GT(prev_e / std::abs(r.energy), 3.0);
    }
    prev_t = std::abs(r.tracer);
    prev_e = std::abs(r.energy);
  }
}
