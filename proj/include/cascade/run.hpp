#pragma once

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cascade/diagnostics.hpp"
#include "cascade/report.hpp"
#include "cascade/snapshot_io.hpp"
#include "cascade/solver.hpp"

namespace cascade {

namespace fs = std::filesystem;

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::ios_base::failure("failed writing " + path.string());
}

inline Json output_list(const fs::path& dir, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (const auto& n : names) out.push_back({{"path", n}, {"bytes", fs::file_size(dir / n)}});
  return out;
}

inline std::string checkpoint_name(long step) {
  std::ostringstream os;
  os << "checkpoint_" << std::setw(7) << std::setfill('0') << step << ".cslb";
  return os.str();
}

// Writes summary.json, spectrum.csv and flux.csv; returns their names.
inline std::vector<std::string> write_record_outputs(const fs::path& dir, const DiagnosticsRecord& r,
                                                     const SimulationConfig& c, double G, const RunStats* stats) {
  const auto checks = check_record(r, c, G);
  std::ostringstream spec, flux;
  write_spectrum_csv(spec, r);
  write_flux_csv(flux, r, checks.tracer);
  write_text(dir / "spectrum.csv", spec.str());
  write_text(dir / "flux.csv", flux.str());
  write_text(dir / "summary.json", summary_json(r, c, G, checks, stats).dump(2) + "\n");
  return {"summary.json", "spectrum.csv", "flux.csv"};
}

}  // namespace detail

struct RunOptions {
  fs::path out_dir = "run";
  /// Omits wall-clock time from the manifest so that every output file is
  /// reproducible byte for byte.
  bool deterministic = false;
  std::ostream* log = nullptr;
};

struct RunResult {
  DiagnosticsRecord record;
  RunStats stats;
  double grashof = 0.0;
  std::vector<std::string> outputs;
};

/// Integrates to t_end, averaging after burn_in, and writes config.txt,
/// checkpoints, summary.json, spectrum.csv, flux.csv and manifest.json.
inline RunResult run_simulation(const SimulationConfig& config, const RunOptions& opt) {
  const auto wall0 = std::chrono::steady_clock::now();
  const auto problem = make_problem(config);
  const auto& g = problem.grid;
  auto state = init_state(config);
  fs::create_directories(opt.out_dir);

  RunResult res;
  res.grashof = grashof(problem);
  std::vector<std::string> outputs = {"config.txt"};
  {
    std::ostringstream os;
    write_config(os, config);
    detail::write_text(opt.out_dir / "config.txt", os.str());
  }

  const auto ladder = default_ladder(g);
  DiagnosticsAccumulator acc(g, config.nu, config.mu, ladder, config.burn_in, Weighting::trapezoid);
  const long nsteps = std::lround(config.t_end / config.dt);
  const long report_every = std::max(1L, nsteps / 10);
  auto checkpoint = [&](long i) {
    const auto name = detail::checkpoint_name(i);
    save_snapshot(opt.out_dir / name, FieldKind::state, {&state.omega, &state.theta}, state.t);
    outputs.push_back(name);
  };

  for (long i = 0;; ++i) {
    const bool sample = state.t >= config.burn_in;
    if (sample && (i % config.sample_every == 0 || i == nsteps)) acc.accumulate(state);
    if (sample && i % config.flux_every == 0) {
      acc.accumulate_velocity_flux(state.t, state.omega);
      // The transfer form used for the averaged profile must agree with the
      // triad form; compare them at one rotating ladder point.
      const double kappa = ladder[res.stats.identity_checks % ladder.size()];
      const auto u = velocity_from_vorticity(state.omega);
      const double triad = tracer_flux(u, state.theta, kappa);
      const double transfer = tracer_flux_profile(u, state.theta, {kappa})[0];
      const double scale = std::sqrt(parseval_energy(u) * gradient_norm2(state.theta) * parseval_energy(state.theta)) /
                           std::pow(g.volume(), 1.5);
      const double denom = std::max({std::abs(triad), std::abs(transfer), 1e-12 * scale});
      if (denom > 0.0) {
        res.stats.max_identity_residual = std::max(res.stats.max_identity_residual, std::abs(triad - transfer) / denom);
      }
      ++res.stats.identity_checks;
    }
    const bool last = i == nsteps;
    if (last || (config.checkpoint_every > 0 && i % config.checkpoint_every == 0)) checkpoint(i);
    if (last) break;
    double courant = 0.0;
    state = step(state, problem, &courant);
    res.stats.max_courant = std::max(res.stats.max_courant, courant);
    ++res.stats.steps;
    if (opt.log != nullptr && (i + 1) % report_every == 0) {
      *opt.log << "step " << (i + 1) << "/" << nsteps << std::setprecision(6) << " t=" << state.t
               << " courant=" << courant << '\n';
    }
  }

  res.record = acc.record();
  for (const auto& n : detail::write_record_outputs(opt.out_dir, res.record, config, res.grashof, &res.stats)) {
    outputs.push_back(n);
  }

  Json m;
  m["format"] = "cascade-manifest-1";
  m["version"] = kVersion;
  m["command"] = "simulate";
  m["deterministic"] = opt.deterministic;
  m["seed"] = config.seed;
  m["config"] = "config.txt";
  m["rerun"] = std::string("cascade simulate --config config.txt") + (opt.deterministic ? " --deterministic" : "");
  m["steps"] = res.stats.steps;
  if (!opt.deterministic) {
    m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  }
  m["outputs"] = detail::output_list(opt.out_dir, outputs);
  detail::write_text(opt.out_dir / "manifest.json", m.dump(2) + "\n");
  outputs.push_back("manifest.json");
  res.outputs = outputs;
  return res;
}

// ---------------------------------------------------------------------------
// Snapshot ensembles.
// ---------------------------------------------------------------------------

/// Sorted paths matching a POSIX glob pattern.
inline std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t gl{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &gl);
  std::vector<fs::path> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < gl.gl_pathc; ++i) out.emplace_back(gl.gl_pathv[i]);
  }
  ::globfree(&gl);
  if (rc != 0 && rc != GLOB_NOMATCH) throw std::ios_base::failure("glob failed for " + pattern);
  std::sort(out.begin(), out.end());
  return out;
}

/// Worker count: CASCADE_THREADS if set (>= 1), else the hardware count.
inline unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CASCADE_THREADS")) {
    try {
      n = static_cast<unsigned>(std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      throw UsageError(std::string("CASCADE_THREADS must be a positive integer, got '") + env + "'");
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, jobs)));
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception, by index, is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct AnalyzeOptions {
  std::string pattern;
  std::optional<double> kappa_max;
  std::optional<fs::path> config_path;  ///< default: config.txt beside the first snapshot
  fs::path out_dir = "analysis";
  double burn_in = 0.0;
};

struct AnalyzeResult {
  DiagnosticsRecord record;
  std::size_t snapshots = 0;
  std::vector<std::string> outputs;
};

/// Vorticity and tracer of a snapshot; vorticity-only inputs carry no tracer.
inline SimState state_of(const Snapshot& s) {
  const auto& g = s.grid();
  if (g.dim() != 2) throw UsageError("analyze supports 2D snapshots only");
  switch (s.kind) {
    case FieldKind::state:
      return {s.time, s.components[0], s.components[1]};
    case FieldKind::vorticity:
      return {s.time, s.components[0], SpectralScalarField(g)};
    case FieldKind::velocity: {
      SpectralVelocityField u(g);
      u.component(0) = s.components[0];
      u.component(1) = s.components[1];
      return {s.time, vorticity_of(u), SpectralScalarField(g)};
    }
    case FieldKind::scalar:
      break;
  }
  throw UsageError("analyze needs state, vorticity or velocity snapshots");
}

/// Uniformly weighted averages over a snapshot ensemble. Snapshots are
/// processed in parallel and reduced in time order, so the result does not
/// depend on the worker count.
inline AnalyzeResult analyze_snapshots(const AnalyzeOptions& opt) {
  const auto paths = expand_glob(opt.pattern);
  if (paths.empty()) throw UsageError("no snapshots match '" + opt.pattern + "'");
  const fs::path cfg_path = opt.config_path.value_or(paths.front().parent_path() / "config.txt");
  if (!fs::exists(cfg_path)) {
    throw UsageError("config " + cfg_path.string() + " not found; pass --config");
  }
  const auto config = load_config(cfg_path);
  const auto grid = grid_of(config);

  auto ladder = default_ladder(grid, opt.kappa_max.value_or(kInfinity));
  if (ladder.empty()) throw UsageError("kappa ladder is empty; raise --kappa-max");
  DiagnosticsAccumulator acc(grid, config.nu, config.mu, ladder, opt.burn_in, Weighting::uniform);

  struct Item {
    double t = 0.0;
    std::vector<double> scalars;
    std::vector<double> velocity;
  };
  std::vector<Item> items(paths.size());
  parallel_for(paths.size(), worker_count(paths.size()), [&](std::size_t i) {
    const auto snap = load_snapshot(paths[i]);
    if (!(snap.grid() == grid)) {
      throw UsageError("grid mismatch: " + paths[i].string() + " has N=" + std::to_string(snap.grid().modes()) +
                       ", L=" + format_double(snap.grid().length()) + "; expected N=" + std::to_string(grid.modes()) +
                       ", L=" + format_double(grid.length()));
    }
    const auto s = state_of(snap);
    items[i] = {s.t, acc.scalar_channels(s.omega, s.theta), acc.velocity_channels(s.omega)};
  });

  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return items[a].t < items[b].t; });
  std::size_t used = 0;
  for (const auto i : order) {
    if (acc.accumulate_scalars(items[i].t, items[i].scalars)) ++used;
    acc.accumulate_velocity(items[i].t, items[i].velocity);
  }
  if (used == 0) throw UsageError("every snapshot precedes the burn-in time");

  AnalyzeResult res;
  res.snapshots = used;
  res.record = acc.record();
  const double G = grashof(make_problem(config));
  fs::create_directories(opt.out_dir);
  res.outputs = detail::write_record_outputs(opt.out_dir, res.record, config, G, nullptr);

  Json m;
  m["format"] = "cascade-manifest-1";
  m["version"] = kVersion;
  m["command"] = "analyze";
  m["config"] = fs::absolute(cfg_path).lexically_normal().string();
  Json inputs = Json::array();
  for (const auto& p : paths) inputs.push_back(p.string());
  m["inputs"] = inputs;
  m["kappa_max"] = opt.kappa_max ? Json(*opt.kappa_max) : Json(nullptr);
  m["burn_in"] = opt.burn_in;
  m["outputs"] = detail::output_list(opt.out_dir, res.outputs);
  detail::write_text(opt.out_dir / "manifest.json", m.dump(2) + "\n");
  res.outputs.push_back("manifest.json");
  return res;
}

}  // namespace cascade
