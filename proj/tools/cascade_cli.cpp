#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>

#include "cascade/run.hpp"
#include "cascade/theory_tables.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

// Writes to --out when given, else to stdout.
void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open " + out + " for writing");
  os << text;
  if (!os) throw std::ios_base::failure("failed writing " + out);
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kOk;
  } catch (const cascade::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const cascade::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const cascade::CflError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumerical;
  } catch (const cascade::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumerical;
  } catch (const cascade::SnapshotError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Field buffers are a few MB; keep them on the heap instead of fresh
  // mmap'd pages every step.
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif

  CLI::App app{"2D turbulence with a passive tracer: simulation, flux diagnostics and cascade theory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cascade::kVersion));

  std::string config_path;
  std::string out_dir = "run";
  bool deterministic = false;
  bool quiet = false;
  auto* sim = app.add_subcommand("simulate", "Run the solver and write averaged diagnostics");
  sim->add_option("--config", config_path, "Configuration file")->required();
  sim->add_option("--out", out_dir, "Output directory")->capture_default_str();
  sim->add_flag("--deterministic", deterministic, "Byte-reproducible outputs (no wall-clock data)");
  sim->add_flag("--quiet", quiet, "No progress lines");

  cascade::AnalyzeOptions an_opt;
  std::string an_config;
  std::string an_out = "analysis";
  double kappa_max = 0.0;
  auto* an = app.add_subcommand("analyze", "Average diagnostics over saved snapshots");
  an->add_option("--glob", an_opt.pattern, "Snapshot glob pattern")->required();
  auto* kmax = an->add_option("--kappa-max", kappa_max, "Largest ladder wavenumber");
  an->add_option("--config", an_config, "Run configuration (default: config.txt beside the snapshots)");
  an->add_option("--out", an_out, "Output directory")->capture_default_str();
  an->add_option("--burn-in", an_opt.burn_in, "Ignore snapshots with t below this")->capture_default_str();

  auto* th = app.add_subcommand("theory", "Closed-form cascade estimates and sweeps");
  th->require_subcommand(1);
  std::vector<std::string> params;
  std::string th_out;
  auto add_theory = [&](const char* name, const char* help) {
    auto* c = th->add_subcommand(name, help);
    c->add_option("--param", params, "key=value (repeatable)");
    c->add_option("--out", th_out, "Output file (default stdout)");
    return c;
  };
  auto* th_phi = add_theory("phi", "phi_p(zeta) curves (tilde=1 for phi_tilde)");
  auto* th_thr = add_theory("threshold", "Schmidt thresholds over (r, G, zeta)");
  auto* th_bnd = add_theory("bounds", "Grashof windows for the dissipation wavenumbers");
  auto* th_est = add_theory("estimate", "kappa_theta^2 estimate for one theorem branch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (sim->parsed()) {
    return guarded([&] {
      if (!std::filesystem::exists(config_path)) throw cascade::UsageError("config file not found: " + config_path);
      const auto config = cascade::load_config(config_path);
      cascade::RunOptions opt;
      opt.out_dir = out_dir;
      opt.deterministic = deterministic;
      opt.log = quiet ? nullptr : &std::cerr;
      const auto res = cascade::run_simulation(config, opt);
      std::cout << "wrote " << res.outputs.size() << " files to " << out_dir << '\n';
    });
  }
  if (an->parsed()) {
    return guarded([&] {
      if (!an_config.empty()) an_opt.config_path = an_config;
      if (kmax->count() > 0) an_opt.kappa_max = kappa_max;
      an_opt.out_dir = an_out;
      const auto res = cascade::analyze_snapshots(an_opt);
      std::cout << "averaged " << res.snapshots << " snapshots into " << an_out << '\n';
    });
  }
  return guarded([&] {
    cascade::TheoryParams p(params);
    std::ostringstream os;
    if (th_phi->parsed()) {
      cascade::write_phi_table(os, p);
    } else if (th_thr->parsed()) {
      cascade::write_threshold_table(os, p);
    } else if (th_bnd->parsed()) {
      cascade::write_bounds_table(os, p);
    } else if (th_est->parsed()) {
      os << cascade::theory_estimate(p).dump(2) << '\n';
    }
    emit(th_out, os.str());
  });
}
