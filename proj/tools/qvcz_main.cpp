#include <iostream>

#include <CLI11.hpp>

#include "qvcz/acceptance.hpp"
#include "qvcz/commands.hpp"
#include "qvcz/config.hpp"
#include "qvcz/correlators.hpp"
#include "qvcz/photonstats.hpp"
#include "qvcz/quadrature.hpp"
#include "qvcz/version.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 numerical-tolerance failure,
// 4 I/O error.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

qvcz::PhysicalConfig resolve_config(const std::string& config_path,
                                    bool have_seed, std::uint64_t seed) {
  qvcz::PhysicalConfig config;
  if (!config_path.empty()) {
    config = qvcz::load_config(config_path);
  }
  if (have_seed) config.seed = seed;
  config.validate();
  if (config.paraxial_marginal()) {
    std::cerr << "qvcz: warning: z/lambda below 1e5, paraxial model is "
                 "marginal\n";
  }
  return config;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qvcz - thermal light through a polarization grating: "
               "propagated correlation functions and photon statistics"};
  app.set_version_flag("--version", qvcz::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool have_seed = false;
  app.add_option("--config", config_path, "Config JSON path")
      ->check(CLI::ExistingFile);
  auto* seed_opt =
      app.add_option("--seed", seed, "Override the config seed");

  // scan-g2
  auto* scan = app.add_subcommand(
      "scan-g2", "Coherence degree g2 over a grid of propagation planes");
  qvcz::ScanOptions scan_opts;
  std::vector<std::string> scan_selectors;
  scan->add_option("--selector", scan_selectors,
                   "Selectors (repeat or comma separated)")
      ->delimiter(',');
  scan->add_option("--nu-min", scan_opts.nu_min, "Smallest nu");
  scan->add_option("--nu-max", scan_opts.nu_max, "Largest nu");
  scan->add_option("--points", scan_opts.points, "Grid points");
  scan->add_option("--method", scan_opts.method,
                   "closed | quadrature | mc | all");
  scan->add_option("--realizations", scan_opts.realizations,
                   "Monte Carlo realizations");
  scan->add_option("--threads", scan_opts.threads, "Worker threads (0 = auto)");
  scan->add_option("--out", scan_opts.out_prefix, "Output CSV prefix");

  // photon-dist
  auto* dist = app.add_subcommand(
      "photon-dist", "Joint photon-number distribution at one plane");
  qvcz::PhotonDistOptions dist_opts;
  dist->add_option("--selector", dist_opts.selector, "Diagonal selector");
  dist->add_option("--nu", dist_opts.nu, "Propagation parameter");
  dist->add_option("--cutoff", dist_opts.cutoff, "Fock cutoff (default 20)");
  dist->add_option("--method", dist_opts.method, "analytic | mc");
  dist->add_option("--realizations", dist_opts.realizations,
                   "Monte Carlo realizations");
  dist->add_option("--threads", dist_opts.threads, "Worker threads (0 = auto)");
  dist->add_option("--out", dist_opts.out, "Output CSV path");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "Monte Carlo cross-validation of the analytic results");
  qvcz::OracleOptions oracle_opts;
  std::vector<std::string> oracle_selectors;
  oracle->add_option("--selector", oracle_selectors,
                     "Selectors (repeat or comma separated)")
      ->delimiter(',');
  oracle->add_option("--nu", oracle_opts.nu_values, "nu planes")
      ->delimiter(',');
  oracle->add_option("--realizations", oracle_opts.realizations,
                     "Monte Carlo realizations");
  oracle->add_option("--threads", oracle_opts.threads,
                     "Worker threads (0 = auto)");
  oracle->add_option("--out", oracle_opts.out, "Output CSV path");
  oracle->add_option("--dump-field", oracle_opts.dump_field_path,
                     "Dump one sampled field realization (binary + sidecar)");

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Run the acceptance matrix and report PASS/FAIL");

  // replay
  auto* replay = app.add_subcommand(
      "replay", "Re-run a command from its manifest");
  std::string manifest_path;
  replay->add_option("manifest", manifest_path, "Manifest JSON path")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  have_seed = seed_opt->count() > 0;

  try {
    if (replay->parsed()) {
      const auto files = qvcz::cmd_replay(manifest_path, std::cout);
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
      return kExitOk;
    }

    const qvcz::PhysicalConfig config =
        resolve_config(config_path, have_seed, seed);

    if (scan->parsed()) {
      scan_opts.config = config;
      if (!scan_selectors.empty()) scan_opts.selectors = scan_selectors;
      const auto files = qvcz::cmd_scan_g2(scan_opts);
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
      return kExitOk;
    }
    if (dist->parsed()) {
      dist_opts.config = config;
      const auto files = qvcz::cmd_photon_dist(dist_opts, std::cout);
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
      return kExitOk;
    }
    if (oracle->parsed()) {
      oracle_opts.config = config;
      if (!oracle_selectors.empty()) oracle_opts.selectors = oracle_selectors;
      const auto files = qvcz::cmd_oracle(oracle_opts, std::cout);
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
      return kExitOk;
    }
    if (validate->parsed()) {
      return qvcz::cmd_validate(config, std::cout);
    }
  } catch (const qvcz::IoError& e) {
    std::cerr << "qvcz: io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const qvcz::CutoffError& e) {
    std::cerr << "qvcz: " << e.what()
              << " (suggested cutoff: " << e.suggested_cutoff << ")\n";
    return kExitNumerical;
  } catch (const qvcz::QuadratureError& e) {
    std::cerr << "qvcz: " << e.what()
              << " (achieved error: " << e.achieved_error << ")\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qvcz: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qvcz: error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
