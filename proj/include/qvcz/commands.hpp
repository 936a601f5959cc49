#pragma once
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "qvcz/config.hpp"
#include "qvcz/errors.hpp"

namespace qvcz {

struct ScanOptions {
  PhysicalConfig config;
  std::vector<std::string> selectors = {"HHHH", "HVHV", "VHHV", "HHVV"};
  double nu_min = 0.1;
  double nu_max = 4.0;
  int points = 25;
  std::string method = "closed"; ///< closed | quadrature | mc | all
  std::uint64_t realizations = 10000;
  std::string out_prefix = "scan_g2";
  int threads = 0;
};

/// One CSV per selector plus a manifest; returns the written data files.
std::vector<std::string> cmd_scan_g2(const ScanOptions& options);

struct PhotonDistOptions {
  PhysicalConfig config;
  std::string selector = "HHHH";
  double nu = 0.5;
  int cutoff = 20;
  std::string method = "analytic"; ///< analytic | mc
  std::uint64_t realizations = 100000;
  std::string out = "photon_dist.csv";
  int threads = 0;
};

std::vector<std::string> cmd_photon_dist(const PhotonDistOptions& options,
                                         std::ostream& log);

struct OracleOptions {
  PhysicalConfig config;
  std::vector<std::string> selectors = {"HHHH", "HVHV", "VHHV", "HHVV"};
  std::vector<double> nu_values = {0.2, 0.5, 1.0, 2.0, 4.0};
  std::uint64_t realizations = 10000;
  std::string out = "oracle_validation.csv";
  std::string dump_field_path; ///< optional binary dump of one realization
  int threads = 0;
};

/// Cross-validation matrix: analytic vs Monte Carlo with z-scores.
std::vector<std::string> cmd_oracle(const OracleOptions& options,
                                    std::ostream& log);

/// Re-executes the command recorded in a manifest; data outputs reproduce
/// bitwise given the same build.
std::vector<std::string> cmd_replay(const std::string& manifest_path,
                                    std::ostream& log);

/// Runs the acceptance matrix; returns the process exit code (0 on pass,
/// 3 on a numerical-tolerance failure).
int cmd_validate(const PhysicalConfig& config, std::ostream& log);

std::string manifest_path_for(const std::string& output_path);

} // namespace qvcz
