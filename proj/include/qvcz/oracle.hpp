#pragma once
#include <cstdint>
#include <limits>
#include <vector>

#include "qvcz/config.hpp"
#include "qvcz/field.hpp"
#include "qvcz/photonstats.hpp"
#include "qvcz/polselect.hpp"

namespace qvcz {

/// End-to-end Monte Carlo run description. One pass over the realizations
/// serves every requested plane and selector.
struct McRunConfig {
  std::uint64_t realization_count = 10000;
  std::uint64_t seed = 1;
  std::vector<double> nu_planes = {0.5};
  std::vector<PolSelector> g2_selectors;
  std::vector<PolSelector> dist_selectors; ///< diagonal selectors only
  int cutoff = 20;

  bool grating_enabled = true;
  bool single_polarization = false; ///< thermal reference: no mixture masks
  bool frozen_field = false;        ///< coherent reference: Sigma == 1
  bool integer_count_sampling = false; ///< sample counts instead of the
                                       ///< conditional Poisson weights

  /// Detector x positions; NaN means +-DeltaX/2 from the config.
  double detector1_x = std::numeric_limits<double>::quiet_NaN();
  double detector2_x = std::numeric_limits<double>::quiet_NaN();

  int blocks = 100; ///< jackknife blocks
  int threads = 0;  ///< 0 = hardware concurrency

  void validate(const PhysicalConfig& config) const;
};

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t realization_count = 0;
};

/// Empirical joint distribution with per-entry standard errors.
struct McDistribution {
  JointPhotonDistribution dist;
  Eigen::MatrixXd entry_stderr;
  std::uint64_t realization_count = 0;
};

struct McPlaneResult {
  double nu = 0.0;
  double z = 0.0;
  std::vector<McEstimate> g2;           ///< parallel to g2_selectors
  std::vector<McDistribution> dists;    ///< parallel to dist_selectors
  /// Calibrated complex cross moment <u_H*(r1) u_H(r2)> estimate (real and
  /// imaginary parts), for cross-checks against the analytic second moment.
  McEstimate cross_moment_re;
  McEstimate cross_moment_im;
};

/// Runs the speckle Monte Carlo: sample thermal field (+ per-pixel
/// polarization mixture), apply the grating, Fresnel-propagate to the two
/// detectors, and accumulate post-selected correlations and conditional
/// Poisson photon statistics. Deterministic for a given McRunConfig.
std::vector<McPlaneResult> run_oracle(const PhysicalConfig& config,
                                      const McRunConfig& run);

/// Ratio estimate <I1 I2> / (<I1><I2>) with block-jackknife standard error.
McEstimate mc_g2(const McRunConfig& run, const PhysicalConfig& config,
                 const PolSelector& selector);

/// Empirical joint photon-number distribution by conditional-Poisson
/// accumulation. Throws CutoffError when the tail mass exceeds 1e-3.
McDistribution mc_photon_distribution(const McRunConfig& run,
                                      const PhysicalConfig& config,
                                      const PolSelector& selector,
                                      int cutoff);

/// Deterministic expectation of the (uncalibrated) detected intensity of
/// the discrete pipeline; the calibration constant is n_det / this.
double expected_raw_intensity(const PhysicalConfig& config, double z,
                              const McRunConfig& run, Pol projection,
                              double detector_x);

/// One row of the cross-validation matrix.
struct ValidationEntry {
  std::string selector;
  double nu;
  double analytic;
  double mc_value;
  double mc_stderr;
  double z_score;
};

/// The standard validation matrix: selectors x nu values, analytic closed
/// form vs Monte Carlo, z-scores reported.
std::vector<ValidationEntry> run_validation_matrix(
    const PhysicalConfig& config, const std::vector<PolSelector>& selectors,
    const std::vector<double>& nu_values, std::uint64_t realizations,
    std::uint64_t seed);

} // namespace qvcz
