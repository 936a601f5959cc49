#pragma once
#include <cstdint>
#include <string>

namespace qvcz {

/// All experiment constants in SI units.
struct PhysicalConfig {
  double wavelength_m = 780e-9;         ///< lambda
  double grating_width_m = 3e-3;        ///< L
  double pixel_size_m = 250e-6;         ///< d (source-plane pixel side)
  double coherence_area_m2 = 4.0e-10;   ///< sigma, (20 um)^2
  double alpha_mag = 0.7745966692414834; ///< |alpha|; detector mean = |alpha|^2
  double detector_separation_m = 2e-3;  ///< DeltaX
  double propagation_distance_m = 64.102564102564102; ///< z (nu = 0.12)
  std::uint64_t seed = 20260808;

  /// Throws std::invalid_argument when an invariant is violated
  /// (nonpositive entries, sqrt(sigma) > d, d > L, z/lambda < 1e3).
  void validate() const;

  /// True when z/lambda is below 1e5: paraxial but marginally so.
  bool paraxial_marginal() const;
};

/// Quantities derived from PhysicalConfig.
struct DerivedParams {
  double n_bar;        ///< mean photons per source pixel, pi*sigma/d^2
  double wavenumber;   ///< k = 2*pi/lambda
  double intensity_i0; ///< I0 = pi^2 sigma^2 |alpha|^4 / L^4
  double nu;           ///< L*DeltaX/(lambda*z)
};

DerivedParams derive_params(const PhysicalConfig& config);

/// Inverts nu = L*DeltaX/(lambda*z). Throws on nu <= 0.
double z_from_nu(const PhysicalConfig& config, double nu);

/// First-order coherence at distance z: sqrt(I0)*L/(2 z^2 lambda^2).
/// Anchors the absolute scale of all analytic correlators.
double g1_closed_form(const PhysicalConfig& config, double z);

/// Reads a config from a JSON file with exactly the fields
/// wavelength_m, grating_width_m, pixel_size_m, coherence_area_m2,
/// alpha_mag, detector_separation_m, propagation_distance_m, seed.
/// Unknown keys are rejected. Validates before returning.
PhysicalConfig load_config(const std::string& path);
PhysicalConfig parse_config_json(const std::string& text);
std::string config_to_json(const PhysicalConfig& config);

} // namespace qvcz
