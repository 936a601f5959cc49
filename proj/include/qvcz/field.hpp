#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qvcz/config.hpp"
#include "qvcz/polselect.hpp"

namespace qvcz {

/// One sampled realization of the complex source field on a square grid
/// covering [-L/2, L/2]^2; samples at cell centers, row-major (y outer).
struct TransverseField {
  int n = 0;               ///< samples per axis
  double spacing = 0.0;    ///< grid spacing, meters
  double half_width = 0.0; ///< L/2, meters
  Pol polarization = Pol::H;
  std::vector<std::complex<double>> samples; ///< n*n, index = iy*n + ix

  std::complex<double>& at(int ix, int iy) { return samples[iy * n + ix]; }
  const std::complex<double>& at(int ix, int iy) const {
    return samples[iy * n + ix];
  }
  double coord(int i) const { return -half_width + (i + 0.5) * spacing; }
  double total_energy() const; ///< sum |E|^2 * cell area
};

/// Grid geometry derived from the config: spacing sqrt(sigma)/2 snapped so
/// that both the grating width and the pixel size are integer multiples.
struct GridSpec {
  int n;          ///< cells per axis
  double spacing; ///< meters
  int cells_per_pixel;
};

GridSpec grid_for_config(const PhysicalConfig& config);

/// Samples one realization of the correlated circular complex Gaussian
/// field: white noise convolved with a Gaussian kernel of width
/// sqrt(sigma/2), scaled so the discrete covariance integrates to n_bar.
/// Deterministic in (config, seed); the polarization argument is a label
/// carried on the output (the source statistics are polarization
/// independent). Throws when the grid would be too coarse.
TransverseField sample_thermal_field(const PhysicalConfig& config,
                                     Pol polarization, std::uint64_t seed);

/// Guards the unpolarized-pair convention: drawing both polarization
/// components from one seed would duplicate the field.
void validate_polarization_seeds(std::uint64_t seed_h, std::uint64_t seed_v);

/// Per-pixel polarization masks of one realization of the unpolarized
/// mixture: mask[pixel] == true where the pixel carries H.
struct PixelPolMask {
  int pixels_per_axis = 0;
  std::vector<std::uint8_t> h_mask; ///< row-major pixel grid

  bool is_h(int px, int py) const {
    return h_mask[py * pixels_per_axis + px] != 0;
  }
};

PixelPolMask sample_pixel_polarizations(const PhysicalConfig& config,
                                        std::uint64_t seed);

/// One realization of the unpolarized source: a single field draw split
/// into disjoint H/V components by the per-pixel polarization mask.
struct UnpolarizedRealization {
  TransverseField h;
  TransverseField v;
};

UnpolarizedRealization sample_unpolarized_realization(
    const PhysicalConfig& config, std::uint64_t field_seed,
    std::uint64_t mask_seed);

/// Row-major complex pairs, little-endian 64-bit floats, with a JSON
/// sidecar at path + ".json" describing extents.
void write_field_binary(const std::string& path, const TransverseField& field);
TransverseField read_field_binary(const std::string& path);

namespace detail {

/// Precomputed state of the correlated-field sampler; sharing it between
/// the public op and the Monte Carlo engine keeps the two bit-identical.
struct SamplerPlan {
  GridSpec spec;
  std::vector<double> taps;
  double scale = 0.0;
};

SamplerPlan make_sampler_plan(const PhysicalConfig& config);

/// Writes one realization into `out` (resized to n*n), using `scratch`
/// as workspace. Deterministic in (plan, seed).
void sample_field_into(const SamplerPlan& plan, std::uint64_t seed,
                       std::vector<std::complex<double>>& scratch,
                       std::vector<std::complex<double>>& out);

} // namespace detail

} // namespace qvcz
