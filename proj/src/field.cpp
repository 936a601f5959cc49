#include "qvcz/field.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "qvcz/errors.hpp"
#include "qvcz/rng.hpp"

namespace qvcz {

double TransverseField::total_energy() const {
  double e = 0.0;
  for (const auto& v : samples) e += std::norm(v);
  return e * spacing * spacing;
}

GridSpec grid_for_config(const PhysicalConfig& config) {
  config.validate();
  const double target = 0.5 * std::sqrt(config.coherence_area_m2);
  // Integer number of cells per pixel and pixels per grating keeps masks
  // and windows exact on the grid.
  const double ratio_pix = config.grating_width_m / config.pixel_size_m;
  const int pixels = static_cast<int>(std::round(ratio_pix));
  if (std::abs(ratio_pix - pixels) > 1e-9 * ratio_pix || pixels < 1) {
    throw std::invalid_argument(
        "grid_for_config: grating width must be an integer number of pixels");
  }
  int cells_per_pixel =
      static_cast<int>(std::ceil(config.pixel_size_m / target - 1e-12));
  if (cells_per_pixel < 1) cells_per_pixel = 1;
  GridSpec spec;
  spec.cells_per_pixel = cells_per_pixel;
  spec.n = pixels * cells_per_pixel;
  spec.spacing = config.pixel_size_m / cells_per_pixel;
  return spec;
}

namespace {

/// Separable Gaussian taps e^{-x^2/(sigma/2)} truncated at 1e-4 relative.
std::vector<double> kernel_taps(double sigma, double spacing) {
  const double s2 = 0.5 * sigma;
  const int radius =
      static_cast<int>(std::ceil(std::sqrt(s2 * std::log(1e8)) / spacing));
  std::vector<double> taps(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) {
    const double x = i * spacing;
    taps[i + radius] = std::exp(-x * x / s2);
  }
  return taps;
}

} // namespace

namespace detail {

SamplerPlan make_sampler_plan(const PhysicalConfig& config) {
  SamplerPlan plan;
  plan.spec = grid_for_config(config);
  if (plan.spec.spacing >
      0.5 * std::sqrt(config.coherence_area_m2) * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "sampler: grid spacing exceeds sqrt(sigma)/2, coherence cells "
        "unresolved");
  }
  plan.taps = kernel_taps(config.coherence_area_m2, plan.spec.spacing);
  const double n_bar = std::numbers::pi * config.coherence_area_m2 /
                       (config.pixel_size_m * config.pixel_size_m);
  // Scale so the discrete covariance integrates to n_bar exactly:
  // cov(rho_i, rho_k) = s^2 sum_j g2d(i-j) g2d(k-j), and
  // sum_k cov * drho^2 = (s * drho * tap_sum^2)^2 = n_bar.
  double tap_sum = 0.0;
  for (double t : plan.taps) tap_sum += t;
  plan.scale = std::sqrt(n_bar) / (plan.spec.spacing * tap_sum * tap_sum);
  return plan;
}

void sample_field_into(const SamplerPlan& plan, std::uint64_t seed,
                       std::vector<std::complex<double>>& scratch,
                       std::vector<std::complex<double>>& out) {
  const int n = plan.spec.n;
  const std::size_t total = static_cast<std::size_t>(n) * n;
  scratch.resize(total);
  out.resize(total);

  Xoshiro256pp rng(seed);
  {
    double* w = reinterpret_cast<double*>(out.data());
    for (std::size_t i = 0; i < total; ++i) {
      rng.next_cnormal(w[2 * i], w[2 * i + 1]);
    }
  }

  const int radius = (static_cast<int>(plan.taps.size()) - 1) / 2;
  const double* taps = plan.taps.data();

  // Separable convolution as shifted accumulation over the interleaved
  // re/im layout; every inner loop is a contiguous fused multiply-add.
  // x pass: out rows -> scratch rows.
  for (int iy = 0; iy < n; ++iy) {
    const double* src =
        reinterpret_cast<const double*>(&out[static_cast<std::size_t>(iy) * n]);
    double* dst = reinterpret_cast<double*>(
        &scratch[static_cast<std::size_t>(iy) * n]);
    std::fill(dst, dst + 2 * n, 0.0);
    for (int j = -radius; j <= radius; ++j) {
      const double t = taps[j + radius];
      const int lo = std::max(0, -j);
      const int hi = std::min(n - 1, n - 1 - j);
      const double* s = src + 2 * (lo + j);
      double* d = dst + 2 * lo;
      const int len = 2 * (hi - lo + 1);
      for (int k = 0; k < len; ++k) d[k] += t * s[k];
    }
  }
  // y pass: scratch rows -> out rows, applying the overall scale.
  std::fill(out.begin(), out.end(), std::complex<double>{0.0, 0.0});
  for (int jy = 0; jy < n; ++jy) {
    const double* src = reinterpret_cast<const double*>(
        &scratch[static_cast<std::size_t>(jy) * n]);
    const int lo = std::max(0, jy - radius);
    const int hi = std::min(n - 1, jy + radius);
    for (int iy = lo; iy <= hi; ++iy) {
      const double t = taps[jy - iy + radius] * plan.scale;
      double* dst = reinterpret_cast<double*>(
          &out[static_cast<std::size_t>(iy) * n]);
      for (int k = 0; k < 2 * n; ++k) dst[k] += t * src[k];
    }
  }
}

} // namespace detail

TransverseField sample_thermal_field(const PhysicalConfig& config,
                                     Pol polarization, std::uint64_t seed) {
  const detail::SamplerPlan plan = detail::make_sampler_plan(config);
  TransverseField field;
  field.n = plan.spec.n;
  field.spacing = plan.spec.spacing;
  field.half_width = 0.5 * config.grating_width_m;
  field.polarization = polarization;
  std::vector<std::complex<double>> scratch;
  detail::sample_field_into(plan, seed, scratch, field.samples);
  return field;
}

void validate_polarization_seeds(std::uint64_t seed_h, std::uint64_t seed_v) {
  if (seed_h == seed_v) {
    throw std::invalid_argument(
        "validate_polarization_seeds: the H and V components must not reuse "
        "one seed; the draws would be identical, not independent");
  }
}

PixelPolMask sample_pixel_polarizations(const PhysicalConfig& config,
                                        std::uint64_t seed) {
  const double ratio = config.grating_width_m / config.pixel_size_m;
  const int pixels = static_cast<int>(std::round(ratio));
  PixelPolMask mask;
  mask.pixels_per_axis = pixels;
  mask.h_mask.resize(static_cast<std::size_t>(pixels) * pixels);
  Xoshiro256pp rng(seed);
  for (auto& m : mask.h_mask) {
    m = (rng.next_u64() >> 63) ? 1 : 0;
  }
  return mask;
}

UnpolarizedRealization sample_unpolarized_realization(
    const PhysicalConfig& config, std::uint64_t field_seed,
    std::uint64_t mask_seed) {
  if (field_seed == mask_seed) {
    throw std::invalid_argument(
        "sample_unpolarized_realization: field and mask streams must use "
        "distinct seeds");
  }
  TransverseField base = sample_thermal_field(config, Pol::H, field_seed);
  const PixelPolMask mask = sample_pixel_polarizations(config, mask_seed);
  const GridSpec spec = grid_for_config(config);

  UnpolarizedRealization out;
  out.h = base;
  out.v = base;
  out.v.polarization = Pol::V;
  const int n = base.n;
  for (int iy = 0; iy < n; ++iy) {
    const int py = iy / spec.cells_per_pixel;
    for (int ix = 0; ix < n; ++ix) {
      const int px = ix / spec.cells_per_pixel;
      if (mask.is_h(px, py)) {
        out.v.samples[iy * n + ix] = 0.0;
      } else {
        out.h.samples[iy * n + ix] = 0.0;
      }
    }
  }
  return out;
}

void write_field_binary(const std::string& path, const TransverseField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_field_binary: cannot open " + path);
  for (const auto& v : field.samples) {
    const double re = v.real(), im = v.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(double));
    out.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  nlohmann::json sidecar;
  sidecar["nx"] = field.n;
  sidecar["ny"] = field.n;
  sidecar["spacing_m"] = field.spacing;
  sidecar["half_width_m"] = field.half_width;
  sidecar["polarization"] = std::string(1, pol_char(field.polarization));
  sidecar["layout"] = "row-major complex128 little-endian";
  std::ofstream side(path + ".json");
  side << sidecar.dump(2) << "\n";
}

TransverseField read_field_binary(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw IoError("read_field_binary: missing sidecar for " + path);
  nlohmann::json sidecar;
  side >> sidecar;
  TransverseField field;
  field.n = sidecar.at("nx").get<int>();
  field.spacing = sidecar.at("spacing_m").get<double>();
  field.half_width = sidecar.at("half_width_m").get<double>();
  field.polarization =
      sidecar.at("polarization").get<std::string>() == "V" ? Pol::V : Pol::H;
  field.samples.resize(static_cast<std::size_t>(field.n) * field.n);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_field_binary: cannot open " + path);
  for (auto& v : field.samples) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(double));
    in.read(reinterpret_cast<char*>(&im), sizeof(double));
    v = {re, im};
  }
  if (!in) throw IoError("read_field_binary: truncated file " + path);
  return field;
}

} // namespace qvcz
