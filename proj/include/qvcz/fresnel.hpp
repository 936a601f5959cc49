#pragma once
#include <array>
#include <complex>

#include "qvcz/field.hpp"
#include "qvcz/grating.hpp"

namespace qvcz {

/// Value of the Fresnel kernel K(r, rho, z); |K| = 1/(lambda z) always.
using KernelValue = std::complex<double>;

/// K = e^{ikz}/(i lambda z) . e^{ik|r-rho|^2/(2z)} (quadratic phase).
KernelValue fresnel_kernel(double rx, double ry, double rhox, double rhoy,
                           double z, double wavelength);

/// The three grating output channels; the loss port exists so energy
/// bookkeeping closes but never reaches a detector.
struct GratingOutput {
  TransverseField h;
  TransverseField v;
  TransverseField loss;
};

/// Pointwise grating action on a matched H/V field pair. Throws on grid
/// mismatch.
GratingOutput apply_grating(const TransverseField& field_h,
                            const TransverseField& field_v,
                            double grating_width);

/// Detection-plane window: full extent and sampling of the output grid.
struct DetectionWindow {
  double extent = 0.0; ///< full width, meters (centered on the axis)
  int samples = 0;     ///< per axis
};

struct PropagatedField {
  int n = 0;
  double spacing = 0.0;
  double x0 = 0.0; ///< coordinate of sample 0 (cell center)
  Pol polarization = Pol::H;
  std::vector<std::complex<double>> samples; ///< row-major, iy*n + ix
  double captured_energy_fraction = 1.0;

  std::complex<double>& at(int ix, int iy) { return samples[iy * n + ix]; }
  const std::complex<double>& at(int ix, int iy) const {
    return samples[iy * n + ix];
  }
  double coord(int i) const { return x0 + i * spacing; }
  double total_energy() const;
};

enum class PropagationMethod {
  DirectQuadrature, ///< O(N^4) Riemann sum of the Fresnel integral (oracle)
  TransferFunction, ///< grid-preserving FFT convolution (near field)
  ScaledTransform,  ///< single-FFT scaled output grid (far field)
  Auto              ///< transfer function when the grid supports it
};

/// Discrete Fresnel propagation of a sampled field by distance z. Linear in
/// the input and energy conserving under the sampling bounds. The direct
/// quadrature path evaluates the integral on an arbitrary window; FFT paths
/// use their natural windows. Throws when the anti-aliasing bound
/// drho <= lambda z / (2 window_extent) is violated (quadrature path) or
/// when the requested window captures less than min_captured of the energy.
PropagatedField propagate(const TransverseField& field, double z,
                          double wavelength, const DetectionWindow& window,
                          PropagationMethod method = PropagationMethod::Auto,
                          double min_captured = 1.0 - 1e-6);

/// Field amplitude at a single detection point by direct quadrature.
std::complex<double> propagate_to_point(const TransverseField& field, double z,
                                        double wavelength, double rx,
                                        double ry);

} // namespace qvcz
