#pragma once
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvcz/config.hpp"
#include "qvcz/grating.hpp"
#include "qvcz/polselect.hpp"

namespace qvcz {

/// Transverse position in the detection plane, meters.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Detector positions used throughout: r1 = +DeltaX/2, r2 = -DeltaX/2 on
/// the x-axis. Only the separation enters the results.
Point detector1(const PhysicalConfig& config);
Point detector2(const PhysicalConfig& config);

/// sin(pi x)/(pi x), continuous at 0.
double sinc(double x);

/// Grating-row product line integral
///   F_nu[(X,S),(Y,T)] = Int_{-1/2}^{1/2} du e^{i 2 pi nu u}
///                       P_{XS}(pi u) P_{YT}(pi u)
/// over the normalized grating axis u = x/L, by adaptive Gauss-Legendre.
/// These are the building blocks of every correlator here.
std::complex<double> line_moment(double nu, Port x_port, Pol x_src,
                                 Port y_port, Pol y_src,
                                 double* err_estimate = nullptr);

/// Mixture-averaged second moment of the detected amplitudes,
///   <eta_A*(r1) eta_B(r2)>  (source polarizations averaged),
/// scale-anchored so that the diagonal (A == B, r1 == r2) equals the G1
/// closed form sqrt(I0) L / (2 z^2 lambda^2).
std::complex<double> second_moment(const PhysicalConfig& config, Pol a, Pol b,
                                   Point r1, Point r2, double z);

/// 4x4 Hermitian matrix of second moments over the detected modes ordered
/// (H at r1, V at r1, H at r2, V at r2).
struct SecondMomentMatrix {
  Eigen::Matrix4cd c;
  double z = 0.0;

  double hermiticity_defect() const;
  /// Smallest eigenvalue (real, by symmetrized solve).
  double min_eigenvalue() const;
};

SecondMomentMatrix second_moment_matrix(const PhysicalConfig& config, Point r1,
                                        Point r2, double z);

/// Normalized degree of second-order mutual coherence g2_ijkl(nu) evaluated
/// by quadrature of the two delta pairings; the imaginary residue must stay
/// below 1e-10 or it throws. err_estimate (optional) receives the summed
/// quadrature error estimates.
double g2_quadrature(const PhysicalConfig& config, const PolSelector& selector,
                     double nu, double* err_estimate = nullptr);

/// Signed-separation variant of the pairing sum (nu may be negative);
/// detector exchange r1 <-> r2 corresponds to nu -> -nu.
double g2_pairing_sum(const PolSelector& selector, double nu,
                      double* err_estimate = nullptr);

/// Raised by g2_closed_form for selectors without a listed expression.
class UnsupportedSelectorError : public std::invalid_argument {
public:
  explicit UnsupportedSelectorError(const std::string& msg)
      : std::invalid_argument(msg) {}
};

/// Closed-form g2 for HHHH, HVHV, VHHV, HHVV as finite sinc sums.
double g2_closed_form(const PolSelector& selector, double nu);

bool has_closed_form(const PolSelector& selector);

struct CurvePoint {
  double nu;
  double z_m;
  double g2;
  std::string method; ///< "closed" or "quadrature"
  double err_estimate;
  std::optional<std::string> error; ///< set when evaluation failed
};

struct CoherenceCurve {
  PolSelector selector;
  std::vector<CurvePoint> points;
};

/// g2 per grid point: closed form where supported, quadrature otherwise.
/// Per-point failures are recorded on the point, not thrown.
CoherenceCurve scan_curve(const PhysicalConfig& config,
                          const PolSelector& selector,
                          const std::vector<double>& nu_grid);

/// The x-line four-point integrand of the second-order correlator:
/// kernels x window x the 1/4-weighted source-polarization sum. Used to
/// validate the delta-pairing reduction against direct 4-fold quadrature.
struct FourPointIntegrand {
  PhysicalConfig config;
  PolSelector selector;
  double z;

  /// Kernel/window/polarization product at source x-positions p1..p4,
  /// detectors at +-DeltaX/2. Zero outside the grating window.
  std::complex<double> eval(double p1, double p2, double p3, double p4) const;
};

/// Log-spaced grid helper (inclusive endpoints).
std::vector<double> log_spaced_grid(double lo, double hi, int points);

} // namespace qvcz
