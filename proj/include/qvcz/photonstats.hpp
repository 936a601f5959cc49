#pragma once
#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qvcz/config.hpp"
#include "qvcz/polselect.hpp"

namespace qvcz {

/// Detector-mode mean photon number: the absolute count scale is not fixed
/// by the optical constants, so |alpha|^2 anchors it (plane-independent).
double detector_mean_occupation(const PhysicalConfig& config);

/// Gaussian second moments of the four detected coherent amplitudes
///   t = (eta_{iA}(r1), eta_{jB}(r2), eta_{kC}(r1), eta_{lD}(r2))
/// for one source-polarization combo (A, B, C, D), in photon units.
/// Zero mean, zero pseudo-covariance.
struct AmplitudeCovariance {
  PolSelector selector;
  std::array<Pol, 4> source_combo; ///< (A, B, C, D)
  double z = 0.0;
  double nu = 0.0;
  Eigen::Matrix4cd c; ///< Hermitian <t_m* t_n>

  /// 8x8 real covariance over (Re t1, Im t1, ..., Re t4, Im t4).
  Eigen::Matrix<double, 8, 8> real_gamma() const;
  static Eigen::Matrix4cd complex_from_real(
      const Eigen::Matrix<double, 8, 8>& gamma);
};

AmplitudeCovariance build_covariance(const PhysicalConfig& config,
                                     const PolSelector& selector,
                                     const std::array<Pol, 4>& source_combo,
                                     double z);

class CutoffError : public std::runtime_error {
public:
  CutoffError(const std::string& msg, int suggested)
      : std::runtime_error(msg), suggested_cutoff(suggested) {}
  int suggested_cutoff;
};

/// Joint photon-number distribution p(n1, n2) up to a Fock cutoff with
/// tail-mass bookkeeping. Only diagonal selectors admit one.
struct JointPhotonDistribution {
  PolSelector selector;
  int cutoff = 20;
  double nu = 0.0;
  double z = 0.0;
  double tail_mass = 0.0;
  Eigen::MatrixXd p; ///< (cutoff+1) x (cutoff+1), row = n1, col = n2

  std::vector<double> marginal1() const; ///< row sums
  std::vector<double> marginal2() const; ///< column sums
};

/// Builds p(n1, n2) for a diagonal selector at plane z as the 1/4-weighted
/// mixture over source-polarization branches of two-mode Gaussian-field
/// photon distributions. Each branch entry comes from the closed-form
/// expansion of the generating function 1/det(I + diag(1-x,1-y) C) in long
/// double (the moment route); a deterministic quadrature over the reduced
/// Gaussian is kept as an internal oracle (two_mode_distribution_quadrature).
/// Throws CutoffError when tail_mass would exceed tail_tol.
JointPhotonDistribution joint_photon_distribution(const PhysicalConfig& config,
                                                  const PolSelector& selector,
                                                  double nu, int cutoff = 20,
                                                  double tail_tol = 1e-6);

/// Same distribution addressed by propagation distance z.
JointPhotonDistribution joint_photon_distribution_at_z(
    const PhysicalConfig& config, const PolSelector& selector, double z,
    int cutoff = 20, double tail_tol = 1e-6);

/// Single-detector photon distribution, computed independently of the joint
/// build: an equal mixture of Bose-Einstein distributions over the source
/// polarization branches.
std::vector<double> single_detector_marginal(const PhysicalConfig& config,
                                             Pol projection, int cutoff);

/// Joint distribution of two-mode Gaussian light with equal means and
/// window cross-correlation sinc(nu): the no-grating thermal reference.
JointPhotonDistribution thermal_reference_distribution(double mean_occupation,
                                                       double nu, int cutoff);

/// Product of Poisson marginals: the frozen-field (coherent) reference.
JointPhotonDistribution coherent_reference_distribution(double mean1,
                                                        double mean2,
                                                        int cutoff);

/// One branch entry p(n, m) for a two-mode zero-mean Gaussian field with
/// covariance [[mean1, c],[c*, mean2]], |c|^2 = cross_abs2.
double two_mode_photon_probability(double mean1, double mean2,
                                   double cross_abs2, int n, int m);

/// Internal oracle: same quantity by Gauss-Laguerre x trapezoid quadrature
/// over the reduced 3-dimensional Gaussian integral.
double two_mode_distribution_quadrature(double mean1, double mean2,
                                        double cross_abs2, int n, int m);

/// Degree of second-order self coherence from a marginal:
/// sum n(n-1) p / (sum n p)^2. Throws on zero mean photon number.
double g2_self_from_distribution(const std::vector<double>& marginal);

/// Moment-based mutual coherence from the joint distribution:
/// sum n1 n2 p / (sum n1 p . sum n2 p); equals g2 for the same selector.
double g2_mutual_from_distribution(const JointPhotonDistribution& dist);

/// Multiphoton degree of second-order mutual coherence
///   p(n1, n2) / (sum_n p(n, n2) . sum_m p(n1, m))
/// computed with p normalized. Throws std::domain_error when a marginal
/// vanishes.
double multiphoton_g2_tilde(const JointPhotonDistribution& dist, int n1,
                            int n2);

std::vector<double> bose_einstein_marginal(double mean, int cutoff);
std::vector<double> poisson_marginal(double mean, int cutoff);

/// Total-variation distance between two joint distributions on the same
/// cutoff box (half the L1 difference, tail masses included).
double total_variation_distance(const JointPhotonDistribution& a,
                                const JointPhotonDistribution& b);

} // namespace qvcz
