#include "qvcz/photonstats.hpp"

#include <cmath>
#include <numbers>

#include "qvcz/correlators.hpp"
#include "qvcz/quadrature.hpp"

namespace qvcz {

namespace {

constexpr double kPi = std::numbers::pi;

Port port_of(Pol p) { return p == Pol::H ? Port::H : Port::V; }

/// Branch moment <eta_{XS}*(ra) eta_{YT}(rb)> in photon units; separation
/// enters through nu (positive when ra = r1, rb = r2).
std::complex<double> branch_moment(double mean_occ, double nu, Pol x_proj,
                                   Pol x_src, Pol y_proj, Pol y_src) {
  return 4.0 * mean_occ *
         line_moment(nu, port_of(x_proj), x_src, port_of(y_proj), y_src);
}

} // namespace

double detector_mean_occupation(const PhysicalConfig& config) {
  return config.alpha_mag * config.alpha_mag;
}

Eigen::Matrix<double, 8, 8> AmplitudeCovariance::real_gamma() const {
  Eigen::Matrix<double, 8, 8> g;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      const std::complex<double> v = c(m, n);
      // Zero pseudo-covariance: <Re Re> = <Im Im> = Re(v)/2,
      // <Re_m Im_n> = Im(v)/2, <Im_m Re_n> = -Im(v)/2.
      g(2 * m, 2 * n) = 0.5 * v.real();
      g(2 * m + 1, 2 * n + 1) = 0.5 * v.real();
      g(2 * m, 2 * n + 1) = 0.5 * v.imag();
      g(2 * m + 1, 2 * n) = -0.5 * v.imag();
    }
  }
  return g;
}

Eigen::Matrix4cd AmplitudeCovariance::complex_from_real(
    const Eigen::Matrix<double, 8, 8>& gamma) {
  Eigen::Matrix4cd c;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      const double re = gamma(2 * m, 2 * n) + gamma(2 * m + 1, 2 * n + 1);
      const double im = gamma(2 * m, 2 * n + 1) - gamma(2 * m + 1, 2 * n);
      c(m, n) = {re, im};
    }
  }
  return c;
}

AmplitudeCovariance build_covariance(const PhysicalConfig& config,
                                     const PolSelector& selector,
                                     const std::array<Pol, 4>& source_combo,
                                     double z) {
  if (!(z > 0.0)) {
    throw std::invalid_argument("build_covariance: z must be positive");
  }
  const DerivedParams dp = derive_params(config);
  const double nu = config.grating_width_m * config.detector_separation_m /
                    (config.wavelength_m * z);
  const double mean_occ = detector_mean_occupation(config);

  // Mode order: (i at r1, j at r2, k at r1, l at r2).
  const Pol proj[4] = {selector.i, selector.j, selector.k, selector.l};
  const double rx[4] = {+0.5, -0.5, +0.5, -0.5}; // in units of DeltaX

  AmplitudeCovariance out;
  out.selector = selector;
  out.source_combo = source_combo;
  out.z = z;
  out.nu = nu;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      const double nu_mn = (rx[m] - rx[n]) * nu; // 0 or +-nu
      out.c(m, n) = branch_moment(mean_occ, nu_mn, proj[m], source_combo[m],
                                  proj[n], source_combo[n]);
    }
  }
  (void)dp;
  return out;
}

double two_mode_photon_probability(double mean1, double mean2,
                                   double cross_abs2, int n, int m) {
  if (n < 0 || m < 0) return 0.0;
  const long double n1 = mean1;
  const long double n2 = mean2;
  long double q = n1 * n2 - static_cast<long double>(cross_abs2);
  if (q < 0.0L) q = 0.0L; // covariance is PSD; clamp rounding
  const long double alpha = 1.0L + n1 + n2 + q;
  const long double b1 = n1 + q;
  const long double b2 = n2 + q;

  long double sum = 0.0L;
  const int jmax = std::min(n, m);
  for (int j = 0; j <= jmax; ++j) {
    // C(m, j) * C(m+n-j, n-j) * b2^(m-j) * b1^(n-j) * (-q)^j / alpha^(m+n-j+1)
    long double log_mag = lgammal(m + 1.0L) - lgammal(j + 1.0L) -
                          lgammal(m - j + 1.0L) + lgammal(m + n - j + 1.0L) -
                          lgammal(n - j + 1.0L) - lgammal(m + 1.0L) -
                          (m + n - j + 1.0L) * logl(alpha);
    if (m - j > 0) {
      if (b2 <= 0.0L) continue;
      log_mag += (m - j) * logl(b2);
    }
    if (n - j > 0) {
      if (b1 <= 0.0L) continue;
      log_mag += (n - j) * logl(b1);
    }
    if (j > 0) {
      if (q <= 0.0L) continue;
      log_mag += j * logl(q);
    }
    const long double term = expl(log_mag);
    sum += (j % 2 == 0) ? term : -term;
  }
  return static_cast<double>(sum);
}

double two_mode_distribution_quadrature(double mean1, double mean2,
                                        double cross_abs2, int n, int m) {
  // Diagonalize [[n1, c], [c*, n2]] with c real >= 0 (a global phase on one
  // mode is free): a = ct sqrt(l1) x1 - st sqrt(l2) x2,
  //                b = st sqrt(l1) x1 + ct sqrt(l2) x2.
  const double c = std::sqrt(std::max(0.0, cross_abs2));
  const double tr = mean1 + mean2;
  const double disc = std::sqrt(0.25 * (mean1 - mean2) * (mean1 - mean2) + c * c);
  const double l1 = 0.5 * tr + disc;
  const double l2 = std::max(0.0, 0.5 * tr - disc);
  const double th = 0.5 * std::atan2(2.0 * c, mean1 - mean2);
  const double ct = std::cos(th), st = std::sin(th);

  static const int kLag = 48;
  // Gauss-Laguerre nodes for Integral_0^inf e^-t f(t) dt.
  struct Lag {
    std::vector<double> x, w;
  };
  static const Lag lag = [] {
    Lag l;
    const int nn = kLag;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(nn, nn);
    for (int k = 0; k < nn; ++k) {
      j(k, k) = 2.0 * k + 1.0;
      if (k + 1 < nn) {
        j(k, k + 1) = k + 1.0;
        j(k + 1, k) = k + 1.0;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    l.x.resize(nn);
    l.w.resize(nn);
    for (int k = 0; k < nn; ++k) {
      l.x[k] = es.eigenvalues()(k);
      const double v0 = es.eigenvectors()(0, k);
      l.w[k] = v0 * v0;
    }
    return l;
  }();

  const int kPhi = 64;
  auto log_poisson = [](int k, double lam) -> double {
    if (lam <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return k * std::log(lam) - lam - std::lgamma(k + 1.0);
  };

  double total = 0.0;
  for (int a = 0; a < kLag; ++a) {
    const double t1 = lag.x[a];
    for (int b = 0; b < kLag; ++b) {
      const double t2 = lag.x[b];
      double phi_acc = 0.0;
      for (int f = 0; f < kPhi; ++f) {
        const double phi = 2.0 * kPi * f / kPhi;
        const double mix = 2.0 * std::sqrt(l1 * t1 * l2 * t2) * std::cos(phi);
        const double i1 = ct * ct * l1 * t1 + st * st * l2 * t2 - ct * st * mix;
        const double i2 = st * st * l1 * t1 + ct * ct * l2 * t2 + ct * st * mix;
        const double lp = log_poisson(n, std::max(0.0, i1)) +
                          log_poisson(m, std::max(0.0, i2));
        phi_acc += std::isfinite(lp) ? std::exp(lp) : 0.0;
      }
      total += lag.w[a] * lag.w[b] * phi_acc / kPhi;
    }
  }
  return total;
}

namespace {

/// Branch parameters of the photon-number mixture for a diagonal selector.
struct Branch {
  double n1, n2, cross_abs2;
};

std::array<Branch, 4> mixture_branches(const PhysicalConfig& config,
                                       const PolSelector& selector,
                                       double nu) {
  const double mean_occ = detector_mean_occupation(config);
  std::array<Branch, 4> branches;
  int idx = 0;
  for (Pol a : {Pol::H, Pol::V}) {
    for (Pol b : {Pol::H, Pol::V}) {
      Branch br;
      br.n1 = branch_moment(mean_occ, 0.0, selector.i, a, selector.i, a).real();
      br.n2 = branch_moment(mean_occ, 0.0, selector.j, b, selector.j, b).real();
      br.cross_abs2 =
          std::norm(branch_moment(mean_occ, nu, selector.i, a, selector.j, b));
      branches[idx++] = br;
    }
  }
  return branches;
}

int suggested_cutoff_for(const std::array<Branch, 4>& branches,
                         double tail_tol) {
  for (int cut = 4; cut <= 4096; cut *= 2) {
    double tail = 0.0;
    for (const Branch& br : branches) {
      const double t1 = std::pow(br.n1 / (1.0 + br.n1), cut + 1);
      const double t2 = std::pow(br.n2 / (1.0 + br.n2), cut + 1);
      tail += 0.25 * (t1 + t2);
    }
    if (tail <= 0.5 * tail_tol) return cut;
  }
  return 4096;
}

} // namespace

JointPhotonDistribution joint_photon_distribution(const PhysicalConfig& config,
                                                  const PolSelector& selector,
                                                  double nu, int cutoff,
                                                  double tail_tol) {
  if (!selector.is_diagonal()) {
    throw std::invalid_argument(
        "joint_photon_distribution: selector " + selector.name() +
        " is not diagonal (i=k, j=l); photon-number dynamics are only "
        "evaluated for diagonal selectors");
  }
  if (cutoff < 1) {
    throw std::invalid_argument("joint_photon_distribution: cutoff must be >= 1");
  }
  if (!(nu > 0.0)) {
    throw std::invalid_argument("joint_photon_distribution: nu must be positive");
  }
  config.validate();

  const auto branches = mixture_branches(config, selector, nu);

  JointPhotonDistribution dist;
  dist.selector = selector;
  dist.cutoff = cutoff;
  dist.nu = nu;
  dist.z = z_from_nu(config, nu);
  dist.p = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) {
    for (int m = 0; m <= cutoff; ++m) {
      double v = 0.0;
      for (const Branch& br : branches) {
        v += 0.25 * two_mode_photon_probability(br.n1, br.n2, br.cross_abs2, n, m);
      }
      dist.p(n, m) = v;
    }
  }
  dist.tail_mass = 1.0 - dist.p.sum();
  if (dist.tail_mass > tail_tol) {
    throw CutoffError(
        "joint_photon_distribution: tail mass " +
            std::to_string(dist.tail_mass) + " exceeds " +
            std::to_string(tail_tol) + " at cutoff " + std::to_string(cutoff),
        suggested_cutoff_for(branches, tail_tol));
  }
  return dist;
}

JointPhotonDistribution joint_photon_distribution_at_z(
    const PhysicalConfig& config, const PolSelector& selector, double z,
    int cutoff, double tail_tol) {
  if (!(z > 0.0)) {
    throw std::invalid_argument("joint_photon_distribution_at_z: z must be positive");
  }
  const double nu = config.grating_width_m * config.detector_separation_m /
                    (config.wavelength_m * z);
  return joint_photon_distribution(config, selector, nu, cutoff, tail_tol);
}

std::vector<double> single_detector_marginal(const PhysicalConfig& config,
                                             Pol projection, int cutoff) {
  const double mean_occ = detector_mean_occupation(config);
  std::vector<double> out(cutoff + 1, 0.0);
  for (Pol src : {Pol::H, Pol::V}) {
    const double mean =
        branch_moment(mean_occ, 0.0, projection, src, projection, src).real();
    const auto be = bose_einstein_marginal(mean, cutoff);
    for (int n = 0; n <= cutoff; ++n) out[n] += 0.5 * be[n];
  }
  return out;
}

JointPhotonDistribution thermal_reference_distribution(double mean_occupation,
                                                       double nu, int cutoff) {
  JointPhotonDistribution dist;
  dist.selector = kHHHH;
  dist.cutoff = cutoff;
  dist.nu = nu;
  dist.z = 0.0;
  dist.p = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  const double c2 = std::pow(mean_occupation * sinc(nu), 2);
  for (int n = 0; n <= cutoff; ++n) {
    for (int m = 0; m <= cutoff; ++m) {
      dist.p(n, m) =
          two_mode_photon_probability(mean_occupation, mean_occupation, c2, n, m);
    }
  }
  dist.tail_mass = 1.0 - dist.p.sum();
  return dist;
}

JointPhotonDistribution coherent_reference_distribution(double mean1,
                                                        double mean2,
                                                        int cutoff) {
  JointPhotonDistribution dist;
  dist.selector = kHHHH;
  dist.cutoff = cutoff;
  dist.nu = 0.0;
  dist.z = 0.0;
  dist.p = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  const auto p1 = poisson_marginal(mean1, cutoff);
  const auto p2 = poisson_marginal(mean2, cutoff);
  for (int n = 0; n <= cutoff; ++n) {
    for (int m = 0; m <= cutoff; ++m) {
      dist.p(n, m) = p1[n] * p2[m];
    }
  }
  dist.tail_mass = 1.0 - dist.p.sum();
  return dist;
}

std::vector<double> JointPhotonDistribution::marginal1() const {
  std::vector<double> out(p.rows());
  for (int n = 0; n < p.rows(); ++n) out[n] = p.row(n).sum();
  return out;
}

std::vector<double> JointPhotonDistribution::marginal2() const {
  std::vector<double> out(p.cols());
  for (int m = 0; m < p.cols(); ++m) out[m] = p.col(m).sum();
  return out;
}

double g2_self_from_distribution(const std::vector<double>& marginal) {
  double mean = 0.0, fac = 0.0;
  for (std::size_t n = 0; n < marginal.size(); ++n) {
    mean += static_cast<double>(n) * marginal[n];
    fac += static_cast<double>(n) * (static_cast<double>(n) - 1.0) * marginal[n];
  }
  if (!(mean > 0.0)) {
    throw std::domain_error("g2_self_from_distribution: zero mean photon number");
  }
  return fac / (mean * mean);
}

double g2_mutual_from_distribution(const JointPhotonDistribution& dist) {
  const auto m1 = dist.marginal1();
  const auto m2 = dist.marginal2();
  double mean1 = 0.0, mean2 = 0.0, cross = 0.0;
  for (std::size_t n = 0; n < m1.size(); ++n) mean1 += n * m1[n];
  for (std::size_t m = 0; m < m2.size(); ++m) mean2 += m * m2[m];
  for (int n = 0; n <= dist.cutoff; ++n) {
    for (int m = 0; m <= dist.cutoff; ++m) {
      cross += static_cast<double>(n) * m * dist.p(n, m);
    }
  }
  if (!(mean1 > 0.0) || !(mean2 > 0.0)) {
    throw std::domain_error("g2_mutual_from_distribution: zero mean photon number");
  }
  return cross / (mean1 * mean2);
}

double multiphoton_g2_tilde(const JointPhotonDistribution& dist, int n1,
                            int n2) {
  if (n1 < 0 || n2 < 0 || n1 > dist.cutoff || n2 > dist.cutoff) {
    throw std::invalid_argument("multiphoton_g2_tilde: indices exceed cutoff");
  }
  const double total = dist.p.sum();
  const double row = dist.p.row(n1).sum() / total;
  const double col = dist.p.col(n2).sum() / total;
  if (row <= 0.0 || col <= 0.0) {
    throw std::domain_error(
        "multiphoton_g2_tilde: vanishing marginal at (n1, n2) = (" +
        std::to_string(n1) + ", " + std::to_string(n2) + ")");
  }
  return (dist.p(n1, n2) / total) / (row * col);
}

std::vector<double> bose_einstein_marginal(double mean, int cutoff) {
  std::vector<double> out(cutoff + 1);
  const double r = mean / (1.0 + mean);
  double v = 1.0 / (1.0 + mean);
  for (int n = 0; n <= cutoff; ++n) {
    out[n] = v;
    v *= r;
  }
  return out;
}

std::vector<double> poisson_marginal(double mean, int cutoff) {
  std::vector<double> out(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) {
    out[n] = std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
  }
  if (mean == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
  }
  return out;
}

double total_variation_distance(const JointPhotonDistribution& a,
                                const JointPhotonDistribution& b) {
  if (a.cutoff != b.cutoff) {
    throw std::invalid_argument("total_variation_distance: cutoff mismatch");
  }
  double l1 = (a.p - b.p).cwiseAbs().sum();
  l1 += std::abs(a.tail_mass - b.tail_mass);
  return 0.5 * l1;
}

} // namespace qvcz
