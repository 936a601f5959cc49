#include "qvcz/correlators.hpp"

#include <cmath>
#include <numbers>

#include "qvcz/quadrature.hpp"

namespace qvcz {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};
} // namespace

Point detector1(const PhysicalConfig& config) {
  return {0.5 * config.detector_separation_m, 0.0};
}

Point detector2(const PhysicalConfig& config) {
  return {-0.5 * config.detector_separation_m, 0.0};
}

double sinc(double x) {
  const double a = kPi * x;
  if (std::abs(a) < 1e-8) {
    return 1.0 - a * a / 6.0;
  }
  return std::sin(a) / a;
}

std::complex<double> line_moment(double nu, Port x_port, Pol x_src,
                                 Port y_port, Pol y_src,
                                 double* err_estimate) {
  const auto f = [=](double u) -> std::complex<double> {
    const double phase_arg = kPi * u;
    const double p = grating_entry(x_port, x_src, phase_arg) *
                     grating_entry(y_port, y_src, phase_arg);
    return std::polar(p, 2.0 * kPi * nu * u);
  };
  const IntegralResult r =
      integrate_complex(f, -0.5, 0.5, panels_for_cycles(nu), 1e-13, 1e-13);
  if (err_estimate) *err_estimate = r.error_estimate;
  return r.value;
}

namespace {

/// Separation parameter for generic detector positions.
double nu_of(const PhysicalConfig& config, Point r1, Point r2, double z) {
  return config.grating_width_m * (r1.x - r2.x) / (config.wavelength_m * z);
}

Port port_of(Pol p) { return p == Pol::H ? Port::H : Port::V; }

} // namespace

std::complex<double> second_moment(const PhysicalConfig& config, Pol a, Pol b,
                                   Point r1, Point r2, double z) {
  if (!(z > 0.0)) {
    throw std::invalid_argument("second_moment: z must be positive");
  }
  const double nux = nu_of(config, r1, r2, z);
  const double lam_z = config.wavelength_m * z;
  const double nuy = config.grating_width_m * (r1.y - r2.y) / lam_z;
  const double k = 2.0 * kPi / config.wavelength_m;
  const double r1sq = r1.x * r1.x + r1.y * r1.y;
  const double r2sq = r2.x * r2.x + r2.y * r2.y;
  const std::complex<double> global_phase =
      std::exp(kI * (k * (r2sq - r1sq) / (2.0 * z)));

  std::complex<double> pol_sum = 0.0;
  for (Pol s : {Pol::H, Pol::V}) {
    pol_sum += line_moment(nux, port_of(a), s, port_of(b), s);
  }
  // 1/2 per source polarization; x4 anchors the diagonal to G1.
  return 4.0 * g1_closed_form(config, z) * global_phase * sinc(nuy) * 0.5 *
         pol_sum;
}

SecondMomentMatrix second_moment_matrix(const PhysicalConfig& config, Point r1,
                                        Point r2, double z) {
  const Point pos[4] = {r1, r1, r2, r2};
  const Pol pol[4] = {Pol::H, Pol::V, Pol::H, Pol::V};
  SecondMomentMatrix m;
  m.z = z;
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      m.c(row, col) =
          second_moment(config, pol[row], pol[col], pos[row], pos[col], z);
    }
  }
  return m;
}

double SecondMomentMatrix::hermiticity_defect() const {
  return (c - c.adjoint()).cwiseAbs().maxCoeff();
}

double SecondMomentMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
      0.5 * (c + c.adjoint()));
  return es.eigenvalues().minCoeff();
}

double g2_pairing_sum(const PolSelector& selector, double nu,
                      double* err_estimate) {
  std::complex<double> total = 0.0;
  double err_sum = 0.0;
  double err = 0.0;
  for (Pol a : {Pol::H, Pol::V}) {
    for (Pol b : {Pol::H, Pol::V}) {
      // Pairing rho1=rho3, rho2=rho4: two zero-frequency line integrals.
      const std::complex<double> f_ik =
          line_moment(0.0, port_of(selector.i), a, port_of(selector.k), a, &err);
      err_sum += err;
      const std::complex<double> f_jl =
          line_moment(0.0, port_of(selector.j), b, port_of(selector.l), b, &err);
      err_sum += err;
      // Pairing rho1=rho4, rho2=rho3: conjugate pair at separation nu.
      const std::complex<double> f_il =
          line_moment(nu, port_of(selector.i), a, port_of(selector.l), b, &err);
      err_sum += err;
      const std::complex<double> f_jk =
          line_moment(nu, port_of(selector.j), b, port_of(selector.k), a, &err);
      err_sum += err;
      total += f_ik * f_jl + f_il * std::conj(f_jk);
    }
  }
  total *= 4.0; // normalization by G1(r1) G1(r2)

  if (std::abs(total.imag()) > 1e-10) {
    throw std::runtime_error(
        "g2_quadrature: imaginary residue " + std::to_string(total.imag()) +
        " exceeds 1e-10 for selector " + selector.name() +
        " (the correlator is not Hermitian for this index order)");
  }
  if (err_estimate) *err_estimate = err_sum;
  return total.real();
}

double g2_quadrature(const PhysicalConfig& config, const PolSelector& selector,
                     double nu, double* err_estimate) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw std::invalid_argument("g2_quadrature: nu must be positive");
  }
  config.validate();
  return g2_pairing_sum(selector, nu, err_estimate);
}

bool has_closed_form(const PolSelector& selector) {
  return selector == kHHHH || selector == kHVHV || selector == kVHHV ||
         selector == kHHVV;
}

double g2_closed_form(const PolSelector& selector, double nu) {
  const double s0 = sinc(nu);
  const double sp1 = sinc(nu + 1.0);
  const double sp2 = sinc(nu + 2.0);
  const double sm1 = sinc(1.0 - nu);
  const double sm2 = sinc(2.0 - nu);

  if (selector == kHHHH) {
    return (10.0 * s0 * s0 +
            2.0 * (6.0 * sp1 + sp2 + 6.0 * sm1 + sm2) * s0 +
            6.0 * sp1 * sp1 + sp2 * sp2 + 6.0 * sm1 * sm1 + sm2 * sm2 +
            4.0 * sp1 * sp2 + 4.0 * (sp1 + sm2) * sm1 + 16.0) /
           16.0;
  }
  if (selector == kHVHV) {
    const double d = sm1 - sp1;
    return (2.0 * s0 * s0 - 2.0 * (sp2 + sm2) * s0 + 2.0 * d * d +
            sp2 * sp2 + sm2 * sm2 + 16.0) /
           16.0;
  }
  if (selector == kVHHV) {
    const double d = sm1 - sp1;
    return (6.0 * s0 * s0 - 2.0 * (sp2 + sm2) * s0 + 2.0 * d * d -
            sp2 * sp2 - sm2 * sm2) /
           16.0;
  }
  if (selector == kHHVV) {
    const double d = sm1 - sp1;
    return (2.0 * s0 * s0 - 2.0 * (sp2 + sm2) * s0 + 2.0 * d * d +
            sp2 * sp2 + sm2 * sm2) /
           16.0;
  }
  throw UnsupportedSelectorError(
      "g2_closed_form: no listed expression for selector " + selector.name() +
      "; use g2_quadrature");
}

CoherenceCurve scan_curve(const PhysicalConfig& config,
                          const PolSelector& selector,
                          const std::vector<double>& nu_grid) {
  if (nu_grid.empty()) {
    throw std::invalid_argument("scan_curve: empty nu grid");
  }
  for (std::size_t n = 1; n < nu_grid.size(); ++n) {
    if (!(nu_grid[n] > nu_grid[n - 1])) {
      throw std::invalid_argument("scan_curve: nu grid must be strictly increasing");
    }
  }
  CoherenceCurve curve;
  curve.selector = selector;
  curve.points.reserve(nu_grid.size());
  const bool closed = has_closed_form(selector);
  for (double nu : nu_grid) {
    CurvePoint pt;
    pt.nu = nu;
    pt.z_m = z_from_nu(config, nu);
    pt.err_estimate = 0.0;
    try {
      if (closed) {
        pt.g2 = g2_closed_form(selector, nu);
        pt.method = "closed";
      } else {
        pt.g2 = g2_quadrature(config, selector, nu, &pt.err_estimate);
        pt.method = "quadrature";
      }
    } catch (const std::exception& e) {
      pt.g2 = std::numeric_limits<double>::quiet_NaN();
      pt.method = closed ? "closed" : "quadrature";
      pt.error = e.what();
    }
    curve.points.push_back(pt);
  }
  return curve;
}

std::complex<double> FourPointIntegrand::eval(double p1, double p2, double p3,
                                              double p4) const {
  const double half = 0.5 * config.grating_width_m;
  for (double p : {p1, p2, p3, p4}) {
    if (std::abs(p) > half) return 0.0;
  }
  const double k = 2.0 * kPi / config.wavelength_m;
  const double lam_z = config.wavelength_m * z;
  const double r1 = 0.5 * config.detector_separation_m;
  const double r2 = -0.5 * config.detector_separation_m;
  const auto kernel_x = [&](double r, double p) -> std::complex<double> {
    return std::polar(1.0 / std::sqrt(lam_z), k * (r - p) * (r - p) / (2.0 * z));
  };
  const std::complex<double> kernels = std::conj(kernel_x(r1, p1)) *
                                       std::conj(kernel_x(r2, p2)) *
                                       kernel_x(r1, p3) * kernel_x(r2, p4);
  const double w = kPi / config.grating_width_m;
  double pol_sum = 0.0;
  for (Pol a : {Pol::H, Pol::V}) {
    for (Pol b : {Pol::H, Pol::V}) {
      pol_sum += grating_entry(port_of(selector.i), a, w * p1) *
                 grating_entry(port_of(selector.j), b, w * p2) *
                 grating_entry(port_of(selector.k), a, w * p3) *
                 grating_entry(port_of(selector.l), b, w * p4);
    }
  }
  return kernels * (0.25 * pol_sum);
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0.0) || !(hi > lo) ) {
    if (points == 1 && lo > 0.0) return {lo};
    throw std::invalid_argument("log_spaced_grid: need points >= 1 and 0 < lo < hi");
  }
  std::vector<double> grid(points);
  const double ratio = std::log(hi / lo) / (points - 1);
  for (int n = 0; n < points; ++n) {
    grid[n] = lo * std::exp(ratio * n);
  }
  grid.back() = hi;
  return grid;
}

} // namespace qvcz
