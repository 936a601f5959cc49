#include "qvcz/fresnel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace qvcz {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};
} // namespace

KernelValue fresnel_kernel(double rx, double ry, double rhox, double rhoy,
                           double z, double wavelength) {
  if (!(z > 0.0)) {
    throw std::invalid_argument("fresnel_kernel: z must be positive");
  }
  const double k = 2.0 * kPi / wavelength;
  const double dx = rx - rhox;
  const double dy = ry - rhoy;
  const std::complex<double> prefactor =
      std::exp(kI * (k * z)) / (kI * wavelength * z);
  return prefactor * std::exp(kI * (k * (dx * dx + dy * dy) / (2.0 * z)));
}

GratingOutput apply_grating(const TransverseField& field_h,
                            const TransverseField& field_v,
                            double grating_width) {
  if (field_h.n != field_v.n || field_h.spacing != field_v.spacing ||
      field_h.half_width != field_v.half_width) {
    throw std::invalid_argument("apply_grating: field grids do not match");
  }
  const int n = field_h.n;
  GratingOutput out{field_h, field_h, field_h};
  out.h.polarization = Pol::H;
  out.v.polarization = Pol::V;

  // P varies in x only; precompute per column.
  std::vector<std::array<double, 6>> cols(n);
  for (int ix = 0; ix < n; ++ix) {
    const GratingMatrix m = grating_matrix(field_h.coord(ix), grating_width);
    cols[ix] = {m(Port::H, Pol::H),    m(Port::H, Pol::V),
                m(Port::V, Pol::H),    m(Port::V, Pol::V),
                m(Port::Loss, Pol::H), m(Port::Loss, Pol::V)};
  }
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const auto& c = cols[ix];
      const std::complex<double> fh = field_h.at(ix, iy);
      const std::complex<double> fv = field_v.at(ix, iy);
      out.h.at(ix, iy) = c[0] * fh + c[1] * fv;
      out.v.at(ix, iy) = c[2] * fh + c[3] * fv;
      out.loss.at(ix, iy) = c[4] * fh + c[5] * fv;
    }
  }
  return out;
}

double PropagatedField::total_energy() const {
  double e = 0.0;
  for (const auto& v : samples) e += std::norm(v);
  return e * spacing * spacing;
}

namespace {

PropagatedField propagate_quadrature(const TransverseField& field, double z,
                                     double wavelength,
                                     const DetectionWindow& window) {
  const int n_out = window.samples;
  if (n_out < 1 || !(window.extent > 0.0)) {
    throw std::invalid_argument("propagate: invalid detection window");
  }
  const double reach = 0.5 * window.extent + field.half_width;
  const double bound = wavelength * z / (2.0 * reach);
  if (field.spacing > bound * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "propagate: aliasing bound violated, spacing " +
        std::to_string(field.spacing) + " m exceeds lambda z / (2 reach) = " +
        std::to_string(bound) + " m");
  }
  PropagatedField out;
  out.n = n_out;
  out.spacing = window.extent / n_out;
  out.x0 = -0.5 * window.extent;
  out.polarization = field.polarization;
  out.samples.assign(static_cast<std::size_t>(n_out) * n_out, {0.0, 0.0});

  const double k = 2.0 * kPi / wavelength;
  const int n = field.n;
  const double cell = field.spacing * field.spacing;
  const std::complex<double> prefactor =
      std::exp(kI * (k * z)) / (kI * wavelength * z) * cell;

  // Separable chirp: K = pref . e^{ik(rx-x)^2/2z} e^{ik(ry-y)^2/2z}.
  // Precompute the x-factor for every (output, input) pair, then reduce
  // over y per output row.
  std::vector<std::complex<double>> xfac(static_cast<std::size_t>(n_out) * n);
  for (int ox = 0; ox < n_out; ++ox) {
    const double rx = out.coord(ox);
    for (int ix = 0; ix < n; ++ix) {
      const double d = rx - field.coord(ix);
      xfac[ox * n + ix] = std::exp(kI * (k * d * d / (2.0 * z)));
    }
  }
  std::vector<std::complex<double>> partial(n); // sum over y per input column
  for (int oy = 0; oy < n_out; ++oy) {
    const double ry = out.coord(oy);
    for (int ix = 0; ix < n; ++ix) partial[ix] = 0.0;
    for (int iy = 0; iy < n; ++iy) {
      const double d = ry - field.coord(iy);
      const std::complex<double> yfac = std::exp(kI * (k * d * d / (2.0 * z)));
      for (int ix = 0; ix < n; ++ix) {
        partial[ix] += yfac * field.at(ix, iy);
      }
    }
    for (int ox = 0; ox < n_out; ++ox) {
      std::complex<double> acc = 0.0;
      const std::complex<double>* row = &xfac[static_cast<std::size_t>(ox) * n];
      for (int ix = 0; ix < n; ++ix) acc += row[ix] * partial[ix];
      out.at(ox, oy) = prefactor * acc;
    }
  }
  const double e_in = field.total_energy();
  out.captured_energy_fraction = e_in > 0.0 ? out.total_energy() / e_in : 1.0;
  return out;
}

void fft2_inplace(std::vector<std::complex<double>>& data, int n, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(n), spec(n);
  // rows
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) line[ix] = data[iy * n + ix];
    if (inverse) fft.inv(spec, line); else fft.fwd(spec, line);
    for (int ix = 0; ix < n; ++ix) data[iy * n + ix] = spec[ix];
  }
  // columns
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) line[iy] = data[iy * n + ix];
    if (inverse) fft.inv(spec, line); else fft.fwd(spec, line);
    for (int iy = 0; iy < n; ++iy) data[iy * n + ix] = spec[iy];
  }
}

PropagatedField propagate_transfer(const TransverseField& field, double z,
                                   double wavelength) {
  const int n = field.n;
  const double width = n * field.spacing;
  if (wavelength * z > static_cast<double>(n) * field.spacing * field.spacing *
                           (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "propagate: transfer-function sampling bound z <= N drho^2 / lambda "
        "violated; use the scaled transform");
  }
  PropagatedField out;
  out.n = n;
  out.spacing = field.spacing;
  out.x0 = -field.half_width + 0.5 * field.spacing;
  out.polarization = field.polarization;
  out.samples = field.samples;

  fft2_inplace(out.samples, n, false);
  const double k = 2.0 * kPi / wavelength;
  for (int my = 0; my < n; ++my) {
    const int sy = my < (n + 1) / 2 ? my : my - n;
    const double fy = sy / width;
    for (int mx = 0; mx < n; ++mx) {
      const int sx = mx < (n + 1) / 2 ? mx : mx - n;
      const double fx = sx / width;
      const std::complex<double> h =
          std::exp(kI * (k * z)) *
          std::exp(-kI * (kPi * wavelength * z * (fx * fx + fy * fy)));
      out.samples[my * n + mx] *= h;
    }
  }
  fft2_inplace(out.samples, n, true);
  out.captured_energy_fraction = 1.0;
  return out;
}

PropagatedField propagate_scaled(const TransverseField& field, double z,
                                 double wavelength) {
  const int n = field.n;
  const double k = 2.0 * kPi / wavelength;
  PropagatedField out;
  out.n = n;
  out.spacing = wavelength * z / (n * field.spacing);
  out.x0 = -0.5 * n * out.spacing;
  out.polarization = field.polarization;
  out.samples.resize(field.samples.size());

  // g = f . e^{ik rho^2 / 2z}
  for (int iy = 0; iy < n; ++iy) {
    const double y = field.coord(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double x = field.coord(ix);
      out.samples[iy * n + ix] =
          field.at(ix, iy) *
          std::exp(kI * (k * (x * x + y * y) / (2.0 * z)));
    }
  }
  fft2_inplace(out.samples, n, false);

  // Reorder to signed output indices and attach chirps. Input cell centers
  // sit at (j - n/2 + 1/2) drho, hence the per-axis twiddle below.
  std::vector<std::complex<double>> shifted(out.samples.size());
  const double cell = field.spacing * field.spacing;
  const std::complex<double> prefactor =
      std::exp(kI * (k * z)) / (kI * wavelength * z) * cell;
  std::vector<std::complex<double>> axis_phase(n);
  for (int m = 0; m < n; ++m) {
    const int ms = m - n / 2; // signed index of output sample m
    axis_phase[m] = std::polar(1.0, kPi * ms - kPi * ms / static_cast<double>(n));
  }
  for (int my = 0; my < n; ++my) {
    const int sy = my - n / 2;
    const int ky = ((sy % n) + n) % n;
    const double ry = out.coord(my);
    for (int mx = 0; mx < n; ++mx) {
      const int sx = mx - n / 2;
      const int kx = ((sx % n) + n) % n;
      const double rx = out.coord(mx);
      shifted[my * n + mx] =
          prefactor * axis_phase[mx] * axis_phase[my] *
          std::exp(kI * (k * (rx * rx + ry * ry) / (2.0 * z))) *
          out.samples[ky * n + kx];
    }
  }
  out.samples = std::move(shifted);
  out.captured_energy_fraction = 1.0;
  return out;
}

} // namespace

PropagatedField propagate(const TransverseField& field, double z,
                          double wavelength, const DetectionWindow& window,
                          PropagationMethod method, double min_captured) {
  if (!(z > 0.0)) {
    throw std::invalid_argument("propagate: z must be positive");
  }
  if (field.n < 2 || field.samples.size() !=
                         static_cast<std::size_t>(field.n) * field.n) {
    throw std::invalid_argument("propagate: malformed input field");
  }
  PropagationMethod chosen = method;
  if (chosen == PropagationMethod::Auto) {
    chosen = (wavelength * z <=
              static_cast<double>(field.n) * field.spacing * field.spacing)
                 ? PropagationMethod::TransferFunction
                 : PropagationMethod::ScaledTransform;
  }
  PropagatedField out;
  switch (chosen) {
    case PropagationMethod::DirectQuadrature:
      out = propagate_quadrature(field, z, wavelength, window);
      break;
    case PropagationMethod::TransferFunction:
      out = propagate_transfer(field, z, wavelength);
      break;
    case PropagationMethod::ScaledTransform:
      out = propagate_scaled(field, z, wavelength);
      break;
    default:
      throw std::logic_error("propagate: unreachable");
  }
  if (out.captured_energy_fraction < min_captured) {
    throw std::runtime_error(
        "propagate: detection window too small, captured energy fraction " +
        std::to_string(out.captured_energy_fraction));
  }
  return out;
}

std::complex<double> propagate_to_point(const TransverseField& field, double z,
                                        double wavelength, double rx,
                                        double ry) {
  const double k = 2.0 * kPi / wavelength;
  const int n = field.n;
  std::complex<double> acc = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double dy = ry - field.coord(iy);
    const std::complex<double> yfac = std::exp(kI * (k * dy * dy / (2.0 * z)));
    std::complex<double> row = 0.0;
    for (int ix = 0; ix < n; ++ix) {
      const double dx = rx - field.coord(ix);
      row += std::exp(kI * (k * dx * dx / (2.0 * z))) * field.at(ix, iy);
    }
    acc += yfac * row;
  }
  const std::complex<double> prefactor =
      std::exp(kI * (k * z)) / (kI * wavelength * z);
  return prefactor * acc * field.spacing * field.spacing;
}

} // namespace qvcz
