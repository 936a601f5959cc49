#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qvcz/correlators.hpp"
#include "qvcz/field.hpp"
#include "qvcz/fresnel.hpp"
#include "qvcz/grating.hpp"
#include "qvcz/rng.hpp"

using namespace qvcz;

namespace {

TransverseField make_field(int n, double width,
                           std::complex<double> (*f)(double, double)) {
  TransverseField field;
  field.n = n;
  field.spacing = width / n;
  field.half_width = 0.5 * width;
  field.samples.resize(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      field.at(ix, iy) = f(field.coord(ix), field.coord(iy));
    }
  }
  return field;
}

std::complex<double> unit_aperture(double, double) { return {1.0, 0.0}; }

std::complex<double> gaussian_spot(double x, double y) {
  const double w = 2.0e-4;
  return {std::exp(-(x * x + y * y) / (w * w)), 0.0};
}

} // namespace

TEST_CASE("grating matrix at the reference positions") {
  const double L = 3e-3;
  SUBCASE("x = 0") {
    const auto m = grating_matrix(0.0, L);
    CHECK(m(Port::H, Pol::H) == doctest::Approx(1.0));
    CHECK(m(Port::V, Pol::H) == doctest::Approx(0.0));
    CHECK(m(Port::Loss, Pol::H) == doctest::Approx(0.0));
    CHECK(m(Port::H, Pol::V) == doctest::Approx(0.0));
    CHECK(m(Port::V, Pol::V) == doctest::Approx(0.0));
    CHECK(m(Port::Loss, Pol::V) == doctest::Approx(1.0));
  }
  SUBCASE("x = L/2") {
    const auto m = grating_matrix(0.5 * L, L);
    CHECK(m(Port::H, Pol::H) == doctest::Approx(0.0));
    CHECK(m(Port::V, Pol::H) == doctest::Approx(0.0));
    CHECK(m(Port::Loss, Pol::H) == doctest::Approx(1.0));
    CHECK(m(Port::H, Pol::V) == doctest::Approx(0.0));
    CHECK(m(Port::V, Pol::V) == doctest::Approx(1.0));
    CHECK(m(Port::Loss, Pol::V) == doctest::Approx(0.0));
  }
  SUBCASE("x = L/4") {
    const auto m = grating_matrix(0.25 * L, L);
    const double half = 0.5;
    const double rt = std::sqrt(0.5);
    CHECK(m(Port::H, Pol::H) == doctest::Approx(half));
    CHECK(m(Port::H, Pol::V) == doctest::Approx(half));
    CHECK(m(Port::V, Pol::H) == doctest::Approx(half));
    CHECK(m(Port::V, Pol::V) == doctest::Approx(half));
    CHECK(m(Port::Loss, Pol::H) == doctest::Approx(rt));
    CHECK(m(Port::Loss, Pol::V) == doctest::Approx(rt));
  }
}

TEST_CASE("grating columns have unit norm everywhere") {
  const double L = 3e-3;
  Xoshiro256pp rng(7);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = (rng.next_unit() - 0.5) * 10.0 * L;
    const auto m = grating_matrix(x, L);
    for (Pol b : {Pol::H, Pol::V}) {
      const double norm = m(Port::H, b) * m(Port::H, b) +
                          m(Port::V, b) * m(Port::V, b) +
                          m(Port::Loss, b) * m(Port::Loss, b);
      worst = std::max(worst, std::abs(norm - 1.0));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("grating is exactly periodic in L") {
  // Bitwise equality is meaningful when x and x + L carry no rounding:
  // use a dyadic width and dyadic offsets.
  const double L = 0.001953125; // 2^-9
  for (int j = -3000; j <= 3000; j += 7) {
    const double x = j * 0.0001220703125; // j * 2^-13
    const auto a = grating_matrix(x, L);
    const auto b = grating_matrix(x + L, L);
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 2; ++col) {
        CHECK(a.entries[row][col] == b.entries[row][col]);
      }
    }
  }
  // Arbitrary positions agree to rounding.
  const double Lr = 3e-3;
  Xoshiro256pp rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.next_unit() - 0.5) * 3.0 * Lr;
    const auto a = grating_matrix(x, Lr);
    const auto b = grating_matrix(x + Lr, Lr);
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 2; ++col) {
        CHECK(a.entries[row][col] ==
              doctest::Approx(b.entries[row][col]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("apply_grating matches the matrix and conserves energy") {
  PhysicalConfig c;
  c.grating_width_m = 1e-3;
  c.pixel_size_m = 250e-6;
  c.coherence_area_m2 = 2.5e-9;
  c.propagation_distance_m = 10.0;
  const auto fh = sample_thermal_field(c, Pol::H, 3);
  const auto fv = sample_thermal_field(c, Pol::V, 4);
  const auto out = apply_grating(fh, fv, c.grating_width_m);

  SUBCASE("pointwise energy identity on disjoint supports") {
    // The grating columns have unit norm but are not mutually orthogonal,
    // so energy is conserved pointwise exactly when the H and V inputs do
    // not overlap - which the unpolarized mixture guarantees.
    const auto real = sample_unpolarized_realization(c, 31, 32);
    const auto split = apply_grating(real.h, real.v, c.grating_width_m);
    for (int iy = 0; iy < real.h.n; ++iy) {
      for (int ix = 0; ix < real.h.n; ++ix) {
        const double in_e =
            std::norm(real.h.at(ix, iy)) + std::norm(real.v.at(ix, iy));
        const double out_e = std::norm(split.h.at(ix, iy)) +
                             std::norm(split.v.at(ix, iy)) +
                             std::norm(split.loss.at(ix, iy));
        CHECK(std::abs(out_e - in_e) <= 1e-12 * std::max(1.0, in_e));
      }
    }
  }
  SUBCASE("single-polarization input conserves energy pointwise") {
    TransverseField zero = fv;
    for (auto& v : zero.samples) v = 0.0;
    const auto pass = apply_grating(fh, zero, c.grating_width_m);
    for (int iy = 0; iy < fh.n; ++iy) {
      for (int ix = 0; ix < fh.n; ++ix) {
        const double in_e = std::norm(fh.at(ix, iy));
        const double out_e = std::norm(pass.h.at(ix, iy)) +
                             std::norm(pass.v.at(ix, iy)) +
                             std::norm(pass.loss.at(ix, iy));
        CHECK(std::abs(out_e - in_e) <= 1e-12 * std::max(1.0, in_e));
      }
    }
  }
  SUBCASE("outputs follow the matrix entries per column") {
    TransverseField zero = fv;
    for (auto& v : zero.samples) v = 0.0;
    const auto pass = apply_grating(fh, zero, c.grating_width_m);
    const int ix = fh.n / 2;
    const auto mm = grating_matrix(fh.coord(ix), c.grating_width_m);
    for (int iy = 0; iy < fh.n; ++iy) {
      const auto eh = mm(Port::H, Pol::H) * fh.at(ix, iy);
      const auto ev = mm(Port::V, Pol::H) * fh.at(ix, iy);
      CHECK(std::abs(pass.h.at(ix, iy) - eh) <= 1e-12 * (1.0 + std::abs(eh)));
      CHECK(std::abs(pass.v.at(ix, iy) - ev) <= 1e-12 * (1.0 + std::abs(ev)));
    }
  }
  SUBCASE("uniform fields at L/4") {
    TransverseField ones = fh;
    for (auto& v : ones.samples) v = 1.0;
    const auto both = apply_grating(ones, ones, c.grating_width_m);
    // at rho_x = L/4: H' = V' = 1, loss = sqrt(2)
    const double x_target = 0.25 * c.grating_width_m;
    int ix_best = 0;
    double best = 1e9;
    for (int ix = 0; ix < ones.n; ++ix) {
      if (std::abs(ones.coord(ix) - x_target) < best) {
        best = std::abs(ones.coord(ix) - x_target);
        ix_best = ix;
      }
    }
    const auto mm = grating_matrix(ones.coord(ix_best), c.grating_width_m);
    const double exp_h = mm(Port::H, Pol::H) + mm(Port::H, Pol::V);
    const double exp_loss = mm(Port::Loss, Pol::H) + mm(Port::Loss, Pol::V);
    CHECK(std::abs(both.h.at(ix_best, 0) - exp_h) < 1e-12);
    CHECK(std::abs(both.loss.at(ix_best, 0) - exp_loss) < 1e-12);
  }
  SUBCASE("grid mismatch is rejected") {
    PhysicalConfig c2 = c;
    c2.grating_width_m = 0.5e-3;
    const auto other = sample_thermal_field(c2, Pol::V, 4);
    CHECK_THROWS_AS((void)apply_grating(fh, other, c.grating_width_m),
                    std::invalid_argument);
  }
}

TEST_CASE("fresnel kernel magnitude, phase, and symmetry") {
  const double lambda = 780e-9;
  const double z = 12.0;
  Xoshiro256pp rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double rx = (rng.next_unit() - 0.5) * 1e-2;
    const double ry = (rng.next_unit() - 0.5) * 1e-2;
    const double px = (rng.next_unit() - 0.5) * 1e-2;
    const double py = (rng.next_unit() - 0.5) * 1e-2;
    const auto k1 = fresnel_kernel(rx, ry, px, py, z, lambda);
    CHECK(std::abs(std::abs(k1) - 1.0 / (lambda * z)) <=
          1e-12 / (lambda * z));
    const auto k2 = fresnel_kernel(px, py, rx, ry, z, lambda);
    CHECK(std::abs(k1 - k2) <= 1e-9 * std::abs(k1));
  }
  // coincident arguments: phase = kz - pi/2 (mod 2 pi); the comparison
  // tolerance reflects reduction of kz ~ 1e8 rad modulo the double 2*pi.
  const auto k0 = fresnel_kernel(1e-3, -2e-3, 1e-3, -2e-3, z, lambda);
  const double kz = 2.0 * std::numbers::pi / lambda * z;
  const double expected_phase =
      std::remainder(kz - 0.5 * std::numbers::pi, 2.0 * std::numbers::pi);
  CHECK(std::abs(std::remainder(std::arg(k0) - expected_phase,
                                2.0 * std::numbers::pi)) < 1e-6);
  CHECK_THROWS_AS((void)fresnel_kernel(0, 0, 0, 0, -1.0, lambda),
                  std::invalid_argument);
}

TEST_CASE("propagation of the zero field is zero and linear") {
  auto field = make_field(32, 1e-3, unit_aperture);
  auto zero = field;
  for (auto& v : zero.samples) v = 0.0;
  const double lambda = 780e-9;
  const double z = 0.2;

  const auto pz = propagate(zero, z, lambda, {});
  for (const auto& v : pz.samples) CHECK(std::abs(v) == 0.0);

  auto g = make_field(32, 1e-3, gaussian_spot);
  auto combo = field;
  const std::complex<double> a{0.7, -0.2}, b{-1.3, 0.4};
  for (std::size_t i = 0; i < combo.samples.size(); ++i) {
    combo.samples[i] = a * field.samples[i] + b * g.samples[i];
  }
  const auto pf = propagate(field, z, lambda, {});
  const auto pg = propagate(g, z, lambda, {});
  const auto pc = propagate(combo, z, lambda, {});
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pc.samples.size(); ++i) {
    num += std::norm(pc.samples[i] - (a * pf.samples[i] + b * pg.samples[i]));
    den += std::norm(pc.samples[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("FFT propagation conserves energy") {
  const double lambda = 780e-9;
  auto field = make_field(64, 2e-3, gaussian_spot);
  const double e_in = field.total_energy();
  SUBCASE("transfer function path") {
    const double z = 0.05; // within N drho^2 / lambda = 0.08 m
    const auto out = propagate(field, z, lambda, {},
                               PropagationMethod::TransferFunction);
    CHECK(std::abs(out.total_energy() - e_in) / e_in < 1e-6);
  }
  SUBCASE("scaled transform path") {
    const double z = 200.0;
    const auto out = propagate(field, z, lambda, {},
                               PropagationMethod::ScaledTransform);
    CHECK(std::abs(out.total_energy() - e_in) / e_in < 1e-6);
  }
}

TEST_CASE("two-step propagation equals the single step") {
  const double lambda = 780e-9;
  auto field = make_field(64, 2e-3, gaussian_spot);
  const double z1 = 0.02, z2 = 0.035;
  const auto once = propagate(field, z1 + z2, lambda, {},
                              PropagationMethod::TransferFunction);
  const auto first = propagate(field, z1, lambda, {},
                               PropagationMethod::TransferFunction);
  TransverseField mid;
  mid.n = first.n;
  mid.spacing = first.spacing;
  mid.half_width = 0.5 * first.n * first.spacing;
  mid.samples = first.samples;
  const auto twice =
      propagate(mid, z2, lambda, {}, PropagationMethod::TransferFunction);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < once.samples.size(); ++i) {
    num += std::norm(once.samples[i] - twice.samples[i]);
    den += std::norm(once.samples[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-4);
}

TEST_CASE("scaled transform agrees with direct quadrature") {
  // Compare on the central quarter of the scaled output grid, where the
  // quadrature sampling bound holds with margin.
  const double lambda = 780e-9;
  auto field = make_field(64, 2e-3, gaussian_spot);
  const double z = 150.0;
  const auto fast =
      propagate(field, z, lambda, {}, PropagationMethod::ScaledTransform);
  const int sub = 16;
  DetectionWindow window;
  window.extent = sub * fast.spacing;
  window.samples = sub;
  const auto slow = propagate(field, z, lambda, window,
                              PropagationMethod::DirectQuadrature, 0.0);
  const int off = fast.n / 2 - sub / 2;
  double num = 0.0, den = 0.0;
  for (int iy = 0; iy < sub; ++iy) {
    for (int ix = 0; ix < sub; ++ix) {
      REQUIRE(slow.coord(ix) == doctest::Approx(fast.coord(off + ix)));
      num += std::norm(fast.at(off + ix, off + iy) - slow.at(ix, iy));
      den += std::norm(fast.at(off + ix, off + iy));
    }
  }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("far-field intensity of a square aperture follows sinc^2") {
  // Oracle: direct quadrature of the Fresnel integral at 10 points on the
  // x axis, compared against the analytic far-field profile.
  const double lambda = 780e-9;
  const double L = 1e-3;
  auto field = make_field(64, L, unit_aperture);
  const double z = 400.0; // deep far field for this aperture
  const double scale = lambda * z / L;

  std::vector<double> xs;
  for (int i = 0; i < 10; ++i) xs.push_back((i - 4.5) * 0.35 * scale);

  const auto on_axis = propagate_to_point(field, z, lambda, 0.0, 0.0);
  for (double x : xs) {
    const auto u = propagate_to_point(field, z, lambda, x, 0.0);
    const double expected = std::pow(sinc(L * x / (lambda * z)), 2);
    const double got = std::norm(u) / std::norm(on_axis);
    CHECK(std::abs(got - expected) < 2e-2 * std::max(0.05, expected));
  }
}

TEST_CASE("aliasing bound is enforced for quadrature") {
  const double lambda = 780e-9;
  auto field = make_field(32, 2e-3, unit_aperture); // spacing 62.5 um
  DetectionWindow window;
  window.extent = 4e-3;
  window.samples = 8;
  // reach = 2 mm + 1 mm = 3 mm; bound = lambda z / 6 mm; violated for small z
  CHECK_THROWS_AS((void)propagate(field, 0.05, lambda, window,
                                  PropagationMethod::DirectQuadrature, 0.0),
                  std::invalid_argument);
  CHECK_NOTHROW((void)propagate(field, 1000.0, lambda, window,
                                PropagationMethod::DirectQuadrature, 0.0));
}

TEST_CASE("window too small reports captured energy") {
  const double lambda = 780e-9;
  auto field = make_field(32, 2e-3, gaussian_spot);
  DetectionWindow window;
  window.extent = 1e-4; // far-field spot much wider than this
  window.samples = 4;
  CHECK_THROWS_AS((void)propagate(field, 500.0, lambda, window,
                                  PropagationMethod::DirectQuadrature),
                  std::runtime_error);
}
