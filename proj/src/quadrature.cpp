#include "qvcz/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace qvcz {

GaussLegendreRule::GaussLegendreRule(int n) {
  nodes.resize(n);
  weights.resize(n);
  // Newton iteration on Legendre polynomials, Chebyshev initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

const GaussLegendreRule& rule16() {
  static const GaussLegendreRule r(16);
  return r;
}

std::complex<double> integrate_panels(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int panels) {
  const auto& rule = rule16();
  const double h = (b - a) / panels;
  std::complex<double> total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    total += acc * (0.5 * h);
  }
  return total;
}

} // namespace

int panels_for_cycles(double cycles) {
  const double c = std::abs(cycles);
  int p = 8;
  while (p < 2.0 * (c + 4.0) && p < (1 << 20)) p *= 2;
  return p;
}

IntegralResult integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int initial_panels, double abs_tol, double rel_tol, int max_doublings) {
  int panels = initial_panels < 1 ? 1 : initial_panels;
  std::complex<double> coarse = integrate_panels(f, a, b, panels);
  double err = std::numeric_limits<double>::infinity();
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    const std::complex<double> fine = integrate_panels(f, a, b, panels);
    err = std::abs(fine - coarse);
    if (err <= std::max(abs_tol, rel_tol * std::abs(fine))) {
      return {fine, err};
    }
    coarse = fine;
  }
  throw QuadratureError("integrate_complex: tolerance not reached", err);
}

} // namespace qvcz
