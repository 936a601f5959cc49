#include "qvcz/grating.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qvcz {

double grating_entry(Port a, Pol b, double phase) {
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  switch (a) {
    case Port::H:
      return b == Pol::H ? c * c : c * s;
    case Port::V:
      return b == Pol::H ? c * s : s * s;
    case Port::Loss:
      return b == Pol::H ? s : c;
  }
  return 0.0;
}

GratingMatrix grating_matrix(double x, double grating_width) {
  if (!(grating_width > 0.0)) {
    throw std::invalid_argument("grating_matrix: grating width must be positive");
  }
  // Periodic extension of the fundamental cell (-L/2, L/2]. The detected
  // rows are L-periodic as written; the loss row's sign is a gauge, fixed
  // here so that P(x + L) == P(x) holds exactly.
  const double L = grating_width;
  const double wrapped = x - L * std::ceil(x / L - 0.5);
  const double phase = std::numbers::pi * wrapped / grating_width;
  GratingMatrix m;
  m.x = x;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 2; ++b) {
      m.entries[a][b] =
          grating_entry(static_cast<Port>(a), static_cast<Pol>(b), phase);
    }
  }
  return m;
}

} // namespace qvcz
