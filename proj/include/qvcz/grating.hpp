#pragma once
#include "qvcz/polselect.hpp"

namespace qvcz {

/// Output ports of the polarization grating: the two detected polarizations
/// plus the loss channel.
enum class Port : int { H = 0, V = 1, Loss = 2 };

/// The 3x2 position-dependent polarization transform evaluated at x.
/// Rows are output ports (H, V, loss), columns the input polarization.
/// Each column has unit Euclidean norm, so the transform is an isometry.
struct GratingMatrix {
  double x;
  double entries[3][2];

  double operator()(Port a, Pol b) const {
    return entries[static_cast<int>(a)][static_cast<int>(b)];
  }
};

/// Entries at position x for a grating of width L (period L in x).
GratingMatrix grating_matrix(double x, double grating_width);

/// Single entry; `phase` is pi*x/L. Used by integrands on a normalized axis.
double grating_entry(Port a, Pol b, double phase);

} // namespace qvcz
