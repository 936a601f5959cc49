#pragma once
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qvcz {

/// Raised when an adaptive integral fails to reach its tolerance; carries
/// the achieved error estimate.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& msg, double achieved)
      : std::runtime_error(msg), achieved_error(achieved) {}
  double achieved_error;
};

/// Nodes/weights for n-point Gauss-Legendre on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendreRule(int n);
};

struct IntegralResult {
  std::complex<double> value;
  double error_estimate; ///< |fine - coarse| of the last refinement
};

/// Panelled Gauss-Legendre for smooth oscillatory integrands on [a, b].
/// Starts from `initial_panels`, doubles panels until successive values
/// agree within max(abs_tol, rel_tol*|I|), then returns the fine value.
IntegralResult integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int initial_panels, double abs_tol = 1e-12, double rel_tol = 1e-12,
    int max_doublings = 8);

/// Panel count heuristic for integrands with `cycles` oscillation periods.
int panels_for_cycles(double cycles);

} // namespace qvcz
