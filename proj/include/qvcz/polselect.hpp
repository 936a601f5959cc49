#pragma once
#include <array>
#include <stdexcept>
#include <string>

namespace qvcz {

enum class Pol : int { H = 0, V = 1 };

inline char pol_char(Pol p) { return p == Pol::H ? 'H' : 'V'; }

/// Post-selection indices (i, j, k, l) of the two detectors' polarization
/// projections: i, k act at detector 1 and j, l at detector 2.
struct PolSelector {
  Pol i, j, k, l;

  /// Diagonal selectors (i == k and j == l) admit a proper joint
  /// photon-number distribution.
  bool is_diagonal() const { return i == k && j == l; }

  std::string name() const {
    return {pol_char(i), pol_char(j), pol_char(k), pol_char(l)};
  }

  static PolSelector parse(const std::string& text) {
    if (text.size() != 4) {
      throw std::invalid_argument("selector: expected 4 characters of H/V, got '" +
                                  text + "'");
    }
    std::array<Pol, 4> p{};
    for (int n = 0; n < 4; ++n) {
      const char c = text[n];
      if (c == 'H' || c == 'h') {
        p[n] = Pol::H;
      } else if (c == 'V' || c == 'v') {
        p[n] = Pol::V;
      } else {
        throw std::invalid_argument("selector: invalid character in '" + text +
                                    "'");
      }
    }
    return {p[0], p[1], p[2], p[3]};
  }

  bool operator==(const PolSelector&) const = default;
};

inline const PolSelector kHHHH{Pol::H, Pol::H, Pol::H, Pol::H};
inline const PolSelector kHVHV{Pol::H, Pol::V, Pol::H, Pol::V};
inline const PolSelector kVHHV{Pol::V, Pol::H, Pol::H, Pol::V};
inline const PolSelector kHHVV{Pol::H, Pol::H, Pol::V, Pol::V};

} // namespace qvcz
