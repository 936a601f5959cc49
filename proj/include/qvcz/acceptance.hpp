#pragma once
#include <ostream>
#include <string>
#include <vector>

#include "qvcz/config.hpp"

namespace qvcz {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail; ///< measured values vs tolerances
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

/// Runs the full acceptance matrix against the given configuration,
/// printing one PASS/FAIL line per criterion to `log`. A non-empty
/// `only` restricts the run to the listed criterion ids.
AcceptanceReport run_acceptance(const PhysicalConfig& config,
                                std::ostream& log,
                                const std::vector<int>& only = {});

} // namespace qvcz
