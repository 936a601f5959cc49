// Acceptance suite runner: one PASS/FAIL line per criterion; exit 0 iff
// every criterion passes.
#include <iostream>

#include "qvcz/acceptance.hpp"
#include "qvcz/config.hpp"

int main() {
  qvcz::PhysicalConfig config; // shipped defaults
  const auto report = qvcz::run_acceptance(config, std::cout);
  return report.all_passed() ? 0 : 1;
}
