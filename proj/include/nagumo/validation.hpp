#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace nagumo {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string comparison;  // "<" or ">"
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  nlohmann::json to_json() const;
};

/// Desk-scale property suite: stationarity residuals with negative
/// controls, the two density routes against each other, the quadrature and
/// trajectory forms of the fluctuation-dissipation relation, first-integral
/// conservation, the equilibrium escape probe, Ornstein-Uhlenbeck marginal
/// calibration, Gaussian marginals, and determinism. Checks run to
/// completion even after failures.
ValidationReport run_validation(std::uint64_t seed = 12345);

}  // namespace nagumo
