#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ocpcert {

struct PropertyResult {
  std::string name;
  double worst = 0.0;
  double limit = 0.0;
  bool passed = true;
  std::string detail;
};

struct SelftestResult {
  std::uint64_t seed = 0;
  std::vector<PropertyResult> properties;
  bool passed() const;
  /// Deterministic text report, one line per property.
  std::string text() const;
};

/// Runs every property suite. The seed only moves random points and random
/// instances. With corrupt set, the registry trajectories are perturbed by
/// 1e-3 before the checks.
SelftestResult run_selftest(std::uint64_t seed, bool corrupt = false);

}  // namespace ocpcert
