#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rdpp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-contained property suite behind the `verify` subcommand: gradient
/// and determinant identities, normalizations, metric fixed points, beam
/// exactness, and checkpoint round trips. Runs in seconds.
std::vector<CheckResult> run_verification(std::uint64_t seed);

}  // namespace rdpp
