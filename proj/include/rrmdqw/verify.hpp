#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rrmdqw::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Engine-vs-oracle equivalence plus the structural invariant suite
/// (unitarity, conservation, parity, light cone, monotone survival,
/// degenerate limits, reproducibility, sampler uniformity). Fast enough to
/// run routinely.
std::vector<CheckResult> run_all(std::uint64_t seed);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace rrmdqw::verify
