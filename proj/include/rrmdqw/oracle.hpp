#pragma once

#include <optional>
#include <vector>

#include "rrmdqw/types.hpp"

namespace rrmdqw::oracle {

/// Maximum walk length the brute-force enumeration accepts (2^(t+1) paths).
inline constexpr int kMaxOracleTime = 20;

/// Exact occupation profile of the Hadamard walk after `t` steps, obtained by
/// enumerating every coin history and summing amplitudes coherently per
/// (site, chirality). Path weights are +-2^(-t/2); the +-1 factors are
/// accumulated as exact integers, so the only rounding is in the final
/// combination with the initial coin amplitudes.
///
/// `detector_at_tick[k]` is the absorbing site for the step that produces the
/// state at time k+1 (nullopt = no detector on that tick); a path whose
/// post-shift site equals that position is terminated. Must have size >= t.
Profile oracle_profile(int origin, Spinor coin,
                       const std::vector<std::optional<int>>& detector_at_tick, int t);

/// Max absolute difference between two profiles over the union of their
/// sites, also including the difference of their sums (survival).
double compare(const Profile& a, const Profile& b);

}  // namespace rrmdqw::oracle
