#pragma once

#include <optional>
#include <vector>

#include "rrmdqw/types.hpp"

namespace rrmdqw {

/// Probability removed below this is treated as an exact zero (wrong-parity
/// tick or empty site), not a detection event.
inline constexpr double kDetectionEpsilon = 1e-30;

struct StepOutcome {
    double removed_probability = 0.0;
    bool detection_event = false;
};

/// Exact state vector of the 1D Hadamard walk on a fixed lattice window.
/// Amplitudes live on the light cone [origin - t, origin + t]; touching the
/// window boundary is a hard error (the lattice was sized too small), never
/// a wrap or reflection.
class WalkerState {
public:
    /// State at t = 0 with the given coin spinor at `origin`. The window is
    /// sized so that `horizon` steps never reach the boundary.
    WalkerState(int origin, Spinor coin, int horizon);

    /// Same, with an explicit lattice window.
    WalkerState(int origin, Spinor coin, int x_min, int x_max);

    long long time() const { return t_; }
    int origin() const { return origin_; }
    int x_min() const { return x_min_; }
    int x_max() const { return x_max_; }
    int active_lo() const { return lo_; }
    int active_hi() const { return hi_; }

    Spinor spinor(int x) const;

    /// f(x, t) = |psi_L|^2 + |psi_R|^2 of the current state. `x` must lie in
    /// the lattice window.
    double occupation(int x) const;

    /// f over the light-cone window [origin - t, origin + t].
    Profile occupation_profile() const;

    /// S(t) = sum_x f(x, t).
    double survival() const;

    /// Total probability removed by absorption so far.
    double cumulative_removed() const { return cumulative_removed_; }

    /// Hadamard coin on every site: psi_L' = (psi_L + psi_R)/sqrt(2),
    /// psi_R' = (psi_L - psi_R)/sqrt(2).
    void coin_step();

    /// Moves psi_L from x to x-1 and psi_R from x to x+1; advances t.
    void shift_step();

    /// Zeroes both spinor components at `x_det` (no-op when absent) and
    /// reports the probability removed. No renormalization.
    StepOutcome absorb(std::optional<int> x_det);

    /// Coin, shift, then absorption at `x_det`.
    StepOutcome step(std::optional<int> x_det);

    /// Coin and shift only; the caller records pre-absorption occupations
    /// and applies absorb() itself.
    void unitary_step();

private:
    size_t idx(int x) const { return static_cast<size_t>(x - x_min_); }

    int origin_;
    int x_min_, x_max_;
    int lo_, hi_;  // light-cone window at time t
    long long t_ = 0;
    double cumulative_removed_ = 0.0;
    std::vector<Amplitude> psi_l_, psi_r_;
    std::vector<Amplitude> scratch_l_, scratch_r_;
};

}  // namespace rrmdqw
