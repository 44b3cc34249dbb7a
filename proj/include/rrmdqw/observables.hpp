#pragma once

#include "rrmdqw/types.hpp"

namespace rrmdqw {

/// Below this, a reference occupation counts as an exact zero (wrong-parity
/// tick); ratios are only defined where the reference exceeds it.
inline constexpr double kParityEpsilon = 1e-30;

/// Default hysteresis half-width for unity-crossing detection.
inline constexpr double kCrossingBand = 0.005;

struct SaturationEstimate {
    double value = 0.0;
    double t_lo = 0.0, t_hi = 0.0;  // window the mean was taken over
    double residual_slope = 0.0;    // linear drift per step across the window
    bool converged = false;
    size_t points_used = 0;
};

struct CrossingReport {
    int count = 0;
    double last_crossing = 0.0;  // abscissa of the last confirmed crossing
};

struct CrossoverFit {
    double t_r_star = 0.0;
    double slope_below = 0.0;
    double slope_above = 0.0;
    double sse = 0.0;
    bool degenerate = false;  // two segments fit no better than one line
};

/// Pointwise f / f_inf on the shared time grid, restricted to ticks where
/// f_inf > epsilon. Standard errors of f propagate as se / f_inf.
/// Throws if the grids differ or no valid tick remains.
Series ratio_series(const Series& f, const Series& f_inf, double epsilon = kParityEpsilon);

/// Trailing-window mean of the series after `t_onset`, with a slope-based
/// convergence flag: converged iff >= 20 points passed the onset and
/// |slope| * window_width < 0.01 * |value|. With fewer than 20 points past
/// the onset the window falls back to the trailing fraction of the whole
/// series and the result is flagged non-converged.
SaturationEstimate saturation(const Series& series, double window_fraction = 0.25,
                              double t_onset = 0.0);

/// Counts sign changes of (value - 1) with a +-band hysteresis: a crossing
/// is confirmed only once the series reaches the far side of the band, and
/// its abscissa is interpolated where the value first passed through 1.
CrossingReport count_unity_crossings(const Series& series, double band = kCrossingBand);

/// Two-segment least squares on log(value) vs log(t_R), breakpoint scanned
/// over interior grid points (>= 3 points per side, the breakpoint shared).
/// Requires >= 8 positive points spanning at least a decade in t_R.
CrossoverFit crossover_fit(const Series& sat_curve);

/// f(x_D + r) / f_inf(x_D + r) at one time, indexed by displacement r;
/// defined on the sites where f_inf > epsilon.
Series profile_ratio(const Profile& f, const Profile& f_inf, int x_d,
                     double epsilon = kParityEpsilon);

/// g / g_inf with g(x_D + r, t) = f(x_D + r, t) * f(x_D, t), on the ticks
/// where both reference series exceed epsilon. Throws if no common valid
/// tick exists (odd displacement). Equals ratio(x_D + r) * ratio(x_D)
/// pointwise by construction.
Series correlation_ratio(const Series& f_at_r, const Series& f_at_xd, const Series& f_inf_at_r,
                         const Series& f_inf_at_xd, double epsilon = kParityEpsilon);

}  // namespace rrmdqw
