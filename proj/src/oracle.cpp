#include "rrmdqw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rrmdqw::oracle {

namespace {

// Integer +-1 tallies per (final site, final chirality, initial chirality).
struct Tally {
    std::int64_t from_left = 0;
    std::int64_t from_right = 0;
};

struct Enumeration {
    int origin = 0;
    int t = 0;
    const std::vector<std::optional<int>>* detector = nullptr;
    // Index 0 <-> site origin - t; width 2t+1.
    std::vector<Tally> left_bins;
    std::vector<Tally> right_bins;

    void walk(int site, bool moving_right, int sign, int initial_right, int tick) {
        if (tick == t) {
            Tally& bin = (moving_right ? right_bins : left_bins)[static_cast<size_t>(site - (origin - t))];
            (initial_right ? bin.from_right : bin.from_left) += sign;
            return;
        }
        // Coin on the current chirality, then shift; sign flips on R -> R.
        const int next = tick + 1;
        const std::optional<int>& det = (*detector)[static_cast<size_t>(tick)];
        const int site_l = site - 1;
        const int site_r = site + 1;
        if (!det || *det != site_l) walk(site_l, false, sign, initial_right, next);
        if (!det || *det != site_r) walk(site_r, true, moving_right ? -sign : sign, initial_right, next);
    }
};

}  // namespace

Profile oracle_profile(int origin, Spinor coin,
                       const std::vector<std::optional<int>>& detector_at_tick, int t) {
    if (t < 0 || t > kMaxOracleTime)
        throw std::invalid_argument("oracle_profile: t must be in [0, " +
                                    std::to_string(kMaxOracleTime) + "]");
    if (static_cast<int>(detector_at_tick.size()) < t)
        throw std::invalid_argument("oracle_profile: trajectory shorter than t");

    const size_t width = static_cast<size_t>(2 * t + 1);
    Enumeration e;
    e.origin = origin;
    e.t = t;
    e.detector = &detector_at_tick;
    e.left_bins.assign(width, Tally{});
    e.right_bins.assign(width, Tally{});

    e.walk(origin, false, 1, 0, 0);  // starts in |L>, weight coin.left
    e.walk(origin, true, 1, 1, 0);   // starts in |R>, weight coin.right

    const double scale = std::pow(0.5, 0.5 * t);
    Profile p;
    p.x_first = origin - t;
    p.values.resize(width);
    for (size_t i = 0; i < width; ++i) {
        const Amplitude amp_l =
            scale * (static_cast<double>(e.left_bins[i].from_left) * coin.left +
                     static_cast<double>(e.left_bins[i].from_right) * coin.right);
        const Amplitude amp_r =
            scale * (static_cast<double>(e.right_bins[i].from_left) * coin.left +
                     static_cast<double>(e.right_bins[i].from_right) * coin.right);
        p.values[i] = std::norm(amp_l) + std::norm(amp_r);
    }
    return p;
}

double compare(const Profile& a, const Profile& b) {
    const int lo = std::min(a.x_first, b.x_first);
    const int hi = std::max(a.x_last(), b.x_last());
    double max_diff = 0.0;
    for (int x = lo; x <= hi; ++x) max_diff = std::max(max_diff, std::abs(a.at(x) - b.at(x)));
    return std::max(max_diff, std::abs(a.sum() - b.sum()));
}

}  // namespace rrmdqw::oracle
