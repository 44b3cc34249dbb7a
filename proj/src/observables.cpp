#include "rrmdqw/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rrmdqw {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, size_t first,
                 size_t last) {  // inclusive range
    const size_t n = last - first + 1;
    double sx = 0.0, sy = 0.0;
    for (size_t i = first; i <= last; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = first; i <= last; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    for (size_t i = first; i <= last; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        f.sse += r * r;
    }
    return f;
}

}  // namespace

Series ratio_series(const Series& f, const Series& f_inf, double epsilon) {
    if (f.x != f_inf.x) throw std::invalid_argument("ratio_series: time grids are not aligned");
    Series out;
    out.label = f.label + "/" + f_inf.label;
    for (size_t i = 0; i < f.size(); ++i) {
        if (!(f_inf.y[i] > epsilon)) continue;
        out.push(f.x[i], f.y[i] / f_inf.y[i], f.se_at(i) / f_inf.y[i]);
    }
    if (out.empty()) throw std::invalid_argument("ratio_series: no valid ticks (reference is zero everywhere)");
    return out;
}

SaturationEstimate saturation(const Series& series, double window_fraction, double t_onset) {
    SaturationEstimate est;
    if (series.empty()) {
        est.value = std::numeric_limits<double>::quiet_NaN();
        return est;
    }

    size_t first_valid = 0;
    while (first_valid < series.size() && series.x[first_valid] < t_onset) ++first_valid;
    size_t n_valid = series.size() - first_valid;

    bool onset_ok = n_valid >= 20;
    if (!onset_ok) {
        first_valid = 0;  // fall back to the whole series
        n_valid = series.size();
    }

    size_t take = static_cast<size_t>(std::ceil(window_fraction * static_cast<double>(n_valid)));
    take = std::clamp<size_t>(take, std::min<size_t>(n_valid, 5), n_valid);
    const size_t first = series.size() - take;
    const size_t last = series.size() - 1;

    double sum = 0.0;
    for (size_t i = first; i <= last; ++i) sum += series.y[i];
    est.value = sum / static_cast<double>(take);
    est.t_lo = series.x[first];
    est.t_hi = series.x[last];
    est.points_used = take;
    if (take >= 2) est.residual_slope = fit_line(series.x, series.y, first, last).slope;
    est.converged = onset_ok &&
                    std::abs(est.residual_slope) * (est.t_hi - est.t_lo) < 0.01 * std::abs(est.value);
    return est;
}

CrossingReport count_unity_crossings(const Series& series, double band) {
    CrossingReport report;
    int side = 0;  // confirmed side: -1 below, +1 above, 0 unknown
    double pending_abscissa = 0.0;
    bool pending = false;

    for (size_t i = 0; i < series.size(); ++i) {
        const double d = series.y[i] - 1.0;
        if (side == 0) {
            if (d > band) side = 1;
            else if (d < -band) side = -1;
            continue;
        }
        // Remember where the curve first passed through 1 since the last
        // confirmed side; only a band-deep excursion confirms the crossing.
        if (!pending && i > 0 && ((side == 1 && d < 0.0) || (side == -1 && d > 0.0))) {
            const double d_prev = series.y[i - 1] - 1.0;
            pending_abscissa = (d_prev == d)
                                   ? series.x[i]
                                   : series.x[i - 1] + (series.x[i] - series.x[i - 1]) *
                                                           (d_prev / (d_prev - d));
            pending = true;
        }
        if (pending && ((side == 1 && d < -band) || (side == -1 && d > band))) {
            ++report.count;
            report.last_crossing = pending_abscissa;
            side = -side;
            pending = false;
        } else if (pending && ((side == 1 && d > band) || (side == -1 && d < -band))) {
            pending = false;  // returned without confirming: noise inside the band
        }
    }
    return report;
}

CrossoverFit crossover_fit(const Series& sat_curve) {
    std::vector<double> lx, ly;
    lx.reserve(sat_curve.size());
    ly.reserve(sat_curve.size());
    for (size_t i = 0; i < sat_curve.size(); ++i) {
        if (!(sat_curve.y[i] > 0.0) || !std::isfinite(sat_curve.y[i])) continue;
        lx.push_back(std::log(sat_curve.x[i]));
        ly.push_back(std::log(sat_curve.y[i]));
    }
    const size_t n = lx.size();
    if (n < 8) throw std::invalid_argument("crossover_fit: need >= 8 positive points");
    if (lx.back() - lx.front() < std::log(10.0))
        throw std::invalid_argument("crossover_fit: points must span at least one decade of t_R");

    const LineFit single = fit_line(lx, ly, 0, n - 1);

    CrossoverFit best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (size_t i = 2; i + 3 <= n; ++i) {  // >= 3 points on each side, breakpoint shared
        const LineFit below = fit_line(lx, ly, 0, i);
        const LineFit above = fit_line(lx, ly, i, n - 1);
        const double sse = below.sse + above.sse;
        if (sse < best_sse) {
            best_sse = sse;
            best.t_r_star = std::exp(lx[i]);
            best.slope_below = below.slope;
            best.slope_above = above.slope;
            best.sse = sse;
        }
    }
    best.degenerate = single.sse < 1e-20 || (single.sse - best.sse) < 1e-3 * single.sse;
    return best;
}

Series profile_ratio(const Profile& f, const Profile& f_inf, int x_d, double epsilon) {
    Series out;
    out.label = "f/f_inf vs r";
    const int lo = std::min(f.x_first, f_inf.x_first);
    const int hi = std::max(f.x_last(), f_inf.x_last());
    for (int x = lo; x <= hi; ++x) {
        const double ref = f_inf.at(x);
        if (!(ref > epsilon)) continue;
        out.push(static_cast<double>(x - x_d), f.at(x) / ref);
    }
    if (out.empty()) throw std::invalid_argument("profile_ratio: reference profile is zero everywhere");
    return out;
}

Series correlation_ratio(const Series& f_at_r, const Series& f_at_xd, const Series& f_inf_at_r,
                         const Series& f_inf_at_xd, double epsilon) {
    if (f_at_r.x != f_at_xd.x || f_at_r.x != f_inf_at_r.x || f_at_r.x != f_inf_at_xd.x)
        throw std::invalid_argument("correlation_ratio: time grids are not aligned");
    Series out;
    out.label = "g/g_inf";
    for (size_t i = 0; i < f_at_r.size(); ++i) {
        const double ref = f_inf_at_r.y[i] * f_inf_at_xd.y[i];
        if (!(f_inf_at_r.y[i] > epsilon) || !(f_inf_at_xd.y[i] > epsilon)) continue;
        const double g = f_at_r.y[i] * f_at_xd.y[i];
        // relative errors add in quadrature for the product
        double rel2 = 0.0;
        if (f_at_r.y[i] > 0.0) rel2 += std::pow(f_at_r.se_at(i) / f_at_r.y[i], 2);
        if (f_at_xd.y[i] > 0.0) rel2 += std::pow(f_at_xd.se_at(i) / f_at_xd.y[i], 2);
        const double value = g / ref;
        out.push(f_at_r.x[i], value, value * std::sqrt(rel2));
    }
    if (out.empty())
        throw std::invalid_argument(
            "correlation_ratio: no common parity-valid tick (is the displacement r odd?)");
    return out;
}

}  // namespace rrmdqw
