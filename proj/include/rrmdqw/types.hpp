#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrmdqw {

using Amplitude = std::complex<double>;

/// Two-component spinor at one lattice site. `left` is the left-moving
/// chirality (shifts to x-1), `right` the right-moving one (shifts to x+1).
struct Spinor {
    Amplitude left{};
    Amplitude right{};

    double occupation() const { return std::norm(left) + std::norm(right); }
};

/// Dense occupation profile f(x) over a contiguous block of sites.
struct Profile {
    int x_first = 0;
    std::vector<double> values;

    int x_last() const { return x_first + static_cast<int>(values.size()) - 1; }

    bool contains(int x) const { return x >= x_first && x <= x_last(); }

    double at(int x) const { return contains(x) ? values[static_cast<size_t>(x - x_first)] : 0.0; }

    double sum() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

/// Ordered (abscissa, value) pairs with optional aligned standard errors.
/// Abscissa is strictly increasing; it is t, r or t_R depending on context.
struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> se;  // empty, or same length as x
    std::string label;

    size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }

    void push(double abscissa, double value) {
        if (!x.empty() && abscissa <= x.back())
            throw std::invalid_argument("Series: abscissa must be strictly increasing");
        if (!se.empty()) throw std::invalid_argument("Series: mixed push with/without stderr");
        x.push_back(abscissa);
        y.push_back(value);
    }

    void push(double abscissa, double value, double stderr_of_value) {
        if (!x.empty() && abscissa <= x.back())
            throw std::invalid_argument("Series: abscissa must be strictly increasing");
        if (se.size() != x.size()) throw std::invalid_argument("Series: mixed push with/without stderr");
        x.push_back(abscissa);
        y.push_back(value);
        se.push_back(stderr_of_value);
    }

    double se_at(size_t i) const { return se.empty() ? 0.0 : se[i]; }
};

}  // namespace rrmdqw
