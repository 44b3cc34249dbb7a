#include "rrmdqw/walk.hpp"

#include <cmath>
#include <stdexcept>

namespace rrmdqw {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;

void check_coin(const Spinor& coin) {
    const double norm = std::norm(coin.left) + std::norm(coin.right);
    if (std::abs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("WalkerState: coin spinor is not normalized");
}
}  // namespace

WalkerState::WalkerState(int origin, Spinor coin, int horizon)
    : WalkerState(origin, coin,
                  horizon >= 0 ? origin - (horizon + 2) : origin,
                  horizon >= 0 ? origin + (horizon + 2) : origin) {
    if (horizon < 0) throw std::invalid_argument("WalkerState: horizon must be >= 0");
}

WalkerState::WalkerState(int origin, Spinor coin, int x_min, int x_max)
    : origin_(origin), x_min_(x_min), x_max_(x_max), lo_(origin), hi_(origin) {
    check_coin(coin);
    if (x_min > origin || x_max < origin)
        throw std::invalid_argument("WalkerState: origin outside lattice window");
    const size_t width = static_cast<size_t>(x_max - x_min + 1);
    psi_l_.assign(width, Amplitude{});
    psi_r_.assign(width, Amplitude{});
    scratch_l_.assign(width, Amplitude{});
    scratch_r_.assign(width, Amplitude{});
    psi_l_[idx(origin)] = coin.left;
    psi_r_[idx(origin)] = coin.right;
}

Spinor WalkerState::spinor(int x) const {
    if (x < lo_ || x > hi_) return Spinor{};
    return Spinor{psi_l_[idx(x)], psi_r_[idx(x)]};
}

double WalkerState::occupation(int x) const {
    if (x < x_min_ || x > x_max_)
        throw std::out_of_range("WalkerState::occupation: site outside lattice window");
    if (x < lo_ || x > hi_) return 0.0;
    return std::norm(psi_l_[idx(x)]) + std::norm(psi_r_[idx(x)]);
}

Profile WalkerState::occupation_profile() const {
    Profile p;
    p.x_first = lo_;
    p.values.resize(static_cast<size_t>(hi_ - lo_ + 1));
    for (int x = lo_; x <= hi_; ++x)
        p.values[static_cast<size_t>(x - lo_)] = std::norm(psi_l_[idx(x)]) + std::norm(psi_r_[idx(x)]);
    return p;
}

double WalkerState::survival() const {
    double s = 0.0;
    for (int x = lo_; x <= hi_; ++x) s += std::norm(psi_l_[idx(x)]) + std::norm(psi_r_[idx(x)]);
    return s;
}

void WalkerState::coin_step() {
    for (int x = lo_; x <= hi_; ++x) {
        const size_t i = idx(x);
        const Amplitude a = psi_l_[i];
        const Amplitude b = psi_r_[i];
        psi_l_[i] = (a + b) * kInvSqrt2;
        psi_r_[i] = (a - b) * kInvSqrt2;
    }
}

void WalkerState::shift_step() {
    if (lo_ - 1 < x_min_ || hi_ + 1 > x_max_)
        throw std::runtime_error("WalkerState::shift_step: light cone reached the lattice boundary (lattice undersized)");
    const int nlo = lo_ - 1;
    const int nhi = hi_ + 1;
    for (int x = nlo; x <= nhi; ++x) {
        const size_t i = idx(x);
        scratch_l_[i] = (x + 1 <= hi_) ? psi_l_[i + 1] : Amplitude{};
        scratch_r_[i] = (x - 1 >= lo_) ? psi_r_[i - 1] : Amplitude{};
    }
    psi_l_.swap(scratch_l_);
    psi_r_.swap(scratch_r_);
    lo_ = nlo;
    hi_ = nhi;
    ++t_;
}

StepOutcome WalkerState::absorb(std::optional<int> x_det) {
    if (!x_det) return StepOutcome{};
    const int x = *x_det;
    if (x < x_min_ || x > x_max_)
        throw std::out_of_range("WalkerState::absorb: detector outside lattice window (map it to absent)");
    if (x < lo_ || x > hi_) return StepOutcome{};
    const size_t i = idx(x);
    const double removed = std::norm(psi_l_[i]) + std::norm(psi_r_[i]);
    psi_l_[i] = Amplitude{};
    psi_r_[i] = Amplitude{};
    cumulative_removed_ += removed;
    return StepOutcome{removed, removed > kDetectionEpsilon};
}

StepOutcome WalkerState::step(std::optional<int> x_det) {
    coin_step();
    shift_step();
    return absorb(x_det);
}

void WalkerState::unitary_step() {
    coin_step();
    shift_step();
}

}  // namespace rrmdqw
