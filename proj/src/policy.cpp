#include "rrmdqw/policy.hpp"

#include <stdexcept>

namespace rrmdqw {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_id)
    : key_(splitmix64(splitmix64(base_seed) ^ (stream_id * kGolden + 0xd1b54a32d192ed03ULL))) {}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return splitmix64(key_ + counter_ * kGolden);
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::uniform_below: empty range");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next_u64()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("RngStream::uniform_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(uniform_below(span));
}

void PolicySpec::validate() const {
    if (has_detector() && x_d < 1)
        throw std::invalid_argument("PolicySpec: detector policies require x_d >= 1");
    if (t_r < 1) throw std::invalid_argument("PolicySpec: t_r must be >= 1");
    if (kind == PolicyKind::RandomBeyond && l_r <= x_d)
        throw std::invalid_argument("PolicySpec: RandomBeyond requires l_r > x_d");
    if (kind == PolicyKind::Quench && t_q < 0)
        throw std::invalid_argument("PolicySpec: quench time must be >= 0");
}

std::optional<std::int64_t> position_at(const PolicySpec& policy,
                                        const DetectorTrajectory& trajectory, long long t) {
    if (t < 0) throw std::invalid_argument("position_at: t must be >= 0");
    switch (policy.kind) {
        case PolicyKind::None:
            return std::nullopt;
        case PolicyKind::Fixed:
            return policy.x_d;
        case PolicyKind::Quench:
            if (t <= policy.t_q) return policy.x_d;
            return std::nullopt;
        case PolicyKind::RandomBeyond:
        case PolicyKind::RandomWindow: {
            const auto k = static_cast<size_t>(trajectory.interval_of(t));
            if (k >= trajectory.positions.size())
                throw std::out_of_range("position_at: time beyond realized trajectory");
            return trajectory.positions[k];
        }
    }
    return std::nullopt;
}

std::int64_t relocate_model1(RngStream& rng, int x_d, std::int64_t l_r) {
    if (l_r <= x_d) throw std::invalid_argument("relocate_model1: requires l_r > x_d");
    return rng.uniform_int(x_d + 1, l_r);
}

std::int64_t relocate_model2(RngStream& rng, std::int64_t x_old, int t_r, WindowUpperMode mode) {
    if (t_r < 1) throw std::invalid_argument("relocate_model2: requires t_r >= 1");
    const std::int64_t hi = mode == WindowUpperMode::Inclusive ? x_old + t_r : x_old + t_r - 1;
    return rng.uniform_int(x_old, hi);
}

DetectorTrajectory build_trajectory(const PolicySpec& policy, RngStream& rng, long long t_max) {
    policy.validate();
    if (t_max < 0) throw std::invalid_argument("build_trajectory: t_max must be >= 0");
    DetectorTrajectory traj;
    traj.t_r = policy.t_r;
    if (!policy.is_random()) return traj;

    const auto intervals = static_cast<size_t>(t_max == 0 ? 1 : (t_max + policy.t_r - 1) / policy.t_r);
    traj.positions.reserve(intervals);
    traj.positions.push_back(policy.x_d);
    for (size_t k = 1; k < intervals; ++k) {
        if (policy.kind == PolicyKind::RandomBeyond)
            traj.positions.push_back(relocate_model1(rng, policy.x_d, policy.l_r));
        else
            traj.positions.push_back(
                relocate_model2(rng, traj.positions.back(), policy.t_r, policy.window_upper));
    }
    return traj;
}

}  // namespace rrmdqw
