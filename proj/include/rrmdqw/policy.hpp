#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace rrmdqw {

/// Counter-based random stream: every draw is a pure function of
/// (base_seed, stream_id, counter), so realizations can run on any thread
/// in any order and still reproduce bit-identically.
class RngStream {
public:
    RngStream(std::uint64_t base_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    /// Unbiased uniform draw in [0, n) via multiply-shift rejection.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

enum class PolicyKind { None, Fixed, Quench, RandomBeyond, RandomWindow };

enum class WindowUpperMode { Exclusive, Inclusive };

/// Detector placement rule. None = IW, Fixed = SIW, Quench = QQW,
/// RandomBeyond = Model 1, RandomWindow = Model 2.
struct PolicySpec {
    PolicyKind kind = PolicyKind::None;
    int x_d = 10;                // initial detector site (>= 1 when a detector exists)
    int t_r = 20;                // relocation period, steps
    std::int64_t l_r = 10000;    // RandomBeyond upper relocation bound
    WindowUpperMode window_upper = WindowUpperMode::Exclusive;
    std::int64_t t_q = 0;        // Quench removal time

    bool has_detector() const { return kind != PolicyKind::None; }
    bool is_random() const {
        return kind == PolicyKind::RandomBeyond || kind == PolicyKind::RandomWindow;
    }

    /// Throws std::invalid_argument on a malformed spec.
    void validate() const;
};

/// Realized piecewise-constant detector path: positions[k] = X_k governs the
/// steps arriving at times t in (k*t_r, (k+1)*t_r], and X_0 = x_D covers
/// t in [0, t_r]. Non-random policies keep positions empty.
struct DetectorTrajectory {
    int t_r = 1;
    std::vector<std::int64_t> positions;

    std::int64_t interval_of(long long t) const { return t <= t_r ? 0 : (t - 1) / t_r; }
};

/// X_D(t), or absent when no detector governs time t.
std::optional<std::int64_t> position_at(const PolicySpec& policy,
                                        const DetectorTrajectory& trajectory, long long t);

/// Model 1 draw: uniform over {x_d + 1, ..., l_r}.
std::int64_t relocate_model1(RngStream& rng, int x_d, std::int64_t l_r);

/// Model 2 draw: uniform over {x_old, ..., x_old + t_r - 1} (exclusive mode)
/// or {x_old, ..., x_old + t_r} (inclusive mode).
std::int64_t relocate_model2(RngStream& rng, std::int64_t x_old, int t_r, WindowUpperMode mode);

/// Realizes X_0 .. X_{ceil(t_max/t_r) - 1}. Deterministic in the stream.
DetectorTrajectory build_trajectory(const PolicySpec& policy, RngStream& rng, long long t_max);

}  // namespace rrmdqw
