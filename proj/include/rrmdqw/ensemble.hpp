#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rrmdqw/policy.hpp"
#include "rrmdqw/types.hpp"
#include "rrmdqw/walk.hpp"

namespace rrmdqw {

Spinor symmetric_coin();

/// Which per-tick quantities a realization records. Occupations are taken
/// after the unitary step and before that tick's absorption, so the value at
/// the detector site is the arriving (detectable) probability rather than
/// the zero left behind by the absorber.
struct RecordSpec {
    std::vector<long long> snapshot_times;  // full-window profiles at these t
    std::vector<int> tracked_sites;         // f(x, t) for every t in [0, t_max]
    bool record_survival = true;            // S(t) for every t (post-absorption)

    bool operator==(const RecordSpec&) const = default;
};

struct RunConfig {
    PolicySpec policy;
    long long t_max = 1000;
    int origin = 0;
    Spinor coin = symmetric_coin();
    int x_min = 0, x_max = 0;  // both zero = derive origin +- (t_max + 2)
    int n_realizations = 500;
    std::uint64_t base_seed = 0;
    RecordSpec record;

    int lattice_min() const { return use_default_window() ? origin - static_cast<int>(t_max + 2) : x_min; }
    int lattice_max() const { return use_default_window() ? origin + static_cast<int>(t_max + 2) : x_max; }

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;

private:
    bool use_default_window() const { return x_min == 0 && x_max == 0; }
};

struct DetectionEvent {
    long long t = 0;
    std::int64_t x = 0;
    double removed = 0.0;
};

struct RealizationResult {
    std::vector<Profile> profiles;                  // aligned with record.snapshot_times
    std::vector<std::vector<double>> site_series;   // [tracked site][t], t = 0..t_max
    std::vector<double> survival_series;            // [t], empty unless recorded
    DetectorTrajectory trajectory;
    std::vector<DetectionEvent> detections;
    double final_survival = 1.0;
    double cumulative_removed = 0.0;
};

/// Streaming mean/variance (Welford) over realizations for every recorded
/// scalar, with the parallel merge rule, so ensembles aggregate in
/// O(recorded points) memory and bit-stable order.
class EnsembleStats {
public:
    EnsembleStats() = default;
    explicit EnsembleStats(const RunConfig& config);

    void update(const RealizationResult& r);

    /// Pools `other` into this; record specs must match.
    void merge_from(const EnsembleStats& other);

    std::int64_t count() const { return count_; }
    size_t n_snapshots() const { return snapshot_times_.size(); }
    size_t n_tracked() const { return tracked_sites_.size(); }

    Profile mean_profile(size_t snapshot_idx) const;
    Profile sem_profile(size_t snapshot_idx) const;

    /// Mean f(x, t) with standard errors for tracked site index `site_idx`.
    Series site_series(size_t site_idx) const;
    Series survival_series() const;

    double detection_count_mean() const;
    double total_removed_mean() const;
    double final_survival_mean() const;

    double mean_at(size_t flat_idx) const { return mean_[flat_idx]; }
    size_t flat_size() const { return mean_.size(); }

private:
    friend EnsembleStats merge(const EnsembleStats& a, const EnsembleStats& b);

    bool layout_matches(const EnsembleStats& other) const;
    double sem(size_t flat_idx) const;

    // layout
    std::vector<long long> snapshot_times_;
    std::vector<int> tracked_sites_;
    int window_lo_ = 0, window_hi_ = -1;
    long long t_max_ = 0;
    bool has_survival_ = false;

    std::int64_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

/// Pooled statistics over both inputs; inputs must share a record spec.
EnsembleStats merge(const EnsembleStats& a, const EnsembleStats& b);

/// One realization, fully determined by (config.base_seed, stream_id).
RealizationResult run_realization(const RunConfig& config, std::uint64_t stream_id);

/// Runs config.n_realizations independent streams (ids 0..n-1) and
/// aggregates them. Realizations are folded in fixed chunks of 16 and chunks
/// merged in ascending order, so the result is bit-identical for any thread
/// count. n_threads = 0 picks the hardware concurrency.
EnsembleStats run_ensemble(const RunConfig& config, int n_threads = 0);

}  // namespace rrmdqw
