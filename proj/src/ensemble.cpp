#include "rrmdqw/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rrmdqw {

Spinor symmetric_coin() {
    constexpr double inv_sqrt2 = 0.7071067811865475244008443621048490;
    return Spinor{Amplitude{inv_sqrt2, 0.0}, Amplitude{0.0, inv_sqrt2}};
}

void RunConfig::validate() const {
    policy.validate();
    if (t_max < 0) throw std::invalid_argument("RunConfig: t_max must be >= 0");
    if (n_realizations < 1) throw std::invalid_argument("RunConfig: n_realizations must be >= 1");
    const int lo = lattice_min();
    const int hi = lattice_max();
    if (lo > origin - t_max || hi < origin + t_max)
        throw std::invalid_argument("RunConfig: lattice window does not cover the light cone");
    for (long long st : record.snapshot_times)
        if (st < 0 || st > t_max)
            throw std::invalid_argument("RunConfig: snapshot time outside [0, t_max]");
    if (!std::is_sorted(record.snapshot_times.begin(), record.snapshot_times.end()) ||
        std::adjacent_find(record.snapshot_times.begin(), record.snapshot_times.end()) !=
            record.snapshot_times.end())
        throw std::invalid_argument("RunConfig: snapshot times must be sorted and unique");
    for (int x : record.tracked_sites)
        if (x < lo || x > hi)
            throw std::invalid_argument("RunConfig: tracked site outside lattice window");
}

EnsembleStats::EnsembleStats(const RunConfig& config)
    : snapshot_times_(config.record.snapshot_times),
      tracked_sites_(config.record.tracked_sites),
      window_lo_(config.lattice_min()),
      window_hi_(config.lattice_max()),
      t_max_(config.t_max),
      has_survival_(config.record.record_survival) {
    const size_t window = static_cast<size_t>(window_hi_ - window_lo_ + 1);
    const size_t per_series = static_cast<size_t>(t_max_ + 1);
    const size_t total = snapshot_times_.size() * window + tracked_sites_.size() * per_series +
                         (has_survival_ ? per_series : 0) + 3;
    mean_.assign(total, 0.0);
    m2_.assign(total, 0.0);
}

bool EnsembleStats::layout_matches(const EnsembleStats& other) const {
    return snapshot_times_ == other.snapshot_times_ && tracked_sites_ == other.tracked_sites_ &&
           window_lo_ == other.window_lo_ && window_hi_ == other.window_hi_ &&
           t_max_ == other.t_max_ && has_survival_ == other.has_survival_;
}

void EnsembleStats::update(const RealizationResult& r) {
    const size_t window = static_cast<size_t>(window_hi_ - window_lo_ + 1);
    const size_t per_series = static_cast<size_t>(t_max_ + 1);
    if (r.profiles.size() != snapshot_times_.size() ||
        r.site_series.size() != tracked_sites_.size() ||
        (has_survival_ ? r.survival_series.size() != per_series : !r.survival_series.empty()))
        throw std::invalid_argument("EnsembleStats::update: result does not match record spec");

    ++count_;
    const double n = static_cast<double>(count_);
    size_t i = 0;
    auto push = [&](double x) {
        const double delta = x - mean_[i];
        mean_[i] += delta / n;
        m2_[i] += delta * (x - mean_[i]);
        ++i;
    };

    for (const Profile& p : r.profiles) {
        if (p.x_first != window_lo_ || p.values.size() != window)
            throw std::invalid_argument("EnsembleStats::update: profile window mismatch");
        for (double v : p.values) push(v);
    }
    for (const auto& s : r.site_series) {
        if (s.size() != per_series)
            throw std::invalid_argument("EnsembleStats::update: series length mismatch");
        for (double v : s) push(v);
    }
    if (has_survival_)
        for (double v : r.survival_series) push(v);
    push(static_cast<double>(r.detections.size()));
    push(r.cumulative_removed);
    push(r.final_survival);
}

void EnsembleStats::merge_from(const EnsembleStats& other) {
    if (other.count_ == 0) return;
    if (!mean_.empty() && !layout_matches(other))
        throw std::invalid_argument("EnsembleStats::merge_from: record specs differ");
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double nt = na + nb;
    for (size_t i = 0; i < mean_.size(); ++i) {
        const double delta = other.mean_[i] - mean_[i];
        mean_[i] = (na * mean_[i] + nb * other.mean_[i]) / nt;
        m2_[i] += other.m2_[i] + delta * delta * (na * nb / nt);
    }
    count_ += other.count_;
}

EnsembleStats merge(const EnsembleStats& a, const EnsembleStats& b) {
    EnsembleStats out = a;
    out.merge_from(b);
    return out;
}

double EnsembleStats::sem(size_t flat_idx) const {
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    const double var_sample = m2_[flat_idx] / (n - 1.0);
    return std::sqrt(std::max(var_sample, 0.0) / n);
}

Profile EnsembleStats::mean_profile(size_t snapshot_idx) const {
    const size_t window = static_cast<size_t>(window_hi_ - window_lo_ + 1);
    if (snapshot_idx >= snapshot_times_.size())
        throw std::out_of_range("EnsembleStats::mean_profile: bad snapshot index");
    Profile p;
    p.x_first = window_lo_;
    const size_t base = snapshot_idx * window;
    p.values.assign(mean_.begin() + base, mean_.begin() + base + window);
    return p;
}

Profile EnsembleStats::sem_profile(size_t snapshot_idx) const {
    const size_t window = static_cast<size_t>(window_hi_ - window_lo_ + 1);
    if (snapshot_idx >= snapshot_times_.size())
        throw std::out_of_range("EnsembleStats::sem_profile: bad snapshot index");
    Profile p;
    p.x_first = window_lo_;
    p.values.resize(window);
    const size_t base = snapshot_idx * window;
    for (size_t j = 0; j < window; ++j) p.values[j] = sem(base + j);
    return p;
}

Series EnsembleStats::site_series(size_t site_idx) const {
    if (site_idx >= tracked_sites_.size())
        throw std::out_of_range("EnsembleStats::site_series: bad site index");
    const size_t window = static_cast<size_t>(window_hi_ - window_lo_ + 1);
    const size_t per_series = static_cast<size_t>(t_max_ + 1);
    const size_t base = snapshot_times_.size() * window + site_idx * per_series;
    Series s;
    s.label = "f(x=" + std::to_string(tracked_sites_[site_idx]) + ")";
    for (size_t k = 0; k < per_series; ++k)
        s.push(static_cast<double>(k), mean_[base + k], sem(base + k));
    return s;
}

Series EnsembleStats::survival_series() const {
    if (!has_survival_) throw std::logic_error("EnsembleStats: survival was not recorded");
    const size_t window = static_cast<size_t>(window_hi_ - window_lo_ + 1);
    const size_t per_series = static_cast<size_t>(t_max_ + 1);
    const size_t base = snapshot_times_.size() * window + tracked_sites_.size() * per_series;
    Series s;
    s.label = "S(t)";
    for (size_t k = 0; k < per_series; ++k)
        s.push(static_cast<double>(k), mean_[base + k], sem(base + k));
    return s;
}

double EnsembleStats::detection_count_mean() const { return mean_[mean_.size() - 3]; }
double EnsembleStats::total_removed_mean() const { return mean_[mean_.size() - 2]; }
double EnsembleStats::final_survival_mean() const { return mean_[mean_.size() - 1]; }

RealizationResult run_realization(const RunConfig& config, std::uint64_t stream_id) {
    config.validate();
    const int lo = config.lattice_min();
    const int hi = config.lattice_max();

    RngStream rng(config.base_seed, stream_id);
    const DetectorTrajectory trajectory = build_trajectory(config.policy, rng, config.t_max);

    WalkerState state(config.origin, config.coin, lo, hi);

    RealizationResult res;
    res.trajectory = trajectory;
    const size_t per_series = static_cast<size_t>(config.t_max + 1);
    res.site_series.assign(config.record.tracked_sites.size(), std::vector<double>(per_series, 0.0));
    if (config.record.record_survival) res.survival_series.assign(per_series, 0.0);
    res.profiles.reserve(config.record.snapshot_times.size());

    auto window_profile = [&](const WalkerState& st) {
        Profile p;
        p.x_first = lo;
        p.values.resize(static_cast<size_t>(hi - lo + 1));
        for (int x = st.active_lo(); x <= st.active_hi(); ++x)
            p.values[static_cast<size_t>(x - lo)] = st.occupation(x);
        return p;
    };

    size_t next_snapshot = 0;
    auto record_tick = [&](long long t) {
        for (size_t s = 0; s < config.record.tracked_sites.size(); ++s)
            res.site_series[s][static_cast<size_t>(t)] =
                state.occupation(config.record.tracked_sites[s]);
        if (next_snapshot < config.record.snapshot_times.size() &&
            config.record.snapshot_times[next_snapshot] == t) {
            res.profiles.push_back(window_profile(state));
            ++next_snapshot;
        }
    };

    record_tick(0);
    if (config.record.record_survival) res.survival_series[0] = state.survival();

    for (long long t = 1; t <= config.t_max; ++t) {
        state.unitary_step();
        record_tick(t);

        std::optional<int> x_det;
        if (auto pos = position_at(config.policy, trajectory, t); pos && *pos >= lo && *pos <= hi)
            x_det = static_cast<int>(*pos);
        const StepOutcome out = state.absorb(x_det);
        if (out.detection_event) res.detections.push_back({t, *x_det, out.removed_probability});

        if (config.record.record_survival)
            res.survival_series[static_cast<size_t>(t)] = state.survival();
    }

    res.final_survival = state.survival();
    res.cumulative_removed = state.cumulative_removed();
    return res;
}

EnsembleStats run_ensemble(const RunConfig& config, int n_threads) {
    config.validate();
    constexpr std::uint64_t kChunk = 16;
    const auto n = static_cast<std::uint64_t>(config.n_realizations);
    const auto n_chunks = static_cast<size_t>((n + kChunk - 1) / kChunk);

    std::vector<EnsembleStats> partial(n_chunks, EnsembleStats(config));
    std::atomic<size_t> next_chunk{0};
    auto worker = [&]() {
        for (size_t c = next_chunk.fetch_add(1); c < n_chunks; c = next_chunk.fetch_add(1)) {
            const std::uint64_t first = c * kChunk;
            const std::uint64_t last = std::min(n, first + kChunk);
            for (std::uint64_t sid = first; sid < last; ++sid)
                partial[c].update(run_realization(config, sid));
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const size_t threads =
        std::min<size_t>(n_chunks, n_threads > 0 ? static_cast<size_t>(n_threads) : hw);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    EnsembleStats total(config);
    for (const auto& p : partial) total.merge_from(p);
    return total;
}

}  // namespace rrmdqw
