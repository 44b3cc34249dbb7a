#include "rrmdqw/verify.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "rrmdqw/ensemble.hpp"
#include "rrmdqw/oracle.hpp"
#include "rrmdqw/policy.hpp"
#include "rrmdqw/walk.hpp"

namespace rrmdqw::verify {

namespace {

// chi-square 0.999 quantile at 99 degrees of freedom
constexpr double kChi2Crit99 = 148.2304;

std::vector<std::optional<int>> random_trajectory(RngStream& rng, int t) {
    std::vector<std::optional<int>> traj(static_cast<size_t>(t));
    for (auto& d : traj) {
        if (rng.uniform_below(4) == 0) continue;  // absent on ~1/4 of ticks
        d = static_cast<int>(rng.uniform_int(-t, t));
    }
    return traj;
}

Profile engine_profile(const std::vector<std::optional<int>>& traj, int t, Spinor coin) {
    WalkerState st(0, coin, t);
    for (int k = 0; k < t; ++k) st.step(traj[static_cast<size_t>(k)]);
    return st.occupation_profile();
}

CheckResult oracle_equivalence(std::uint64_t seed) {
    RngStream rng(seed, 1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int t = 4 + static_cast<int>(rng.uniform_below(9));  // 4..12
        const auto traj = random_trajectory(rng, t);
        const Profile engine = engine_profile(traj, t, symmetric_coin());
        const Profile exact = oracle::oracle_profile(0, symmetric_coin(), traj, t);
        worst = std::max(worst, oracle::compare(engine, exact));
    }
    std::ostringstream os;
    os << "max |engine - oracle| = " << worst << " over 100 random trajectories, t <= 12";
    return {"oracle-equivalence", worst < 1e-12, os.str()};
}

CheckResult unitarity() {
    WalkerState st(0, symmetric_coin(), 1000);
    double worst = 0.0;
    for (int t = 1; t <= 1000; ++t) {
        st.step(std::nullopt);
        worst = std::max(worst, std::abs(st.survival() - 1.0));
    }
    std::ostringstream os;
    os << "max |S(t) - 1| = " << worst << " for t <= 1000";
    return {"unitarity", worst < 1e-10, os.str()};
}

CheckResult conservation(std::uint64_t seed) {
    double worst = 0.0;
    for (const PolicyKind kind : {PolicyKind::None, PolicyKind::Fixed, PolicyKind::Quench,
                                  PolicyKind::RandomBeyond, PolicyKind::RandomWindow}) {
        RunConfig cfg;
        cfg.policy.kind = kind;
        cfg.policy.x_d = 8;
        cfg.policy.t_r = 12;
        cfg.policy.t_q = 40;
        cfg.policy.l_r = 500;
        cfg.t_max = 400;
        cfg.base_seed = seed;
        const RealizationResult r = run_realization(cfg, 7);
        for (size_t t = 0; t < r.survival_series.size(); ++t) {
            double removed = 0.0;
            for (const auto& d : r.detections)
                if (d.t <= static_cast<long long>(t)) removed += d.removed;
            worst = std::max(worst, std::abs(r.survival_series[t] + removed - 1.0));
        }
    }
    std::ostringstream os;
    os << "max |S(t) + removed(t) - 1| = " << worst << " across all policies";
    return {"conservation", worst < 1e-10, os.str()};
}

CheckResult parity_light_cone(std::uint64_t seed) {
    RunConfig cfg;
    cfg.policy.kind = PolicyKind::RandomWindow;
    cfg.policy.x_d = 5;
    cfg.policy.t_r = 7;
    cfg.t_max = 300;
    cfg.base_seed = seed;
    cfg.record.record_survival = false;

    RngStream rng(cfg.base_seed, 11);
    const auto traj = build_trajectory(cfg.policy, rng, cfg.t_max);
    WalkerState st(cfg.origin, cfg.coin, cfg.lattice_min(), cfg.lattice_max());
    bool ok = true;
    for (long long t = 1; t <= cfg.t_max && ok; ++t) {
        auto pos = position_at(cfg.policy, traj, t);
        std::optional<int> xd;
        if (pos && *pos >= cfg.lattice_min() && *pos <= cfg.lattice_max())
            xd = static_cast<int>(*pos);
        st.step(xd);
        for (int x = cfg.lattice_min(); x <= cfg.lattice_max(); ++x) {
            const bool outside = std::abs(static_cast<long long>(x) - cfg.origin) > t;
            const bool odd_parity = ((x - cfg.origin + t) % 2 + 2) % 2 == 1;
            if ((outside || odd_parity) && st.occupation(x) != 0.0) {
                ok = false;
                break;
            }
        }
    }
    return {"parity-and-light-cone", ok, ok ? "f is exactly 0 outside the parity lattice" : "nonzero f at a forbidden site"};
}

CheckResult monotone_survival(std::uint64_t seed) {
    RunConfig cfg;
    cfg.policy.kind = PolicyKind::RandomBeyond;
    cfg.policy.x_d = 6;
    cfg.policy.t_r = 9;
    cfg.policy.l_r = 200;
    cfg.t_max = 300;
    cfg.base_seed = seed;
    const RealizationResult r = run_realization(cfg, 3);
    double worst = 0.0;
    for (size_t t = 1; t < r.survival_series.size(); ++t)
        worst = std::max(worst, r.survival_series[t] - r.survival_series[t - 1]);
    std::ostringstream os;
    os << "max S(t+1) - S(t) = " << worst;
    return {"monotone-survival", worst <= 1e-14, os.str()};
}

CheckResult coin_involution() {
    WalkerState st(0, symmetric_coin(), 16);
    for (int t = 0; t < 9; ++t) st.step(std::nullopt);  // spread some structure
    const Profile before = st.occupation_profile();
    st.coin_step();
    st.coin_step();
    const Profile after = st.occupation_profile();
    double worst = 0.0;
    for (int x = before.x_first; x <= before.x_last(); ++x)
        worst = std::max(worst, std::abs(before.at(x) - after.at(x)));
    std::ostringstream os;
    os << "max |f - f| after double coin = " << worst;
    return {"coin-involution", worst < 1e-14, os.str()};
}

CheckResult degenerate_limits(std::uint64_t seed) {
    RunConfig siw;
    siw.policy.kind = PolicyKind::Fixed;
    siw.policy.x_d = 9;
    siw.t_max = 300;
    siw.base_seed = seed;
    siw.record.tracked_sites = {9};
    const auto siw_r = run_realization(siw, 0);

    auto max_diff = [&](const RealizationResult& r) {
        double worst = 0.0;
        for (size_t t = 0; t < siw_r.survival_series.size(); ++t) {
            worst = std::max(worst, std::abs(r.survival_series[t] - siw_r.survival_series[t]));
            worst = std::max(worst, std::abs(r.site_series[0][t] - siw_r.site_series[0][t]));
        }
        return worst;
    };

    double worst = 0.0;
    // Model 2 with t_R = 1 (exclusive window) never leaves x_D.
    RunConfig m2 = siw;
    m2.policy.kind = PolicyKind::RandomWindow;
    m2.policy.t_r = 1;
    worst = std::max(worst, max_diff(run_realization(m2, 5)));

    // Either model with t_R >= t_max never relocates inside the horizon.
    for (const PolicyKind kind : {PolicyKind::RandomBeyond, PolicyKind::RandomWindow}) {
        RunConfig late = siw;
        late.policy.kind = kind;
        late.policy.t_r = static_cast<int>(late.t_max);
        late.policy.l_r = 4000;
        worst = std::max(worst, max_diff(run_realization(late, 2)));
    }
    std::ostringstream os;
    os << "max |model - SIW| over S(t) and f(x_D, t) = " << worst;
    return {"degenerate-limits", worst < 1e-12, os.str()};
}

CheckResult reproducibility(std::uint64_t seed) {
    RunConfig cfg;
    cfg.policy.kind = PolicyKind::RandomWindow;
    cfg.policy.x_d = 7;
    cfg.policy.t_r = 5;
    cfg.t_max = 120;
    cfg.n_realizations = 48;
    cfg.base_seed = seed;
    cfg.record.tracked_sites = {7};
    const EnsembleStats a = run_ensemble(cfg, 1);
    const EnsembleStats b = run_ensemble(cfg, 4);
    bool identical = a.count() == b.count() && a.flat_size() == b.flat_size();
    for (size_t i = 0; identical && i < a.flat_size(); ++i)
        identical = a.mean_at(i) == b.mean_at(i);
    return {"thread-reproducibility", identical,
            identical ? "1-thread and 4-thread ensembles are bit-identical"
                      : "ensemble results depend on the thread count"};
}

double chi_square_uniform(const std::vector<std::int64_t>& draws, std::int64_t lo, std::int64_t hi) {
    const auto bins = static_cast<size_t>(hi - lo + 1);
    std::vector<double> observed(bins, 0.0);
    for (const auto d : draws) observed[static_cast<size_t>(d - lo)] += 1.0;
    const double expected = static_cast<double>(draws.size()) / static_cast<double>(bins);
    double chi2 = 0.0;
    for (const double o : observed) chi2 += (o - expected) * (o - expected) / expected;
    return chi2;
}

CheckResult sampler_uniformity(std::uint64_t seed) {
    constexpr int kDraws = 100000;
    RngStream rng1(seed, 101);
    std::vector<std::int64_t> m1(kDraws);
    for (auto& d : m1) d = relocate_model1(rng1, 10, 110);
    const double chi_m1 = chi_square_uniform(m1, 11, 110);

    RngStream rng2(seed, 102);
    std::vector<std::int64_t> m2(kDraws);
    for (auto& d : m2) d = relocate_model2(rng2, 10, 100, WindowUpperMode::Exclusive);
    const double chi_m2 = chi_square_uniform(m2, 10, 109);

    std::ostringstream os;
    os << "chi2(model1) = " << chi_m1 << ", chi2(model2) = " << chi_m2 << " (crit "
       << kChi2Crit99 << ", df 99)";
    return {"sampler-uniformity", chi_m1 < kChi2Crit99 && chi_m2 < kChi2Crit99, os.str()};
}

}  // namespace

std::vector<CheckResult> run_all(std::uint64_t seed) {
    return {oracle_equivalence(seed), unitarity(),          conservation(seed),
            parity_light_cone(seed),  monotone_survival(seed), coin_involution(),
            degenerate_limits(seed),  reproducibility(seed), sampler_uniformity(seed)};
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace rrmdqw::verify
