#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrmdqw/ensemble.hpp"
#include "rrmdqw/observables.hpp"

namespace rrmdqw {

/// One experiment description: a single run or a sweep, as read from the
/// config JSON and/or command-line flags.
struct ExperimentDoc {
    std::string model = "rr1";  // iw | siw | qqw | rr1 | rr2
    int x_d = 10;
    int t_r = 20;
    long long t_q = -1;  // qqw removal time; -1 = use t_r
    long long t_max = 1000;
    int n = 500;
    std::uint64_t seed = 20260809;
    std::int64_t l_r = 0;  // Model 1 relocation bound; 0 = 10 * t_max
    std::string window_upper = "exclusive";
    int origin = 0;

    long long snapshot_t = -1;       // profile time; -1 = t_max
    std::vector<int> tr_list;        // sweep-tr axis
    std::vector<int> xd_list;        // sweep-tr axis; empty = {x_d}
    std::vector<int> r_list;         // correlation displacements; empty = {-20, 20}
    long long r_min = 0, r_max = 0;  // profile-ratio slice; both 0 = all valid r
    double band = kCrossingBand;     // unity-crossing hysteresis
    int threads = 0;                 // 0 = hardware concurrency

    std::string out_dir = "out";
    std::string format = "csv";  // csv | json

    PolicySpec policy() const;
    std::int64_t effective_l_r() const { return l_r > 0 ? l_r : 10 * t_max; }
    long long effective_t_q() const { return t_q >= 0 ? t_q : t_r; }
    long long effective_snapshot_t() const { return snapshot_t >= 0 ? snapshot_t : t_max; }

    RunConfig run_config(RecordSpec record) const;

    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentDoc& doc);
void from_json(const nlohmann::json& j, ExperimentDoc& doc);

struct OutputRecord {
    nlohmann::json summary;
    std::vector<std::string> files;  // paths relative to out_dir, summary.json included
};

/// Single experiment: mean profile, tracked series at x_D, survival, and the
/// ratio to the infinite walk with its saturation estimate.
OutputRecord cmd_run(const ExperimentDoc& doc);

/// Saturation-vs-t_R curves over tr_list (per x_D in xd_list), plus unity
/// crossing reports and the two-segment crossover fit.
OutputRecord cmd_sweep_tr(const ExperimentDoc& doc);

/// Snapshot datasets at one time: model / IW / SIW profiles and the
/// occupation ratio against displacement r from x_D.
OutputRecord cmd_profile(const ExperimentDoc& doc);

/// Correlation-ratio time series g/g_inf for each displacement in r_list.
OutputRecord cmd_correlation(const ExperimentDoc& doc);

/// Saturation of a ratio-vs-t series using the shared onset rule
/// max(4 t_R, 2 x_D), restricted to the post-first-relocation ticks.
SaturationEstimate saturation_for(const ExperimentDoc& doc, const Series& ratio);

/// Standard error of the window mean over [t_lo, t_hi], treating ticks as
/// independent.
double window_se(const Series& s, double t_lo, double t_hi);

}  // namespace rrmdqw
