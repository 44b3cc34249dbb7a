#include "rrmdqw/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "rrmdqw/csv.hpp"

namespace rrmdqw {

namespace fs = std::filesystem;
using nlohmann::json;

PolicySpec ExperimentDoc::policy() const {
    PolicySpec p;
    p.x_d = x_d;
    p.t_r = t_r;
    if (model == "iw") {
        p.kind = PolicyKind::None;
    } else if (model == "siw") {
        p.kind = PolicyKind::Fixed;
    } else if (model == "qqw") {
        p.kind = PolicyKind::Quench;
        p.t_q = effective_t_q();
    } else if (model == "rr1") {
        p.kind = PolicyKind::RandomBeyond;
        p.l_r = effective_l_r();
    } else if (model == "rr2") {
        p.kind = PolicyKind::RandomWindow;
        p.window_upper =
            window_upper == "inclusive" ? WindowUpperMode::Inclusive : WindowUpperMode::Exclusive;
    } else {
        throw std::invalid_argument("unknown model '" + model + "' (expected iw|siw|qqw|rr1|rr2)");
    }
    return p;
}

RunConfig ExperimentDoc::run_config(RecordSpec record) const {
    RunConfig cfg;
    cfg.policy = policy();
    cfg.t_max = t_max;
    cfg.origin = origin;
    cfg.n_realizations = n;
    cfg.base_seed = seed;
    cfg.record = std::move(record);
    return cfg;
}

void ExperimentDoc::validate() const {
    policy().validate();
    if (t_max < 0) throw std::invalid_argument("tmax must be >= 0");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (window_upper != "exclusive" && window_upper != "inclusive")
        throw std::invalid_argument("window-upper must be 'exclusive' or 'inclusive'");
    if (format != "csv" && format != "json")
        throw std::invalid_argument("format must be 'csv' or 'json'");
    if (band < 0.0) throw std::invalid_argument("band must be >= 0");
    if (effective_snapshot_t() > t_max) throw std::invalid_argument("snapshot time beyond tmax");
    if (!std::is_sorted(tr_list.begin(), tr_list.end()) ||
        std::adjacent_find(tr_list.begin(), tr_list.end()) != tr_list.end())
        throw std::invalid_argument("tr_list must be strictly increasing");
    for (int tr : tr_list)
        if (tr < 1 || tr >= t_max)
            throw std::invalid_argument("tr_list values must lie in [1, tmax)");
    for (int xd : xd_list)
        if (xd < 1) throw std::invalid_argument("xd_list values must be >= 1");
}

void to_json(json& j, const ExperimentDoc& doc) {
    j = json{{"model", doc.model},
             {"xd", doc.x_d},
             {"tr", doc.t_r},
             {"tq", doc.t_q},
             {"tmax", doc.t_max},
             {"n", doc.n},
             {"seed", doc.seed},
             {"lr", doc.l_r},
             {"window_upper", doc.window_upper},
             {"origin", doc.origin},
             {"snapshot_t", doc.snapshot_t},
             {"tr_list", doc.tr_list},
             {"xd_list", doc.xd_list},
             {"r_list", doc.r_list},
             {"r_min", doc.r_min},
             {"r_max", doc.r_max},
             {"band", doc.band},
             {"threads", doc.threads},
             {"out", doc.out_dir},
             {"format", doc.format}};
}

void from_json(const json& j, ExperimentDoc& doc) {
    doc.model = j.value("model", doc.model);
    doc.x_d = j.value("xd", doc.x_d);
    doc.t_r = j.value("tr", doc.t_r);
    doc.t_q = j.value("tq", doc.t_q);
    doc.t_max = j.value("tmax", doc.t_max);
    doc.n = j.value("n", doc.n);
    doc.seed = j.value("seed", doc.seed);
    doc.l_r = j.value("lr", doc.l_r);
    doc.window_upper = j.value("window_upper", doc.window_upper);
    doc.origin = j.value("origin", doc.origin);
    doc.snapshot_t = j.value("snapshot_t", doc.snapshot_t);
    doc.tr_list = j.value("tr_list", doc.tr_list);
    doc.xd_list = j.value("xd_list", doc.xd_list);
    doc.r_list = j.value("r_list", doc.r_list);
    doc.r_min = j.value("r_min", doc.r_min);
    doc.r_max = j.value("r_max", doc.r_max);
    doc.band = j.value("band", doc.band);
    doc.threads = j.value("threads", doc.threads);
    doc.out_dir = j.value("out", doc.out_dir);
    doc.format = j.value("format", doc.format);
}

namespace {

std::string config_comment(const ExperimentDoc& doc) { return json(doc).dump(); }

Series profile_to_series(const Profile& mean, const Profile& sem) {
    Series s;
    for (int x = mean.x_first; x <= mean.x_last(); ++x)
        s.push(static_cast<double>(x), mean.at(x), sem.at(x));
    return s;
}

/// Deterministic single-realization reference with the given detector kind.
EnsembleStats reference_stats(const ExperimentDoc& doc, const std::string& model,
                              const RecordSpec& record) {
    ExperimentDoc ref = doc;
    ref.model = model;
    RunConfig cfg = ref.run_config(record);
    cfg.n_realizations = 1;
    return run_ensemble(cfg, doc.threads > 0 ? doc.threads : 1);
}

void emit_table(OutputRecord& rec, const ExperimentDoc& doc, const std::string& stem,
                const std::string& x_name, const Series& series, long long n) {
    if (doc.format == "json") {
        json rows = json::array();
        for (size_t i = 0; i < series.size(); ++i)
            rows.push_back({series.x[i], series.y[i], series.se_at(i), n});
        rec.summary["tables"][stem] = {{"columns", {x_name, "value", "stderr", "n"}},
                                       {"rows", rows}};
        return;
    }
    const std::string file = stem + ".csv";
    write_series_csv(fs::path(doc.out_dir) / file, config_comment(doc), x_name, series, n);
    rec.files.push_back(file);
}

OutputRecord begin_record(const ExperimentDoc& doc, const std::string& command) {
    fs::create_directories(doc.out_dir);
    OutputRecord rec;
    rec.summary["command"] = command;
    rec.summary["config"] = doc;
    rec.summary["base_seed"] = doc.seed;
    return rec;
}

void finish_record(OutputRecord& rec, const ExperimentDoc& doc) {
    rec.files.push_back("summary.json");
    rec.summary["files"] = rec.files;
    std::ofstream out(fs::path(doc.out_dir) / "summary.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary.json in " + doc.out_dir);
    out << rec.summary.dump(2) << "\n";
}

json saturation_json(const SaturationEstimate& est, double se) {
    return json{{"value", est.value},         {"stderr", se},
                {"window", {est.t_lo, est.t_hi}}, {"residual_slope", est.residual_slope},
                {"converged", est.converged}, {"points_used", est.points_used}};
}

}  // namespace

SaturationEstimate saturation_for(const ExperimentDoc& doc, const Series& ratio) {
    long long t_free = 0;  // first time the detector may have left its site
    if (doc.model == "rr1" || doc.model == "rr2") t_free = doc.t_r;
    else if (doc.model == "qqw") t_free = doc.effective_t_q();

    Series tail;
    for (size_t i = 0; i < ratio.size(); ++i)
        if (ratio.x[i] > static_cast<double>(t_free))
            tail.push(ratio.x[i], ratio.y[i], ratio.se_at(i));
    if (tail.empty()) {
        SaturationEstimate est;
        est.value = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    const double onset = std::max(4.0 * static_cast<double>(t_free), 2.0 * doc.x_d);
    return saturation(tail, 0.25, onset);
}

double window_se(const Series& s, double t_lo, double t_hi) {
    double sum2 = 0.0;
    size_t k = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s.x[i] < t_lo || s.x[i] > t_hi) continue;
        sum2 += s.se_at(i) * s.se_at(i);
        ++k;
    }
    return k == 0 ? 0.0 : std::sqrt(sum2) / static_cast<double>(k);
}

OutputRecord cmd_run(const ExperimentDoc& doc) {
    doc.validate();
    OutputRecord rec = begin_record(doc, "run");

    RecordSpec record;
    record.snapshot_times = {doc.effective_snapshot_t()};
    record.tracked_sites = {doc.x_d};
    record.record_survival = true;

    const EnsembleStats stats = run_ensemble(doc.run_config(record), doc.threads);
    const EnsembleStats iw = reference_stats(doc, "iw", record);

    const long long snap_t = doc.effective_snapshot_t();
    emit_table(rec, doc, "profile_t" + std::to_string(snap_t), "x",
               profile_to_series(stats.mean_profile(0), stats.sem_profile(0)), stats.count());
    emit_table(rec, doc, "series_x" + std::to_string(doc.x_d), "t", stats.site_series(0),
               stats.count());
    emit_table(rec, doc, "survival", "t", stats.survival_series(), stats.count());

    const Series ratio = ratio_series(stats.site_series(0), iw.site_series(0));
    emit_table(rec, doc, "ratio_x" + std::to_string(doc.x_d), "t", ratio, stats.count());

    const SaturationEstimate sat = saturation_for(doc, ratio);
    const CrossingReport crossings = count_unity_crossings(ratio, doc.band);
    rec.summary["derived"] = {
        {"saturation", saturation_json(sat, window_se(ratio, sat.t_lo, sat.t_hi))},
        {"ratio_unity_crossings", {{"count", crossings.count}, {"last", crossings.last_crossing}}},
        {"detection_count_mean", stats.detection_count_mean()},
        {"final_survival_mean", stats.final_survival_mean()},
        {"total_removed_mean", stats.total_removed_mean()},
        {"conservation_residual",
         std::abs(stats.final_survival_mean() + stats.total_removed_mean() - 1.0)}};

    finish_record(rec, doc);
    return rec;
}

OutputRecord cmd_sweep_tr(const ExperimentDoc& doc) {
    doc.validate();
    if (doc.tr_list.empty()) throw std::invalid_argument("sweep-tr needs a non-empty tr_list");
    std::vector<int> xds = doc.xd_list.empty() ? std::vector<int>{doc.x_d} : doc.xd_list;
    std::sort(xds.begin(), xds.end());
    xds.erase(std::unique(xds.begin(), xds.end()), xds.end());

    OutputRecord rec = begin_record(doc, "sweep-tr");

    RecordSpec iw_record;
    iw_record.tracked_sites = xds;
    iw_record.record_survival = false;
    const EnsembleStats iw = reference_stats(doc, "iw", iw_record);

    rec.summary["derived"] = json::object();
    for (size_t xi = 0; xi < xds.size(); ++xi) {
        const int xd = xds[xi];
        const Series iw_series = iw.site_series(xi);

        Series sat_curve;
        sat_curve.label = "sat vs t_R, x_D=" + std::to_string(xd);
        long long count = 0;
        for (int tr : doc.tr_list) {
            ExperimentDoc point = doc;
            point.x_d = xd;
            point.t_r = tr;
            RecordSpec record;
            record.tracked_sites = {xd};
            record.record_survival = false;
            const EnsembleStats stats = run_ensemble(point.run_config(record), doc.threads);
            count = stats.count();
            const Series ratio = ratio_series(stats.site_series(0), iw_series);
            const SaturationEstimate est = saturation_for(point, ratio);
            if (!std::isfinite(est.value)) continue;
            sat_curve.push(tr, est.value, window_se(ratio, est.t_lo, est.t_hi));
        }

        const std::string key = "xd" + std::to_string(xd);
        emit_table(rec, doc, "sat_vs_tr_" + key, "t_R", sat_curve, count);

        const CrossingReport crossings = count_unity_crossings(sat_curve, doc.band);
        json entry = {{"unity_crossings", {{"count", crossings.count}, {"last", crossings.last_crossing}}}};
        try {
            const CrossoverFit fit = crossover_fit(sat_curve);
            entry["crossover"] = {{"t_r_star", fit.t_r_star},
                                  {"slope_below", fit.slope_below},
                                  {"slope_above", fit.slope_above},
                                  {"sse", fit.sse},
                                  {"degenerate", fit.degenerate}};
        } catch (const std::exception& e) {
            entry["crossover"] = {{"error", e.what()}};
        }
        rec.summary["derived"][key] = entry;
    }

    finish_record(rec, doc);
    return rec;
}

OutputRecord cmd_profile(const ExperimentDoc& doc) {
    doc.validate();
    OutputRecord rec = begin_record(doc, "profile");

    const long long snap_t = doc.effective_snapshot_t();
    RecordSpec record;
    record.snapshot_times = {snap_t};
    record.record_survival = false;

    const EnsembleStats stats = run_ensemble(doc.run_config(record), doc.threads);
    const EnsembleStats iw = reference_stats(doc, "iw", record);
    const EnsembleStats siw = reference_stats(doc, "siw", record);

    const std::string suffix = "_t" + std::to_string(snap_t);
    const Profile mean = stats.mean_profile(0);
    const Profile sem = stats.sem_profile(0);
    const Profile iw_mean = iw.mean_profile(0);
    const Profile siw_mean = siw.mean_profile(0);

    emit_table(rec, doc, "profile_model" + suffix, "x", profile_to_series(mean, sem), stats.count());
    emit_table(rec, doc, "profile_iw" + suffix, "x", profile_to_series(iw_mean, iw.sem_profile(0)), 1);
    emit_table(rec, doc, "profile_siw" + suffix, "x", profile_to_series(siw_mean, siw.sem_profile(0)), 1);

    const Series raw_ratio = profile_ratio(mean, iw_mean, doc.x_d);
    Series ratio;
    ratio.label = raw_ratio.label;
    for (size_t i = 0; i < raw_ratio.size(); ++i) {
        const auto r = static_cast<long long>(raw_ratio.x[i]);
        if (!(doc.r_min == 0 && doc.r_max == 0) && (r < doc.r_min || r > doc.r_max)) continue;
        const int x = doc.x_d + static_cast<int>(r);
        ratio.push(raw_ratio.x[i], raw_ratio.y[i], sem.at(x) / iw_mean.at(x));
    }
    emit_table(rec, doc, "profile_ratio" + suffix, "r", ratio, stats.count());

    rec.summary["derived"] = {{"model_profile_sum", mean.sum()},
                              {"iw_profile_sum", iw_mean.sum()},
                              {"siw_profile_sum", siw_mean.sum()}};
    finish_record(rec, doc);
    return rec;
}

OutputRecord cmd_correlation(const ExperimentDoc& doc) {
    doc.validate();
    const std::vector<int> rs = doc.r_list.empty() ? std::vector<int>{-20, 20} : doc.r_list;
    for (int r : rs)
        if (r % 2 != 0)
            throw std::invalid_argument(
                "correlation displacement r = " + std::to_string(r) +
                " is odd: x_D and x_D + r never share a parity-valid tick, so g/g_inf is undefined");

    OutputRecord rec = begin_record(doc, "correlation");

    std::set<int> site_set{doc.x_d};
    for (int r : rs) site_set.insert(doc.x_d + r);
    RecordSpec record;
    record.tracked_sites.assign(site_set.begin(), site_set.end());
    record.record_survival = false;

    const EnsembleStats stats = run_ensemble(doc.run_config(record), doc.threads);
    const EnsembleStats iw = reference_stats(doc, "iw", record);

    auto series_at = [&](const EnsembleStats& st, int site) {
        const auto it = site_set.find(site);
        const size_t idx = static_cast<size_t>(std::distance(site_set.begin(), it));
        return st.site_series(idx);
    };

    const Series f_xd = series_at(stats, doc.x_d);
    const Series finf_xd = series_at(iw, doc.x_d);
    rec.summary["derived"] = json::object();
    for (int r : rs) {
        const Series corr = correlation_ratio(series_at(stats, doc.x_d + r), f_xd,
                                              series_at(iw, doc.x_d + r), finf_xd);
        emit_table(rec, doc, "correlation_r" + std::to_string(r), "t", corr, stats.count());
        const SaturationEstimate sat = saturation_for(doc, corr);
        rec.summary["derived"]["r" + std::to_string(r)] = {
            {"saturation", saturation_json(sat, window_se(corr, sat.t_lo, sat.t_hi))}};
    }

    finish_record(rec, doc);
    return rec;
}

}  // namespace rrmdqw
