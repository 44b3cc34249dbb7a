// Command-line front end: one subcommand per figure family plus a verify
// gate. A JSON config file supplies defaults; flags override its fields.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrmdqw/experiment.hpp"
#include "rrmdqw/verify.hpp"

namespace {

void apply_config(rrmdqw::ExperimentDoc& doc, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    nlohmann::json j;
    in >> j;
    from_json(j, doc);  // keys absent from the file keep their current values
}

void add_common_flags(CLI::App* cmd, rrmdqw::ExperimentDoc& doc) {
    cmd->add_option("--model", doc.model, "walk model: iw|siw|qqw|rr1|rr2");
    cmd->add_option("--xd", doc.x_d, "initial detector position");
    cmd->add_option("--tr", doc.t_r, "detector removal period (quench time for qqw)");
    cmd->add_option("--tmax", doc.t_max, "number of time steps");
    cmd->add_option("--n", doc.n, "ensemble size (realizations)");
    cmd->add_option("--seed", doc.seed, "base RNG seed");
    cmd->add_option("--lr", doc.l_r, "Model 1 relocation upper bound (0 = 10*tmax)");
    cmd->add_option("--window-upper", doc.window_upper,
                    "Model 2 window upper bound: exclusive|inclusive");
    cmd->add_option("--threads", doc.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out", doc.out_dir, "output directory");
    cmd->add_option("--format", doc.format, "table format: csv|json");
}

int run_command(const std::string& name, const rrmdqw::ExperimentDoc& doc) {
    using rrmdqw::OutputRecord;
    OutputRecord rec;
    if (name == "run") rec = rrmdqw::cmd_run(doc);
    else if (name == "sweep-tr") rec = rrmdqw::cmd_sweep_tr(doc);
    else if (name == "profile") rec = rrmdqw::cmd_profile(doc);
    else rec = rrmdqw::cmd_correlation(doc);
    for (const auto& f : rec.files) std::cout << doc.out_dir << "/" << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hadamard walk with a randomly relocating absorbing detector"};
    app.require_subcommand(1);

    // The config file is applied first so that flags can override it.
    std::string config_path;
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    // Seed precedence: --seed flag > config file > RRMDQW_SEED > built-in.
    rrmdqw::ExperimentDoc doc;
    if (const char* env_seed = std::getenv("RRMDQW_SEED"); env_seed != nullptr)
        doc.seed = std::strtoull(env_seed, nullptr, 10);
    try {
        apply_config(doc, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    std::string config_echo_path = config_path;

    auto* run = app.add_subcommand("run", "single experiment: profile, series, ratio, survival");
    run->add_option("--config", config_echo_path, "JSON config file");
    add_common_flags(run, doc);
    run->add_option("--snapshot-t", doc.snapshot_t, "profile snapshot time (-1 = tmax)");

    auto* sweep = app.add_subcommand("sweep-tr", "saturation vs t_R sweep with crossings and fit");
    sweep->add_option("--config", config_echo_path, "JSON config file");
    add_common_flags(sweep, doc);
    sweep->add_option("--tr-list", doc.tr_list, "t_R sweep values (ascending)");
    sweep->add_option("--xd-list", doc.xd_list, "detector positions to sweep");
    sweep->add_option("--band", doc.band, "unity-crossing hysteresis half-width");

    auto* profile = app.add_subcommand("profile", "snapshot profiles and ratio vs displacement r");
    profile->add_option("--config", config_echo_path, "JSON config file");
    add_common_flags(profile, doc);
    profile->add_option("--snapshot-t", doc.snapshot_t, "snapshot time (-1 = tmax)");
    profile->add_option("--r-min", doc.r_min, "lowest displacement r to emit");
    profile->add_option("--r-max", doc.r_max, "highest displacement r to emit");

    auto* correlation = app.add_subcommand("correlation", "correlation ratio g/g_inf time series");
    correlation->add_option("--config", config_echo_path, "JSON config file");
    add_common_flags(correlation, doc);
    correlation->add_option("--r-list", doc.r_list, "even displacements r from x_D");

    auto* verify = app.add_subcommand("verify", "oracle-equivalence and invariant suite");
    std::uint64_t verify_seed = doc.seed;
    verify->add_option("--seed", verify_seed, "seed for the randomized checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            const auto results = rrmdqw::verify::run_all(verify_seed);
            for (const auto& r : results)
                std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
            const bool ok = rrmdqw::verify::all_passed(results);
            std::cout << (ok ? "verify: all checks passed" : "verify: FAILURES present") << "\n";
            return ok ? 0 : 1;
        }
        for (auto* cmd : {run, sweep, profile, correlation})
            if (cmd->parsed()) return run_command(cmd->get_name(), doc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
