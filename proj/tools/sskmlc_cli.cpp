/*
sskmlc command-line driver.

    sskmlc --mode capacity --nt 16 --nr 1 --snr-start 0 --snr-stop 8 --snr-step 0.5 --out cap.csv
    sskmlc --mode design   --nt 16 --nr 1 --n 256 --bpcu 1.65 --out design.json
    sskmlc --mode ber      --design design.json --nt 16 --nr 1 --n 256 \
           --snr-start 2 --snr-stop 9 --snr-step 0.5 --frames-max 30000 --fe-limit 1000000 \
           --arm both --out ber.csv

All flags mirror the JSON config keys (--config file) and override them.
Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.
*/
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sskmlc/experiment.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;
constexpr int exit_io = 4;

void apply_config_file(const std::string& path, sskmlc::ExperimentConfig& cfg)
{
    std::ifstream in(path);
    if (!in) throw sskmlc::IoError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file '" + path + "': " + e.what());
    }
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("mode", cfg.mode);
    get("nt", cfg.nt);
    get("nr", cfg.nr);
    get("n", cfg.n);
    get("bpcu", cfg.bpcu);
    get("snr_start", cfg.snr_start);
    get("snr_stop", cfg.snr_stop);
    get("snr_step", cfg.snr_step);
    get("frames_max", cfg.frames_max);
    get("fe_limit", cfg.fe_limit);
    get("seed", cfg.seed);
    get("design", cfg.design_path);
    get("out", cfg.out_path);
    get("arm", cfg.arm);
    get("threads", cfg.threads);
    get("construction_samples", cfg.construction_samples);
    get("tol_db", cfg.tol_db);
    get("noiseless", cfg.noiseless);
    get("quasi_static", cfg.quasi_static);
}

int dispatch(const sskmlc::ExperimentConfig& cfg)
{
    if (cfg.mode == "capacity") {
        const auto reports = sskmlc::run_capacity(cfg);
        std::printf("capacity: %zu point(s) -> %s\n", reports.size(), cfg.out_path.c_str());
        return exit_ok;
    }
    if (cfg.mode == "design") {
        const auto design = sskmlc::run_design(cfg);
        std::printf("design: DSNR %.3f dB, K =", design.dsnr_db);
        for (const auto& level : design.levels) std::printf(" %d", level.info_count());
        std::printf(" (total %d) -> %s\n", design.total_info(), cfg.out_path.c_str());
        return exit_ok;
    }
    if (cfg.mode == "ber") {
        const auto records = sskmlc::run_ber(cfg);
        for (const auto& rec : records)
            std::printf("ber: %-4s %+7.2f dB  frames %-8llu ber %.3e fer %.3e\n", rec.arm.c_str(),
                        rec.es_n0_db, static_cast<unsigned long long>(rec.frames), rec.ber, rec.fer);
        std::printf("ber: %zu record(s) -> %s\n", records.size(), cfg.out_path.c_str());
        return exit_ok;
    }
    throw std::invalid_argument("unknown mode '" + cfg.mode + "' (capacity|design|ber)");
}

} // namespace

int main(int argc, char** argv)
{
    sskmlc::ExperimentConfig cfg;
    std::string config_path;

    // first pass: config file only, so flags can override its values
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg);

        CLI::App app{"Multilevel polar coded space-shift keying link simulator"};
        app.add_option("--config", config_path, "JSON config file (flags override its keys)");
        app.add_option("--mode", cfg.mode, "capacity | design | ber");
        app.add_option("--nt", cfg.nt, "transmit antennas (power of two)");
        app.add_option("--nr", cfg.nr, "receive antennas");
        app.add_option("--n", cfg.n, "component code length N");
        app.add_option("--bpcu", cfg.bpcu, "design target, bits per channel use");
        app.add_option("--snr-start", cfg.snr_start, "first E_s/N_0 point (dB)");
        app.add_option("--snr-stop", cfg.snr_stop, "last E_s/N_0 point (dB)");
        app.add_option("--snr-step", cfg.snr_step, "grid step (dB)");
        app.add_option("--frames-max", cfg.frames_max,
                       "frame budget (default: 5e6 for ber, 2e5 otherwise)");
        app.add_option("--fe-limit", cfg.fe_limit, "frame-error stopping limit");
        app.add_option("--seed", cfg.seed, "RNG seed");
        app.add_option("--design", cfg.design_path, "design file (ber mode)");
        app.add_option("--out", cfg.out_path, "output path");
        app.add_option("--arm", cfg.arm, "mlc | bicm | both");
        app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
        app.add_option("--construction-samples", cfg.construction_samples,
                       "Monte-Carlo samples for code construction");
        app.add_option("--tol-db", cfg.tol_db, "design-SNR bisection tolerance (dB)");
        app.add_flag("--noiseless", cfg.noiseless, "debug: zero channel noise");
        app.add_flag("--quasi-static", cfg.quasi_static, "one channel draw per frame");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            return app.exit(e) == 0 ? exit_ok : exit_validation;
        }
        return dispatch(cfg);
    } catch (const sskmlc::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_io;
    } catch (const sskmlc::EstimationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
}
