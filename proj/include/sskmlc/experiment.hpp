/*
Experiment orchestration behind the CLI: configuration, the capacity /
design / ber modes, and their file outputs.
*/
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sskmlc/ber.hpp"
#include "sskmlc/capacity.hpp"
#include "sskmlc/construction.hpp"
#include "sskmlc/design_io.hpp"
#include "sskmlc/errors.hpp"

namespace sskmlc {

struct ExperimentConfig {
    std::string mode;            // capacity | design | ber
    int nt = 16;
    int nr = 1;
    int n = 256;                 // component code length N
    double bpcu = 0.0;           // design target (design mode)
    double snr_start = 0.0;
    double snr_stop = 0.0;
    double snr_step = 0.5;
    std::uint64_t frames_max = 0; // 0 -> mode default
    std::uint64_t fe_limit = 100;
    std::uint64_t seed = 1;
    std::string design_path;
    std::string out_path;
    std::string arm = "both";    // mlc | bicm | both
    int threads = 0;             // 0 -> hardware concurrency
    std::uint64_t construction_samples = 200'000;
    double tol_db = 0.05;        // design-SNR bisection tolerance
    bool noiseless = false;
    bool quasi_static = false;

    // Monte-Carlo frame budget: BER sweeps default to the stopping rule's
    // 5e6 cap, capacity/design estimation to 2e5 frames.
    std::uint64_t frames() const
    {
        if (frames_max > 0) return frames_max;
        return mode == "ber" ? 5'000'000 : 200'000;
    }
};

inline std::vector<double> snr_grid(const ExperimentConfig& cfg)
{
    if (!(cfg.snr_step > 0.0)) throw std::invalid_argument("snr grid: step must be positive");
    if (cfg.snr_stop < cfg.snr_start - 1e-9) throw std::invalid_argument("snr grid: empty");
    std::vector<double> grid;
    const int points = int(std::floor((cfg.snr_stop - cfg.snr_start) / cfg.snr_step + 1e-9)) + 1;
    grid.reserve(points);
    for (int i = 0; i < points; ++i) grid.push_back(cfg.snr_start + i * cfg.snr_step);
    return grid;
}

inline std::string json_sibling_path(const std::string& csv_path)
{
    const auto dot = csv_path.rfind('.');
    const auto slash = csv_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

// Sweeps the SNR grid and writes one CSV row per point plus a JSON report
// alongside. Returns the per-point reports.
inline std::vector<CapacityReport> run_capacity(const ExperimentConfig& cfg)
{
    if (cfg.out_path.empty()) throw std::invalid_argument("capacity: no output path");
    const auto grid = snr_grid(cfg);
    const SskConfig base(cfg.nt, cfg.nr, 0.0);

    CsvWriter csv(cfg.out_path, capacity_csv_schema(base.bits_per_symbol()));
    std::vector<CapacityReport> reports;
    nlohmann::json json_points = nlohmann::json::array();
    for (double snr : grid) {
        CapacityReport report = estimate_capacities(base.at_snr(snr), cfg.frames(), cfg.seed,
                                                    cfg.threads);
        csv.row(capacity_csv_row(report));
        json_points.push_back(to_json(report));
        reports.push_back(std::move(report));
    }

    const std::string json_path = json_sibling_path(cfg.out_path);
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot open '" + json_path + "' for writing");
    out << nlohmann::json{{"schema", "capacity-report v1"}, {"points", json_points}}.dump(2) << '\n';
    if (!out) throw IoError("write failed on '" + json_path + "'");
    return reports;
}

// Design pipeline: design-SNR search, capacity estimation at the DSNR, rate
// allocation, reliability construction, segregation. Writes the design file.
inline DesignFile run_design(const ExperimentConfig& cfg)
{
    if (cfg.out_path.empty()) throw std::invalid_argument("design: no output path");
    if (!detail::is_power_of_two(std::size_t(cfg.n)))
        throw std::invalid_argument("design: N must be a power of two");
    const SskConfig base(cfg.nt, cfg.nr, 0.0);
    const int ma = base.bits_per_symbol();

    const double dsnr = find_design_snr(base, cfg.bpcu, cfg.tol_db, cfg.frames(), cfg.seed,
                                        cfg.threads);
    const CapacityReport report =
        estimate_capacities(base.at_snr(dsnr), cfg.frames(), cfg.seed, cfg.threads);
    const RateAllocation alloc = allocate_rates(report, cfg.n);
    if (alloc.total_info() == 0)
        throw std::invalid_argument("design: target rate allocates zero information bits");

    const ReliabilityProfile profile = estimate_reliabilities(
        ma * cfg.n, dsnr, cfg.construction_samples, cfg.seed, cfg.threads);

    DesignFile design;
    design.nt = cfg.nt;
    design.nr = cfg.nr;
    design.dsnr_db = dsnr;
    design.seed = cfg.seed;
    design.levels = segregate(profile, alloc);
    design.bicm_code = most_reliable_spec(profile, alloc.total_info());
    design.interleaver_seed = cfg.seed;
    save_design(design, cfg.out_path);
    return design;
}

// BER sweep over the grid for the selected arm(s), flushing each record to
// the CSV as soon as its point completes.
inline std::vector<BerRecord> run_ber(const ExperimentConfig& cfg)
{
    if (cfg.out_path.empty()) throw std::invalid_argument("ber: no output path");
    if (cfg.design_path.empty()) throw std::invalid_argument("ber: no design file");
    if (cfg.arm != "mlc" && cfg.arm != "bicm" && cfg.arm != "both")
        throw std::invalid_argument("ber: arm must be mlc, bicm or both");
    const DesignFile design = load_design(cfg.design_path);
    if (design.nt != cfg.nt || design.nr != cfg.nr)
        throw std::invalid_argument("ber: design file is for a " + std::to_string(design.nt) + "x" +
                                    std::to_string(design.nr) + " system, config wants " +
                                    std::to_string(cfg.nt) + "x" + std::to_string(cfg.nr));
    if (design.component_length() != cfg.n)
        throw std::invalid_argument("ber: design component length " +
                                    std::to_string(design.component_length()) +
                                    " != configured N " + std::to_string(cfg.n));

    BerRunConfig run;
    run.snr_grid = snr_grid(cfg);
    run.frames_max = cfg.frames();
    run.frame_error_limit = cfg.fe_limit;
    run.seed = cfg.seed;
    run.threads = cfg.threads;
    run.run_mlc = cfg.arm != "bicm";
    run.run_bicm = cfg.arm != "mlc";
    run.noiseless = cfg.noiseless;
    run.quasi_static = cfg.quasi_static;

    CsvWriter csv(cfg.out_path, ber_csv_schema);
    const MlcSystemSpec mlc = design.mlc_system(0.0);
    const BicmSystemSpec bicm = design.bicm_system(0.0);
    return run_ber_sweep(mlc, bicm, run, [&](const BerRecord& rec) { csv.row(ber_csv_row(rec)); });
}

} // namespace sskmlc
