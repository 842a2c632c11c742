/*
BER sweeps over an E_s/N_0 grid with the frame-error stopping rule.

Frames are addressed by (seed, point, frame) counter-RNG substreams and
evaluated in fixed-size chunks; counters are merged in frame order and
truncated at the exact frame where the stopping rule fires. Output is
therefore identical for any worker count. In A/B mode both arms consume the
same message, fading and noise realizations of every frame.
*/
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sskmlc/mlc_link.hpp"
#include "sskmlc/parallel.hpp"
#include "sskmlc/rng.hpp"

namespace sskmlc {

enum class Arm { mlc, bicm };

inline const char* arm_name(Arm arm) { return arm == Arm::mlc ? "mlc" : "bicm"; }

struct BerRecord {
    std::string arm;
    double es_n0_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
};

struct BerRunConfig {
    std::vector<double> snr_grid;
    std::uint64_t frames_max = 5'000'000;
    std::uint64_t frame_error_limit = 100;
    std::uint64_t seed = 1;
    int threads = 0;
    bool run_mlc = true;
    bool run_bicm = true;
    bool noiseless = false;     // debug: zero channel noise
    bool quasi_static = false;  // non-normative fading mode
};

namespace detail {

struct FrameData {
    BitVector message;
    FadingSequence fading;
    FrameSignal noise; // unit-variance draws, scaled by sqrt(noise_var) on use
};

// Draw order is pinned: message bits, then fading, then noise.
inline FrameData make_frame_data(std::uint64_t seed, std::uint32_t point, std::uint32_t frame,
                                 int info_bits, int symbols, int nr, int nt, bool quasi_static)
{
    CounterRng rng(seed, RngDomain::frame, (std::uint64_t(point) << 32) | frame);
    FrameData data;
    data.message.resize(info_bits);
    {
        std::uint32_t word = 0;
        for (int b = 0; b < info_bits; ++b) {
            if (b % 32 == 0) word = rng.next_u32();
            data.message[b] = (word >> (b % 32)) & 1;
        }
    }
    data.fading.symbols = symbols;
    data.fading.receive_antennas = nr;
    data.fading.transmit_antennas = nt;
    data.fading.quasi_static = quasi_static;
    data.fading.coeffs.resize(std::size_t(nr) * nt * (quasi_static ? 1 : symbols));
    for (auto& c : data.fading.coeffs) c = rng.next_complex_normal(1.0);

    data.noise.symbols = symbols;
    data.noise.receive_antennas = nr;
    data.noise.samples.resize(std::size_t(symbols) * nr);
    for (auto& c : data.noise.samples) c = rng.next_complex_normal(1.0);
    return data;
}

inline FrameSignal received_frame(const FrameData& data, std::span<const int> antennas,
                                  double noise_var)
{
    FrameSignal signal;
    signal.symbols = data.noise.symbols;
    signal.receive_antennas = data.noise.receive_antennas;
    signal.samples.resize(data.noise.samples.size());
    const double scale = noise_var > 0.0 ? std::sqrt(noise_var) : 0.0;
    for (int t = 0; t < signal.symbols; ++t) {
        auto column = data.fading.channel(t).column(antennas[t]);
        for (int p = 0; p < signal.receive_antennas; ++p)
            signal.symbol(t)[p] = column[p] + scale * data.noise.symbol(t)[p];
    }
    return signal;
}

struct FrameOutcome {
    std::uint32_t mlc_bit_errors = 0;
    std::uint32_t bicm_bit_errors = 0;
    std::uint8_t mlc_frame_error = 0;
    std::uint8_t bicm_frame_error = 0;
};

struct ArmCounters {
    std::uint64_t frames = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frame_errors = 0;
    bool stopped = false;
};

} // namespace detail

// Runs one SNR point. Both system specs must already carry the point's SNR in
// their SskConfig. Returns counters in arm order (mlc, bicm) for enabled arms.
inline std::vector<BerRecord> run_ber_point(const MlcSystemSpec* mlc, const BicmSystemSpec* bicm,
                                            double es_n0_db, std::uint32_t point_index,
                                            const BerRunConfig& cfg)
{
    if (!mlc && !bicm) throw std::invalid_argument("ber: no arm selected");
    if (cfg.frames_max < 1) throw std::invalid_argument("ber: frames_max must be >= 1");
    if (cfg.frame_error_limit < 1) throw std::invalid_argument("ber: frame_error_limit must be >= 1");
    if (mlc && bicm && mlc->total_info() != bicm->total_info())
        throw std::invalid_argument("ber: arms must carry the same information size");

    const SskConfig& ssk = mlc ? mlc->ssk : bicm->ssk;
    const int symbols = mlc ? mlc->symbols_per_frame() : bicm->symbols_per_frame();
    const int info_bits = mlc ? mlc->total_info() : bicm->total_info();
    // Noiseless debug mode zeroes the noise but demaps with the nominal
    // variance; the correct antenna keeps score 0 and always wins.
    const double noise_scale = cfg.noiseless ? 0.0 : ssk.noise_variance();

    detail::ArmCounters mlc_counters, bicm_counters;
    mlc_counters.stopped = mlc == nullptr;
    bicm_counters.stopped = bicm == nullptr;

    auto evaluate_chunk = [&](std::uint64_t begin, std::uint64_t end, bool want_mlc, bool want_bicm) {
        std::vector<detail::FrameOutcome> outcomes(end - begin);
        for (std::uint64_t f = begin; f < end; ++f) {
            const auto data = detail::make_frame_data(cfg.seed, point_index, std::uint32_t(f),
                                                      info_bits, symbols, ssk.receive_antennas,
                                                      ssk.transmit_antennas, cfg.quasi_static);
            auto& out = outcomes[f - begin];
            if (want_mlc) {
                const auto antennas = mlc_encode(data.message, *mlc);
                const auto signal = detail::received_frame(data, antennas, noise_scale);
                const auto result = msd_receive(signal, data.fading, *mlc, data.message);
                out.mlc_bit_errors = std::uint32_t(result.bit_errors);
                out.mlc_frame_error = result.frame_error ? 1 : 0;
            }
            if (want_bicm) {
                const auto antennas = bicm_encode(data.message, *bicm);
                const auto signal = detail::received_frame(data, antennas, noise_scale);
                const auto result = bicm_receive(signal, data.fading, *bicm, data.message);
                out.bicm_bit_errors = std::uint32_t(result.bit_errors);
                out.bicm_frame_error = result.frame_error ? 1 : 0;
            }
        }
        return outcomes;
    };

    auto merge_arm = [&](detail::ArmCounters& counters, std::uint32_t bit_errors,
                         std::uint8_t frame_error) {
        if (counters.stopped) return;
        counters.frames += 1;
        counters.bit_errors += bit_errors;
        counters.frame_errors += frame_error;
        if (counters.frame_errors >= cfg.frame_error_limit || counters.frames >= cfg.frames_max)
            counters.stopped = true;
    };

    constexpr std::uint64_t chunk_frames = 256;
    const int workers = resolve_threads(cfg.threads);
    std::uint64_t next_frame = 0;
    while ((!mlc_counters.stopped || !bicm_counters.stopped) && next_frame < cfg.frames_max) {
        // one wave of chunks; arm flags are frozen per wave so that
        // in-flight chunks never depend on merge progress
        const bool want_mlc = !mlc_counters.stopped;
        const bool want_bicm = !bicm_counters.stopped;
        const std::uint64_t wave_frames =
            std::min<std::uint64_t>(std::uint64_t(workers) * chunk_frames, cfg.frames_max - next_frame);
        auto wave = parallel_chunk_map<std::vector<detail::FrameOutcome>>(
            wave_frames, chunk_frames, cfg.threads,
            [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                return evaluate_chunk(next_frame + begin, next_frame + end, want_mlc, want_bicm);
            });
        for (const auto& outcomes : wave)
            for (const auto& out : outcomes) {
                if (want_mlc) merge_arm(mlc_counters, out.mlc_bit_errors, out.mlc_frame_error);
                if (want_bicm) merge_arm(bicm_counters, out.bicm_bit_errors, out.bicm_frame_error);
            }
        next_frame += wave_frames;
    }

    std::vector<BerRecord> records;
    auto emit = [&](Arm arm, const detail::ArmCounters& counters) {
        BerRecord rec;
        rec.arm = arm_name(arm);
        rec.es_n0_db = es_n0_db;
        rec.frames = counters.frames;
        rec.bit_errors = counters.bit_errors;
        rec.frame_errors = counters.frame_errors;
        rec.ber = double(counters.bit_errors) / (double(counters.frames) * info_bits);
        rec.fer = double(counters.frame_errors) / double(counters.frames);
        return rec;
    };
    if (mlc) records.push_back(emit(Arm::mlc, mlc_counters));
    if (bicm) records.push_back(emit(Arm::bicm, bicm_counters));
    return records;
}

// Full sweep; sink (when set) is called after each completed record so
// callers can flush incrementally.
inline std::vector<BerRecord> run_ber_sweep(const MlcSystemSpec& mlc_template,
                                            const BicmSystemSpec& bicm_template,
                                            const BerRunConfig& cfg,
                                            const std::function<void(const BerRecord&)>& sink = {})
{
    if (cfg.snr_grid.empty()) throw std::invalid_argument("ber: empty SNR grid");
    std::vector<BerRecord> records;
    for (std::uint32_t p = 0; p < cfg.snr_grid.size(); ++p) {
        const double snr = cfg.snr_grid[p];
        // Noiseless debug mode also demaps in the zero-noise limit; keeping
        // the nominal variance would let the subset marginalization outvote
        // an exact antenna hit.
        const double demap_snr = cfg.noiseless ? 120.0 : snr;
        MlcSystemSpec mlc = mlc_template;
        BicmSystemSpec bicm = bicm_template;
        mlc.ssk.es_n0_db = demap_snr;
        bicm.ssk.es_n0_db = demap_snr;
        auto point = run_ber_point(cfg.run_mlc ? &mlc : nullptr, cfg.run_bicm ? &bicm : nullptr,
                                   snr, p, cfg);
        for (auto& rec : point) {
            if (sink) sink(rec);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

} // namespace sskmlc
