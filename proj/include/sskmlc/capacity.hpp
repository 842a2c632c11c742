/*
Monte-Carlo estimation of SSK ergodic capacities.

One (H, k, y) draw per trial feeds every bit level, so the chain
C_1^0 <= C_2^0 <= ... <= C(X) telescopes exactly into the per-level
capacities: C^1 = C_1^0, C^i = C_i^0 - C_{i-1}^0, C^{m_a} = C(X) - C_{m_a-1}^0.
All ratios of exponential sums are evaluated in the log domain.
*/
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sskmlc/errors.hpp"
#include "sskmlc/parallel.hpp"
#include "sskmlc/rng.hpp"
#include "sskmlc/ssk.hpp"

namespace sskmlc {

struct CapacityReport {
    SskConfig config;
    std::uint64_t frames = 0;
    std::uint64_t seed = 0;

    double total_capacity = 0.0; // C(X), bits per channel use
    double total_std_error = 0.0;
    std::vector<double> subset_capacity;  // C_i^0 for i = 1..m_a-1 (index i-1)
    std::vector<double> subset_std_error;
    std::vector<double> level_capacity;   // C^i for i = 1..m_a (index i-1)
    std::vector<double> level_std_error;
    std::vector<std::vector<double>> per_label; // C_{i,j}: [i-1][j], j over 2^i labels

    int levels() const { return int(level_capacity.size()); }
};

// Per-trial integrands of the subset capacities, from the antenna score
// vector and the transmitted label (0-based). out[i-1] receives the C_i^0
// integrand for i = 1..m_a; the last entry (i = m_a) is the total-capacity
// integrand of C(X).
inline void capacity_integrands(std::span<const double> scores, int label, std::span<double> out)
{
    const int nt = int(scores.size());
    int ma = 0;
    while ((1 << (ma + 1)) <= nt) ++ma;
    if (int(out.size()) != ma) throw std::invalid_argument("capacity_integrands: bad output size");

    double all_max = -HUGE_VAL;
    for (double s : scores) all_max = std::max(all_max, s);
    const double lse_all = detail::logsumexp_max(scores, all_max);

    for (int i = 1; i <= ma; ++i) {
        const int low = label & ((1 << i) - 1);
        const double lse_sub = detail::subset_lse(scores, low, 1 << i, 1 << (ma - i), false);
        out[i - 1] = i + (lse_sub - lse_all) / std::numbers::ln2;
    }
}

namespace detail {

struct CapacityAccum {
    std::vector<double> sum;        // per subset level i = 1..m_a
    std::vector<double> sum_sq;
    std::vector<double> diff_sq;    // per bit level, of the telescoped integrand
    std::vector<std::vector<double>> label_sum; // [i-1][j]
    std::vector<std::vector<std::uint64_t>> label_count;

    explicit CapacityAccum(int ma = 0)
        : sum(ma, 0.0), sum_sq(ma, 0.0), diff_sq(ma, 0.0)
    {
        label_sum.reserve(ma);
        label_count.reserve(ma);
        for (int i = 1; i <= ma; ++i) {
            label_sum.emplace_back(std::size_t(1) << i, 0.0);
            label_count.emplace_back(std::size_t(1) << i, 0);
        }
    }

    void merge(const CapacityAccum& other)
    {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += other.sum[i];
            sum_sq[i] += other.sum_sq[i];
            diff_sq[i] += other.diff_sq[i];
            for (std::size_t j = 0; j < label_sum[i].size(); ++j) {
                label_sum[i][j] += other.label_sum[i][j];
                label_count[i][j] += other.label_count[i][j];
            }
        }
    }
};

} // namespace detail

inline CapacityReport estimate_capacities(const SskConfig& config, std::uint64_t frames,
                                          std::uint64_t seed, int threads = 0)
{
    if (frames < 1) throw std::invalid_argument("estimate_capacities: frames must be >= 1");
    const int nt = config.transmit_antennas;
    const int nr = config.receive_antennas;
    const int ma = config.bits_per_symbol();
    const double noise_var = config.noise_variance();

    constexpr std::uint64_t chunk = 8192; // fixed: reduction order must not depend on threads
    auto chunks = parallel_chunk_map<detail::CapacityAccum>(
        frames, chunk, threads, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
            detail::CapacityAccum acc(ma);
            std::vector<Complex> h(std::size_t(nr) * nt);
            std::vector<Complex> y(nr);
            std::vector<double> scores(nt);
            std::vector<double> g(ma);
            for (std::uint64_t trial = begin; trial < end; ++trial) {
                CounterRng rng(seed, RngDomain::capacity, trial);
                for (auto& c : h) c = rng.next_complex_normal(1.0);
                const int label = int(rng.next_index(std::uint32_t(nt)));
                const Complex* col = h.data() + std::size_t(label) * nr;
                for (int p = 0; p < nr; ++p) y[p] = col[p] + rng.next_complex_normal(noise_var);

                detail::antenna_scores(y, ChannelView{nr, nt, h.data()}, noise_var, scores);
                capacity_integrands(scores, label, g);

                double prev = 0.0;
                for (int i = 0; i < ma; ++i) {
                    acc.sum[i] += g[i];
                    acc.sum_sq[i] += g[i] * g[i];
                    const double diff = g[i] - prev;
                    acc.diff_sq[i] += diff * diff;
                    prev = g[i];
                    const int j = label & ((1 << (i + 1)) - 1);
                    acc.label_sum[i][j] += g[i];
                    acc.label_count[i][j] += 1;
                }
            }
            return acc;
        });

    detail::CapacityAccum total(ma);
    for (const auto& c : chunks) total.merge(c);

    for (double s : total.sum)
        if (!std::isfinite(s)) throw EstimationError("estimate_capacities: non-finite accumulator");

    CapacityReport report;
    report.config = config;
    report.frames = frames;
    report.seed = seed;

    const double f = double(frames);
    std::vector<double> mean(ma), se(ma);
    for (int i = 0; i < ma; ++i) {
        mean[i] = total.sum[i] / f;
        const double var = std::max(0.0, (total.sum_sq[i] - f * mean[i] * mean[i]) / (f - 1.0));
        se[i] = std::sqrt(var / f);
    }

    report.total_capacity = mean[ma - 1];
    report.total_std_error = se[ma - 1];
    report.subset_capacity.assign(mean.begin(), mean.end() - 1);
    report.subset_std_error.assign(se.begin(), se.end() - 1);

    report.level_capacity.resize(ma);
    report.level_std_error.resize(ma);
    double prev_mean = 0.0, prev_sum = 0.0;
    for (int i = 0; i < ma; ++i) {
        report.level_capacity[i] = mean[i] - prev_mean;
        // variance of the per-trial telescoped integrand
        const double lvl_sum = total.sum[i] - prev_sum;
        const double lvl_mean = lvl_sum / f;
        const double var = std::max(0.0, (total.diff_sq[i] - f * lvl_mean * lvl_mean) / (f - 1.0));
        report.level_std_error[i] = std::sqrt(var / f);
        prev_mean = mean[i];
        prev_sum = total.sum[i];
    }

    report.per_label.resize(ma);
    for (int i = 0; i < ma; ++i) {
        report.per_label[i].resize(total.label_sum[i].size(), 0.0);
        for (std::size_t j = 0; j < total.label_sum[i].size(); ++j)
            if (total.label_count[i][j] > 0)
                report.per_label[i][j] = total.label_sum[i][j] / double(total.label_count[i][j]);
    }
    return report;
}

// Bisection for the E_s/N_0 at which the total SSK capacity meets
// target_bpcu. The estimate is monotone in SNR for a fixed seed (common
// random numbers), so plain bisection is safe.
inline double find_design_snr(const SskConfig& config, double target_bpcu, double tol_db,
                              std::uint64_t frames, std::uint64_t seed, int threads = 0)
{
    const int ma = config.bits_per_symbol();
    if (!(target_bpcu > 0.0) || !(target_bpcu < double(ma)))
        throw std::invalid_argument("find_design_snr: target must lie in (0, m_a)");
    if (!(tol_db > 0.0)) throw std::invalid_argument("find_design_snr: tolerance must be positive");

    double lo = -30.0, hi = 30.0;
    auto capacity_at = [&](double snr_db) {
        return estimate_capacities(config.at_snr(snr_db), frames, seed, threads).total_capacity;
    };
    if (capacity_at(lo) > target_bpcu || capacity_at(hi) < target_bpcu)
        throw std::out_of_range("find_design_snr: target " + std::to_string(target_bpcu) +
                                " bpcu unreachable in [-30, 30] dB");
    while (hi - lo > tol_db) {
        const double mid = 0.5 * (lo + hi);
        if (capacity_at(mid) < target_bpcu) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace sskmlc
