/*
Polar code construction for the multilevel SSK system.

Per-index reliabilities of the length m_a*N mother code are estimated by
genie-aided Monte-Carlo simulation of a SISO Rayleigh BPSK channel at the
design SNR. The capacity rule sets the component rates, and the mother code
is segregated block-wise into the m_a component codes.
*/
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sskmlc/capacity.hpp"
#include "sskmlc/errors.hpp"
#include "sskmlc/parallel.hpp"
#include "sskmlc/polar.hpp"
#include "sskmlc/rng.hpp"

namespace sskmlc {

struct ReliabilityProfile {
    int length = 0;
    double design_snr_db = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> error_prob; // per synthesized channel, natural order
};

struct RateAllocation {
    int component_length = 0;    // N
    std::vector<int> info_counts; // K_i per level

    int total_info() const { return std::accumulate(info_counts.begin(), info_counts.end(), 0); }
    double level_rate(int i) const { return double(info_counts[i]) / component_length; }
    double overall_rate() const
    {
        return double(total_info()) / (double(component_length) * info_counts.size());
    }
};

namespace detail {

// Leaf decision LLRs of a genie-aided SC pass under the all-zero codeword.
// With all prior bits known (and zero), the variable-node step degenerates to
// a plain sum. llr is clobbered; out receives the leaves in natural order.
inline void genie_leaf_llrs(double* llr, int len, double* work, double* out)
{
    if (len == 1) {
        *out = *llr;
        return;
    }
    const int half = len / 2;
    for (int j = 0; j < half; ++j) work[j] = boxplus(llr[j], llr[j + half]);
    genie_leaf_llrs(work, half, work + half, out);
    for (int j = 0; j < half; ++j) work[j] = llr[j] + llr[j + half];
    genie_leaf_llrs(work, half, work + half, out + half);
}

} // namespace detail

inline ReliabilityProfile estimate_reliabilities(int total_length, double design_snr_db,
                                                 std::uint64_t samples, std::uint64_t seed,
                                                 int threads = 0)
{
    if (total_length < 2 || !detail::is_power_of_two(std::size_t(total_length)))
        throw std::invalid_argument("estimate_reliabilities: length must be a power of two >= 2");
    if (samples < 1) throw std::invalid_argument("estimate_reliabilities: samples must be >= 1");

    // Same SNR axis as the SSK channel: per-symbol complex noise variance N_0/2.
    const double noise_var = 0.5 * std::pow(10.0, -design_snr_db / 10.0);

    constexpr std::uint64_t chunk = 2048;
    auto chunks = parallel_chunk_map<std::vector<std::uint64_t>>(
        samples, chunk, threads, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
            std::vector<std::uint64_t> errors(total_length, 0);
            std::vector<double> llr(total_length), work(total_length), leaf(total_length);
            for (std::uint64_t trial = begin; trial < end; ++trial) {
                CounterRng rng(seed, RngDomain::construction, trial);
                for (int j = 0; j < total_length; ++j) {
                    // all-zero codeword, BPSK x = +1
                    const Complex h = rng.next_complex_normal(1.0);
                    const Complex y = h + rng.next_complex_normal(noise_var);
                    const double channel_llr = 4.0 * (std::conj(h) * y).real() / noise_var;
                    llr[j] = std::clamp(channel_llr, -llr_clamp, llr_clamp);
                }
                detail::genie_leaf_llrs(llr.data(), total_length, work.data(), leaf.data());
                for (int j = 0; j < total_length; ++j)
                    if (leaf[j] < 0.0) ++errors[j]; // tie decodes to 0 == correct
            }
            return errors;
        });

    ReliabilityProfile profile;
    profile.length = total_length;
    profile.design_snr_db = design_snr_db;
    profile.samples = samples;
    profile.seed = seed;
    profile.error_prob.assign(total_length, 0.0);
    for (const auto& errors : chunks)
        for (int j = 0; j < total_length; ++j) profile.error_prob[j] += double(errors[j]);
    for (double& p : profile.error_prob) p /= double(samples);
    return profile;
}

// Capacity rule: K_i = round(C^i * N), half-up, clamped to [0, N].
inline RateAllocation allocate_rates(const CapacityReport& report, int component_length)
{
    if (component_length < 1) throw std::invalid_argument("allocate_rates: bad component length");
    RateAllocation alloc;
    alloc.component_length = component_length;
    alloc.info_counts.reserve(report.levels());
    for (int i = 0; i < report.levels(); ++i) {
        const double c = report.level_capacity[i];
        if (c < -3.0 * report.level_std_error[i])
            throw EstimationError("allocate_rates: level " + std::to_string(i + 1) +
                                  " capacity " + std::to_string(c) + " below the noise floor");
        const double k = std::floor(c * component_length + 0.5);
        alloc.info_counts.push_back(int(std::clamp(k, 0.0, double(component_length))));
    }
    return alloc;
}

// Block i of the mother code's reliability profile becomes component code i;
// its K_i most reliable indices (ties to the smaller index) are information.
inline std::vector<PolarCodeSpec> segregate(const ReliabilityProfile& profile,
                                            const RateAllocation& alloc)
{
    const int levels = int(alloc.info_counts.size());
    const int n = alloc.component_length;
    if (profile.length != levels * n)
        throw std::invalid_argument("segregate: profile length " + std::to_string(profile.length) +
                                    " != m_a*N = " + std::to_string(levels * n));
    if (!detail::is_power_of_two(std::size_t(n)))
        throw std::invalid_argument("segregate: component length must be a power of two");
    int n_exp = 0;
    while ((1 << n_exp) < n) ++n_exp;

    std::vector<PolarCodeSpec> specs;
    specs.reserve(levels);
    for (int i = 0; i < levels; ++i) {
        const int k = alloc.info_counts[i];
        if (k < 0 || k > n) throw std::invalid_argument("segregate: K_i out of [0, N]");
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        const double* block = profile.error_prob.data() + std::size_t(i) * n;
        std::stable_sort(order.begin(), order.end(),
                         [block](int a, int b) { return block[a] < block[b]; });
        order.resize(k);
        specs.emplace_back(n_exp, std::move(order));
    }
    return specs;
}

// Information set for a single code spanning the whole profile: the K most
// reliable indices overall. Used by the BICM baseline.
inline PolarCodeSpec most_reliable_spec(const ReliabilityProfile& profile, int info_count)
{
    if (info_count < 0 || info_count > profile.length)
        throw std::invalid_argument("most_reliable_spec: K out of range");
    int n_exp = 0;
    while ((1 << n_exp) < profile.length) ++n_exp;
    std::vector<int> order(profile.length);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return profile.error_prob[a] < profile.error_prob[b];
    });
    order.resize(info_count);
    return {n_exp, std::move(order)};
}

} // namespace sskmlc
