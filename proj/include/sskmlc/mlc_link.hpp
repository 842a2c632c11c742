/*
End-to-end transceivers: the multilevel (MLC/MSD) chain and the
bit-interleaved (BICM) baseline.

Both map a K-bit message onto a frame of N SSK symbols and back. The MSD
receiver decodes level by level, re-encoding each level's hard decisions as
the demapper priors of the next (decision feedback, no soft values).
*/
#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sskmlc/polar.hpp"
#include "sskmlc/rng.hpp"
#include "sskmlc/ssk.hpp"

namespace sskmlc {

struct MlcSystemSpec {
    SskConfig ssk;
    std::vector<PolarCodeSpec> levels; // level i carries label bit b^{i-1}

    MlcSystemSpec() = default;
    MlcSystemSpec(SskConfig cfg, std::vector<PolarCodeSpec> level_specs)
        : ssk(cfg), levels(std::move(level_specs))
    {
        if (int(levels.size()) != ssk.bits_per_symbol())
            throw std::invalid_argument("mlc: need one component code per label bit");
        for (const auto& spec : levels)
            if (spec.block_length != levels.front().block_length)
                throw std::invalid_argument("mlc: component codes must share N");
    }

    int symbols_per_frame() const { return levels.front().block_length; } // N
    int total_info() const
    {
        int k = 0;
        for (const auto& spec : levels) k += spec.info_count();
        return k;
    }
};

struct BicmSystemSpec {
    SskConfig ssk;
    PolarCodeSpec code;            // length m_a * N
    std::uint64_t interleaver_seed = 0;
    std::vector<int> interleaver;  // interleaved[p] = codeword[interleaver[p]]

    BicmSystemSpec() = default;
    BicmSystemSpec(SskConfig cfg, PolarCodeSpec long_code, std::uint64_t perm_seed)
        : ssk(cfg), code(std::move(long_code)), interleaver_seed(perm_seed)
    {
        const int ma = ssk.bits_per_symbol();
        if (code.block_length % ma != 0 ||
            !detail::is_power_of_two(std::size_t(code.block_length / ma)))
            throw std::invalid_argument("bicm: code length must be m_a * 2^n");
        interleaver = make_interleaver(code.block_length, perm_seed);
    }

    int symbols_per_frame() const { return code.block_length / ssk.bits_per_symbol(); }
    int total_info() const { return code.info_count(); }

    static std::vector<int> make_interleaver(int length, std::uint64_t perm_seed)
    {
        std::vector<int> perm(length);
        std::iota(perm.begin(), perm.end(), 0);
        CounterRng rng(perm_seed, RngDomain::interleaver, 0);
        for (int i = length - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next_index(std::uint32_t(i + 1))]);
        return perm;
    }
};

struct FrameResult {
    int bit_errors = 0;
    bool frame_error = false;
    BitVector decoded_message;
};

// One frame's worth of received vectors (flat, N_R entries per symbol).
struct FrameSignal {
    int symbols = 0;
    int receive_antennas = 0;
    std::vector<Complex> samples;

    std::span<const Complex> symbol(int t) const
    {
        return {samples.data() + std::size_t(t) * receive_antennas, std::size_t(receive_antennas)};
    }
    std::span<Complex> symbol(int t)
    {
        return {samples.data() + std::size_t(t) * receive_antennas, std::size_t(receive_antennas)};
    }
};

// Per-symbol channel matrices of one frame (fast fading: one draw per symbol;
// quasi-static: a single draw shared by the frame).
struct FadingSequence {
    int symbols = 0;
    int receive_antennas = 0;
    int transmit_antennas = 0;
    bool quasi_static = false;
    std::vector<Complex> coeffs;

    ChannelView channel(int t) const
    {
        const std::size_t block = std::size_t(receive_antennas) * transmit_antennas;
        const std::size_t offset = quasi_static ? 0 : std::size_t(t) * block;
        return {receive_antennas, transmit_antennas, coeffs.data() + offset};
    }
};

inline std::vector<int> mlc_encode(std::span<const std::uint8_t> message, const MlcSystemSpec& spec)
{
    if (int(message.size()) != spec.total_info())
        throw std::invalid_argument("mlc_encode: message length != K");
    const int n = spec.symbols_per_frame();
    const int ma = int(spec.levels.size());

    std::vector<BitVector> codewords;
    codewords.reserve(ma);
    std::size_t offset = 0;
    for (const auto& level : spec.levels) {
        codewords.push_back(encode(message.subspan(offset, level.info_count()), level));
        offset += level.info_count();
    }

    std::vector<int> antennas(n);
    for (int t = 0; t < n; ++t) {
        int label = 0;
        for (int i = 0; i < ma; ++i) label |= int(codewords[i][t]) << i;
        antennas[t] = label + 1;
    }
    return antennas;
}

inline std::vector<int> bicm_encode(std::span<const std::uint8_t> message, const BicmSystemSpec& spec)
{
    if (int(message.size()) != spec.total_info())
        throw std::invalid_argument("bicm_encode: message length != K");
    const int ma = spec.ssk.bits_per_symbol();
    const int n = spec.symbols_per_frame();

    const BitVector codeword = encode(message, spec.code);
    std::vector<int> antennas(n);
    for (int t = 0; t < n; ++t) {
        int label = 0;
        for (int j = 0; j < ma; ++j) label |= int(codeword[spec.interleaver[t * ma + j]]) << j;
        antennas[t] = label + 1;
    }
    return antennas;
}

namespace detail {

inline FrameResult finish_frame(BitVector decoded, std::span<const std::uint8_t> true_message)
{
    if (decoded.size() != true_message.size())
        throw std::invalid_argument("frame: true message length mismatch");
    FrameResult result;
    result.bit_errors = 0;
    for (std::size_t i = 0; i < decoded.size(); ++i)
        if ((decoded[i] ^ true_message[i]) & 1) ++result.bit_errors;
    result.frame_error = result.bit_errors > 0;
    result.decoded_message = std::move(decoded);
    return result;
}

} // namespace detail

// Test hook: may rewrite the re-encoded codeword estimate a level feeds
// forward (levels are 1-based).
using StageHook = std::function<void(int level, BitVector& codeword_estimate)>;

inline FrameResult msd_receive(const FrameSignal& signal, const FadingSequence& fading,
                               const MlcSystemSpec& spec, std::span<const std::uint8_t> true_message,
                               DemapRule rule = DemapRule::exact, const StageHook& hook = {})
{
    const int n = spec.symbols_per_frame();
    const int ma = int(spec.levels.size());
    if (signal.symbols != n || fading.symbols != n)
        throw std::invalid_argument("msd_receive: frame length mismatch");
    if (signal.receive_antennas != spec.ssk.receive_antennas ||
        fading.transmit_antennas != spec.ssk.transmit_antennas)
        throw std::invalid_argument("msd_receive: dimension mismatch");

    const double noise_var = spec.ssk.noise_variance();
    std::vector<double> scores(std::size_t(n) * spec.ssk.transmit_antennas);
    for (int t = 0; t < n; ++t)
        detail::antenna_scores(signal.symbol(t), fading.channel(t), noise_var,
                               {scores.data() + std::size_t(t) * spec.ssk.transmit_antennas,
                                std::size_t(spec.ssk.transmit_antennas)});

    BitVector decoded;
    decoded.reserve(spec.total_info());
    std::vector<int> prior_labels(n, 0);
    std::vector<double> llr(n);
    for (int i = 1; i <= ma; ++i) {
        for (int t = 0; t < n; ++t) {
            std::span<const double> s{scores.data() + std::size_t(t) * spec.ssk.transmit_antennas,
                                      std::size_t(spec.ssk.transmit_antennas)};
            llr[t] = msd_llr_from_scores(s, ma, i, prior_labels[t], rule);
        }
        ScResult level = sc_decode(llr, spec.levels[i - 1]);
        if (hook) hook(i, level.codeword);
        decoded.insert(decoded.end(), level.message.begin(), level.message.end());
        for (int t = 0; t < n; ++t) prior_labels[t] |= int(level.codeword[t]) << (i - 1);
    }
    return detail::finish_frame(std::move(decoded), true_message);
}

// Test probe: captures the de-interleaved LLR stream fed to the SC decoder.
struct BicmProbe {
    std::vector<double>* decoder_llrs = nullptr;
};

inline FrameResult bicm_receive(const FrameSignal& signal, const FadingSequence& fading,
                                const BicmSystemSpec& spec, std::span<const std::uint8_t> true_message,
                                DemapRule rule = DemapRule::exact, const BicmProbe& probe = {})
{
    const int n = spec.symbols_per_frame();
    const int ma = spec.ssk.bits_per_symbol();
    if (signal.symbols != n || fading.symbols != n)
        throw std::invalid_argument("bicm_receive: frame length mismatch");
    if (signal.receive_antennas != spec.ssk.receive_antennas ||
        fading.transmit_antennas != spec.ssk.transmit_antennas)
        throw std::invalid_argument("bicm_receive: dimension mismatch");

    const double noise_var = spec.ssk.noise_variance();
    std::vector<double> scores(spec.ssk.transmit_antennas);
    std::vector<double> symbol_llrs(ma);
    std::vector<double> code_llrs(std::size_t(n) * ma);
    for (int t = 0; t < n; ++t) {
        detail::antenna_scores(signal.symbol(t), fading.channel(t), noise_var, scores);
        bicm_llr_from_scores(scores, ma, symbol_llrs, rule);
        for (int j = 0; j < ma; ++j) code_llrs[spec.interleaver[t * ma + j]] = symbol_llrs[j];
    }
    if (probe.decoder_llrs) *probe.decoder_llrs = code_llrs;

    ScResult decoded = sc_decode(code_llrs, spec.code);
    return detail::finish_frame(std::move(decoded.message), true_message);
}

} // namespace sskmlc
