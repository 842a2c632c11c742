/*
Space-shift keying: label mapping, Rayleigh MIMO transmission and the soft
demappers (multi-stage and BICM).

Antennas are numbered 1..N_T like the symbol set; binary labels are LSB
first, so bits[i] is b^i and antenna k carries label k-1. Level i of the
multilevel chain owns bit b^{i-1}.
*/
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sskmlc/polar.hpp"
#include "sskmlc/rng.hpp"

namespace sskmlc {

using Complex = std::complex<double>;

struct SskConfig {
    int transmit_antennas = 0; // N_T, power of two
    int receive_antennas = 0;  // N_R
    double es_n0_db = 0.0;     // symbol SNR with E_s = 1

    SskConfig() = default;
    SskConfig(int nt, int nr, double snr_db)
        : transmit_antennas(nt), receive_antennas(nr), es_n0_db(snr_db)
    {
        if (nt < 2 || !detail::is_power_of_two(std::size_t(nt)))
            throw std::invalid_argument("ssk: N_T must be a power of two >= 2");
        if (nr < 1) throw std::invalid_argument("ssk: N_R must be >= 1");
    }

    int bits_per_symbol() const // m_a
    {
        int m = 0;
        while ((1 << (m + 1)) <= transmit_antennas) ++m;
        return m;
    }

    double noise_density() const { return std::pow(10.0, -es_n0_db / 10.0); } // N_0

    // Complex noise variance per receive antenna. The E_s/N_0 axis follows the
    // two-sided N_0/2 convention: E|h_pq|^2 = 1 and sigma^2 = N_0/2.
    double noise_variance() const { return 0.5 * noise_density(); }

    SskConfig at_snr(double snr_db) const
    {
        SskConfig c = *this;
        c.es_n0_db = snr_db;
        return c;
    }
};

// Borrowed view of one N_R x N_T channel matrix (column-major).
struct ChannelView {
    int rows = 0; // N_R
    int cols = 0; // N_T
    const Complex* coeffs = nullptr;

    // k is the 1-based antenna index.
    std::span<const Complex> column(int k) const
    {
        if (k < 1 || k > cols) throw std::invalid_argument("channel: antenna index out of range");
        return {coeffs + std::size_t(k - 1) * rows, std::size_t(rows)};
    }
};

class ChannelRealization {
public:
    ChannelRealization(int nr, int nt, std::vector<Complex> coeffs)
        : rows_(nr), cols_(nt), h_(std::move(coeffs))
    {
        if (int(h_.size()) != nr * nt) throw std::invalid_argument("channel: dimension mismatch");
    }

    static ChannelRealization rayleigh(int nr, int nt, CounterRng& rng)
    {
        std::vector<Complex> h(std::size_t(nr) * nt);
        for (auto& c : h) c = rng.next_complex_normal(1.0);
        return {nr, nt, std::move(h)};
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::span<const Complex> column(int k) const { return view().column(k); }
    ChannelView view() const { return {rows_, cols_, h_.data()}; }
    operator ChannelView() const { return view(); }

private:
    int rows_;
    int cols_;
    std::vector<Complex> h_;
};

// Binary-to-decimal mapping: bits (LSB first) -> antenna index in [1..N_T].
inline int map_bits(std::span<const std::uint8_t> bits)
{
    if (bits.empty() || bits.size() > 30) throw std::invalid_argument("map_bits: bad label length");
    int label = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) label |= int(bits[j] & 1) << j;
    return label + 1;
}

// Inverse mapping; returns m_a bits, LSB first.
inline BitVector unmap_antenna(int k, int bits_per_symbol)
{
    if (k < 1 || k > (1 << bits_per_symbol))
        throw std::invalid_argument("unmap_antenna: index out of range");
    BitVector bits(bits_per_symbol);
    const int label = k - 1;
    for (int j = 0; j < bits_per_symbol; ++j) bits[j] = (label >> j) & 1;
    return bits;
}

// y = h_k + n with i.i.d. CN(0, noise_var) entries.
inline std::vector<Complex> transmit(int k, ChannelView h, double noise_var, CounterRng& rng)
{
    auto col = h.column(k); // validates k
    std::vector<Complex> y(col.begin(), col.end());
    if (noise_var > 0.0)
        for (auto& v : y) v += rng.next_complex_normal(noise_var);
    return y;
}

namespace detail {

// scores[k-1] = -||y - h_k||^2 / noise_var for every antenna.
inline void antenna_scores(std::span<const Complex> y, ChannelView h, double noise_var,
                           std::span<double> scores)
{
    const double inv = 1.0 / noise_var;
    for (int k = 0; k < h.cols; ++k) {
        const Complex* col = h.coeffs + std::size_t(k) * h.rows;
        double d = 0.0;
        for (int p = 0; p < h.rows; ++p) {
            const Complex diff = y[p] - col[p];
            d += diff.real() * diff.real() + diff.imag() * diff.imag();
        }
        scores[k] = -d * inv;
    }
}

inline double logsumexp_max(std::span<const double> v, double max)
{
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - max);
    return max + std::log(acc);
}

// log-sum-exp of scores over labels {low_bits + step*j : j = 0..count-1}.
inline double subset_lse(std::span<const double> scores, int low_bits, int step, int count,
                         bool max_log)
{
    double best = -HUGE_VAL;
    for (int j = 0; j < count; ++j) best = std::max(best, scores[low_bits + j * step]);
    if (max_log) return best;
    double acc = 0.0;
    for (int j = 0; j < count; ++j) acc += std::exp(scores[low_bits + j * step] - best);
    return best + std::log(acc);
}

} // namespace detail

enum class DemapRule {
    exact,   // log-sum-exp, normative
    max_log, // excluded from acceptance runs
};

// LLR of bit b^{level-1} from precomputed antenna scores, conditioned on the
// prior label (bits b^0..b^{level-2} packed LSB first).
inline double msd_llr_from_scores(std::span<const double> scores, int bits_per_symbol, int level,
                                  int prior_label, DemapRule rule = DemapRule::exact)
{
    if (level < 1 || level > bits_per_symbol) throw std::invalid_argument("msd_llr: bad level");
    if (prior_label < 0 || prior_label >= (1 << (level - 1)))
        throw std::invalid_argument("msd_llr: bad prior label");
    const int step = 1 << level;
    const int count = 1 << (bits_per_symbol - level);
    const bool max_log = rule == DemapRule::max_log;
    const double lse0 = detail::subset_lse(scores, prior_label, step, count, max_log);
    const double lse1 = detail::subset_lse(scores, prior_label | (1 << (level - 1)), step, count, max_log);
    return std::clamp(lse0 - lse1, -llr_clamp, llr_clamp);
}

// Multi-stage demapper. prior_bits are the already-decoded bits
// b^0..b^{level-2} of this symbol, in level order.
inline double msd_llr(std::span<const Complex> y, ChannelView h, double noise_var, int level,
                      std::span<const std::uint8_t> prior_bits, DemapRule rule = DemapRule::exact)
{
    if (int(prior_bits.size()) != level - 1)
        throw std::invalid_argument("msd_llr: expected " + std::to_string(level - 1) + " prior bits");
    int prior_label = 0;
    for (std::size_t j = 0; j < prior_bits.size(); ++j) prior_label |= int(prior_bits[j] & 1) << j;

    std::vector<double> scores(h.cols);
    detail::antenna_scores(y, h, noise_var, scores);
    int m = 0;
    while ((1 << (m + 1)) <= h.cols) ++m;
    return msd_llr_from_scores(scores, m, level, prior_label, rule);
}

// Parallel (no-prior) demapper used by the BICM baseline: one LLR per label
// bit, out[j] for bit b^j.
inline void bicm_llr_from_scores(std::span<const double> scores, int bits_per_symbol,
                                 std::span<double> out, DemapRule rule = DemapRule::exact)
{
    const int nt = 1 << bits_per_symbol;
    const bool max_log = rule == DemapRule::max_log;
    for (int j = 0; j < bits_per_symbol; ++j) {
        double best0 = -HUGE_VAL, best1 = -HUGE_VAL;
        for (int label = 0; label < nt; ++label) {
            const double s = scores[label];
            if (label & (1 << j)) best1 = std::max(best1, s);
            else best0 = std::max(best0, s);
        }
        if (max_log) {
            out[j] = std::clamp(best0 - best1, -llr_clamp, llr_clamp);
            continue;
        }
        double acc0 = 0.0, acc1 = 0.0;
        for (int label = 0; label < nt; ++label) {
            const double e = std::exp(scores[label] - (label & (1 << j) ? best1 : best0));
            if (label & (1 << j)) acc1 += e;
            else acc0 += e;
        }
        out[j] = std::clamp(best0 + std::log(acc0) - best1 - std::log(acc1), -llr_clamp, llr_clamp);
    }
}

inline std::vector<double> bicm_llr(std::span<const Complex> y, ChannelView h, double noise_var,
                                    DemapRule rule = DemapRule::exact)
{
    std::vector<double> scores(h.cols);
    detail::antenna_scores(y, h, noise_var, scores);
    int m = 0;
    while ((1 << (m + 1)) <= h.cols) ++m;
    std::vector<double> out(m);
    bicm_llr_from_scores(scores, m, out, rule);
    return out;
}

} // namespace sskmlc
