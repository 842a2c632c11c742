/*
Binary polar transform, frozen-bit bookkeeping and successive-cancellation
decoding for one component code of length N = 2^n.

Natural (Kronecker) index ordering throughout; there is no bit-reversal
permutation anywhere in this library. Index sets are 0-based.
*/
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sskmlc {

using BitVector = std::vector<std::uint8_t>;
using LlrVector = std::vector<double>;

// LLRs are clamped to this magnitude before the SC recursion; the check-node
// operation saturates well below it.
inline constexpr double llr_clamp = 40.0;

enum class CheckRule {
    exact,   // boxplus, the normative behavior
    min_sum, // faster, ~0.2 dB worse; never used by the test suites
};

namespace detail {

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

// f(a,b) = 2 atanh(tanh(a/2) tanh(b/2)), in a form that stays finite.
inline double boxplus(double a, double b)
{
    const double sign = (a < 0) == (b < 0) ? 1.0 : -1.0;
    return sign * std::min(std::fabs(a), std::fabs(b)) +
           std::log1p(std::exp(-std::fabs(a + b))) - std::log1p(std::exp(-std::fabs(a - b)));
}

inline double check_node(double a, double b, CheckRule rule)
{
    if (rule == CheckRule::min_sum) {
        const double sign = (a < 0) == (b < 0) ? 1.0 : -1.0;
        return sign * std::min(std::fabs(a), std::fabs(b));
    }
    return boxplus(a, b);
}

} // namespace detail

struct PolarCodeSpec {
    int n = 0;                      // exponent, N = 2^n
    int block_length = 0;           // N
    std::vector<int> info_set;      // sorted, 0-based, |info_set| == K
    BitVector frozen_input;         // length N; frozen values, 0 at info positions
    std::vector<std::uint8_t> is_frozen; // length N

    PolarCodeSpec() = default;

    // frozen_values: one bit per frozen position in increasing index order
    // (all zero when omitted -- the symmetric-channel convention).
    PolarCodeSpec(int n_exp, std::vector<int> info, BitVector frozen_values = {})
        : n(n_exp), block_length(1 << n_exp), info_set(std::move(info))
    {
        if (n_exp < 0 || n_exp > 30) throw std::invalid_argument("polar: bad exponent " + std::to_string(n_exp));
        std::sort(info_set.begin(), info_set.end());
        if (std::adjacent_find(info_set.begin(), info_set.end()) != info_set.end())
            throw std::invalid_argument("polar: duplicate information index");
        if (!info_set.empty() && (info_set.front() < 0 || info_set.back() >= block_length))
            throw std::invalid_argument("polar: information index out of range");

        is_frozen.assign(block_length, 1);
        for (int idx : info_set) is_frozen[idx] = 0;
        frozen_input.assign(block_length, 0);
        if (!frozen_values.empty()) {
            if (int(frozen_values.size()) != block_length - info_count())
                throw std::invalid_argument("polar: frozen value count mismatch");
            std::size_t next = 0;
            for (int i = 0; i < block_length; ++i)
                if (is_frozen[i]) frozen_input[i] = frozen_values[next++] & 1;
        }
    }

    int info_count() const { return int(info_set.size()); }
    double rate() const { return double(info_set.size()) / block_length; }
};

// In-place x = u F^{xn} over GF(2), F = [[1,0],[1,1]].
inline void polar_transform_inplace(std::span<std::uint8_t> bits)
{
    if (!detail::is_power_of_two(bits.size()))
        throw std::invalid_argument("polar_transform: length must be a power of two");
    const std::size_t n = bits.size();
    for (std::size_t half = 1; half < n; half <<= 1)
        for (std::size_t start = 0; start < n; start += 2 * half)
            for (std::size_t j = start; j < start + half; ++j)
                bits[j] ^= bits[j + half];
}

inline BitVector polar_transform(const BitVector& u)
{
    BitVector x = u;
    polar_transform_inplace(x);
    return x;
}

inline BitVector encode(std::span<const std::uint8_t> message, const PolarCodeSpec& spec)
{
    if (int(message.size()) != spec.info_count())
        throw std::invalid_argument("encode: message length " + std::to_string(message.size()) +
                                    " != K " + std::to_string(spec.info_count()));
    BitVector u = spec.frozen_input;
    for (std::size_t i = 0; i < message.size(); ++i) u[spec.info_set[i]] = message[i] & 1;
    polar_transform_inplace(u);
    return u;
}

namespace detail {

// One SC node. llr holds the node's input and is clobbered; work provides
// len/2 scratch doubles per recursion level (len total). u and x receive the
// node's input-bit decisions and its re-encoded codeword, in natural order.
inline void sc_node(double* llr, int len, double* work, const std::uint8_t* is_frozen,
                    const std::uint8_t* frozen_input, std::uint8_t* u, std::uint8_t* x,
                    CheckRule rule)
{
    if (len == 1) {
        std::uint8_t bit;
        if (*is_frozen) {
            bit = *frozen_input;
        } else {
            bit = *llr < 0.0 ? 1 : 0; // tie (llr == 0) decodes to 0
        }
        *u = bit;
        *x = bit;
        return;
    }
    const int half = len / 2;
    for (int j = 0; j < half; ++j) work[j] = check_node(llr[j], llr[j + half], rule);
    sc_node(work, half, work + half, is_frozen, frozen_input, u, x, rule);
    for (int j = 0; j < half; ++j)
        work[j] = llr[j + half] + (x[j] ? -llr[j] : llr[j]);
    sc_node(work, half, work + half, is_frozen + half, frozen_input + half, u + half, x + half, rule);
    for (int j = 0; j < half; ++j) x[j] ^= x[j + half];
}

} // namespace detail

struct ScResult {
    BitVector message;  // length K
    BitVector codeword; // == encode(message, spec)
};

inline ScResult sc_decode(std::span<const double> llr, const PolarCodeSpec& spec,
                          CheckRule rule = CheckRule::exact)
{
    if (int(llr.size()) != spec.block_length)
        throw std::invalid_argument("sc_decode: LLR length " + std::to_string(llr.size()) +
                                    " != N " + std::to_string(spec.block_length));
    const int n = spec.block_length;
    std::vector<double> clamped(llr.begin(), llr.end());
    for (double& v : clamped) v = std::clamp(v, -llr_clamp, llr_clamp);

    std::vector<double> work(n);
    BitVector u(n), x(n);
    detail::sc_node(clamped.data(), n, work.data(), spec.is_frozen.data(),
                    spec.frozen_input.data(), u.data(), x.data(), rule);

    ScResult result;
    result.message.reserve(spec.info_count());
    for (int idx : spec.info_set) result.message.push_back(u[idx]);
    result.codeword = std::move(x);
    return result;
}

} // namespace sskmlc
