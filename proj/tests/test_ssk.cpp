#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "sskmlc/rng.hpp"
#include "sskmlc/ssk.hpp"

using namespace sskmlc;

namespace {

// Brute-force reference demapper in extended precision: partitions the label
// set by raw enumeration and sums the likelihoods directly.
long double oracle_subset_sum(std::span<const Complex> y, const ChannelRealization& h,
                              double noise_var, int level, int prior_label, int bit_value)
{
    const int nt = h.cols();
    int m = 0;
    while ((1 << (m + 1)) <= nt) ++m;
    long double sum = 0.0L;
    for (int label = 0; label < nt; ++label) {
        if ((label & ((1 << (level - 1)) - 1)) != prior_label) continue;
        if (((label >> (level - 1)) & 1) != bit_value) continue;
        long double d = 0.0L;
        const auto col = h.column(label + 1);
        for (int p = 0; p < h.rows(); ++p) {
            const long double re = y[p].real() - col[p].real();
            const long double im = y[p].imag() - col[p].imag();
            d += re * re + im * im;
        }
        sum += std::exp(-d / (long double)noise_var);
    }
    return sum;
}

double oracle_msd_llr(std::span<const Complex> y, const ChannelRealization& h, double noise_var,
                      int level, int prior_label)
{
    const long double s0 = oracle_subset_sum(y, h, noise_var, level, prior_label, 0);
    const long double s1 = oracle_subset_sum(y, h, noise_var, level, prior_label, 1);
    return std::clamp(double(std::log(s0) - std::log(s1)), -llr_clamp, llr_clamp);
}

double oracle_bicm_llr(std::span<const Complex> y, const ChannelRealization& h, double noise_var,
                       int bit)
{
    const int nt = h.cols();
    long double s0 = 0.0L, s1 = 0.0L;
    for (int label = 0; label < nt; ++label) {
        long double d = 0.0L;
        const auto col = h.column(label + 1);
        for (int p = 0; p < h.rows(); ++p) {
            const long double re = y[p].real() - col[p].real();
            const long double im = y[p].imag() - col[p].imag();
            d += re * re + im * im;
        }
        const long double e = std::exp(-d / (long double)noise_var);
        (label & (1 << bit)) ? s1 += e : s0 += e;
    }
    return std::clamp(double(std::log(s0) - std::log(s1)), -llr_clamp, llr_clamp);
}

struct RandomInstance {
    ChannelRealization h;
    std::vector<Complex> y;
};

RandomInstance random_instance(CounterRng& rng, int nr, int nt, double noise_var)
{
    auto h = ChannelRealization::rayleigh(nr, nt, rng);
    const int k = 1 + int(rng.next_index(std::uint32_t(nt)));
    auto y = transmit(k, h, noise_var, rng);
    return {std::move(h), std::move(y)};
}

} // namespace

TEST_CASE("ssk config invariants")
{
    const SskConfig cfg(16, 4, 3.0);
    CHECK(cfg.bits_per_symbol() == 4);
    CHECK(cfg.noise_density() == Catch::Approx(std::pow(10.0, -0.3)));
    CHECK(cfg.noise_variance() == Catch::Approx(0.5 * std::pow(10.0, -0.3)));
    CHECK_THROWS_AS(SskConfig(12, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SskConfig(16, 0, 0.0), std::invalid_argument);
}

TEST_CASE("label map endpoints and bijection")
{
    CHECK(map_bits(BitVector{0, 0, 0, 0}) == 1);
    CHECK(map_bits(BitVector{1, 1, 1, 1}) == 16);
    for (int m = 1; m <= 6; ++m)
        for (int k = 1; k <= (1 << m); ++k) CHECK(map_bits(unmap_antenna(k, m)) == k);
    CHECK_THROWS_AS(map_bits(BitVector{}), std::invalid_argument);
    CHECK_THROWS_AS(unmap_antenna(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(unmap_antenna(5, 2), std::invalid_argument);
}

TEST_CASE("transmit adds the requested noise")
{
    CounterRng rng(5, RngDomain::test, 0);
    auto h = ChannelRealization::rayleigh(2, 4, rng);

    SECTION("zero noise returns the column")
    {
        const auto y = transmit(3, h, 0.0, rng);
        const auto col = h.column(3);
        for (int p = 0; p < 2; ++p) CHECK(y[p] == col[p]);
    }

    SECTION("noise energy matches N_R * variance")
    {
        const double variance = 0.8;
        const int draws = 100000;
        double energy = 0.0;
        Complex mean_dev{0.0, 0.0};
        for (int i = 0; i < draws; ++i) {
            const auto y = transmit(2, h, variance, rng);
            const auto col = h.column(2);
            for (int p = 0; p < 2; ++p) {
                energy += std::norm(y[p] - col[p]);
                mean_dev += y[p] - col[p];
            }
        }
        CHECK(energy / draws == Catch::Approx(2 * variance).epsilon(0.02));
        // 3 standard errors per component for the zero-mean check
        const double se = std::sqrt(variance / 2.0 / (2.0 * draws));
        CHECK(std::fabs(mean_dev.real() / (2.0 * draws)) < 3.0 * se);
        CHECK(std::fabs(mean_dev.imag() / (2.0 * draws)) < 3.0 * se);
    }

    SECTION("out-of-range antenna throws")
    {
        CHECK_THROWS_AS(transmit(0, h, 0.1, rng), std::invalid_argument);
        CHECK_THROWS_AS(transmit(5, h, 0.1, rng), std::invalid_argument);
    }
}

TEST_CASE("msd llr reduces to the pairwise formula for two antennas")
{
    CounterRng rng(7, RngDomain::test, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const double noise_var = 0.4;
        auto inst = random_instance(rng, 1, 2, noise_var);
        const double llr = msd_llr(inst.y, inst.h, noise_var, 1, {});
        const double d1 = std::norm(inst.y[0] - inst.h.column(1)[0]);
        const double d2 = std::norm(inst.y[0] - inst.h.column(2)[0]);
        CHECK(llr == Catch::Approx((d2 - d1) / noise_var).margin(1e-12));
    }
}

TEST_CASE("complementing the split negates the llr")
{
    CounterRng rng(11, RngDomain::test, 2);
    const double noise_var = 0.3;
    for (int level = 1; level <= 4; ++level) {
        auto inst = random_instance(rng, 2, 16, noise_var);
        for (int prior = 0; prior < (1 << (level - 1)); ++prior) {
            // swap the two half-subsets by relabeling columns: flip bit level-1
            std::vector<Complex> flipped(16 * 2);
            for (int label = 0; label < 16; ++label) {
                const auto col = inst.h.column(label + 1);
                const int target = label ^ (1 << (level - 1));
                std::copy(col.begin(), col.end(), flipped.begin() + target * 2);
            }
            ChannelRealization hf(2, 16, std::move(flipped));
            std::vector<double> s_orig(16), s_flip(16);
            detail::antenna_scores(inst.y, inst.h, noise_var, s_orig);
            detail::antenna_scores(inst.y, hf, noise_var, s_flip);
            const double a = msd_llr_from_scores(s_orig, 4, level, prior);
            const double b = msd_llr_from_scores(s_flip, 4, level, prior);
            CHECK(a == Catch::Approx(-b).margin(1e-9));
        }
    }
}

TEST_CASE("msd llr matches the exhaustive oracle")
{
    for (const int nr : {1, 4}) {
        CounterRng rng(13, RngDomain::test, nr);
        const double noise_var = SskConfig(16, nr, 2.0).noise_variance();
        for (int trial = 0; trial < 100; ++trial) {
            auto inst = random_instance(rng, nr, 16, noise_var);
            for (int level = 1; level <= 4; ++level) {
                const int prior = int(rng.next_index(1u << (level - 1)));
                std::vector<std::uint8_t> bits(level - 1);
                for (int j = 0; j < level - 1; ++j) bits[j] = (prior >> j) & 1;
                const double got = msd_llr(inst.y, inst.h, noise_var, level, bits);
                const double want = oracle_msd_llr(inst.y, inst.h, noise_var, level, prior);
                CHECK(got == Catch::Approx(want).epsilon(1e-9).margin(1e-9));
            }
        }
    }
}

TEST_CASE("bicm llr matches the exhaustive oracle")
{
    for (const int nr : {1, 4}) {
        CounterRng rng(17, RngDomain::test, nr);
        const double noise_var = SskConfig(16, nr, 0.0).noise_variance();
        for (int trial = 0; trial < 100; ++trial) {
            auto inst = random_instance(rng, nr, 16, noise_var);
            const auto got = bicm_llr(inst.y, inst.h, noise_var);
            REQUIRE(got.size() == 4);
            for (int bit = 0; bit < 4; ++bit) {
                const double want = oracle_bicm_llr(inst.y, inst.h, noise_var, bit);
                CHECK(got[bit] == Catch::Approx(want).epsilon(1e-9).margin(1e-9));
            }
        }
    }
}

TEST_CASE("bicm llr equals msd llr when there is one bit")
{
    CounterRng rng(19, RngDomain::test, 0);
    const double noise_var = 0.25;
    for (int trial = 0; trial < 50; ++trial) {
        auto inst = random_instance(rng, 2, 2, noise_var);
        const auto parallel = bicm_llr(inst.y, inst.h, noise_var);
        REQUIRE(parallel.size() == 1);
        CHECK(parallel[0] == Catch::Approx(msd_llr(inst.y, inst.h, noise_var, 1, {})).margin(1e-12));
    }
}

TEST_CASE("swapping labels that agree on a bit leaves that bicm llr unchanged")
{
    CounterRng rng(23, RngDomain::test, 0);
    const double noise_var = 0.5;
    auto inst = random_instance(rng, 2, 16, noise_var);
    const auto base = bicm_llr(inst.y, inst.h, noise_var);
    // labels 0 and 6 agree on bit 0; swap their columns
    std::vector<Complex> swapped;
    for (int label = 0; label < 16; ++label) {
        const int src = label == 0 ? 6 : label == 6 ? 0 : label;
        const auto col = inst.h.column(src + 1);
        swapped.insert(swapped.end(), col.begin(), col.end());
    }
    ChannelRealization hs(2, 16, std::move(swapped));
    const auto perm = bicm_llr(inst.y, hs, noise_var);
    CHECK(perm[0] == Catch::Approx(base[0]).margin(1e-12));
}

TEST_CASE("all demapper outputs are finite and clamped")
{
    CounterRng rng(29, RngDomain::test, 0);
    auto inst = random_instance(rng, 1, 16, 1e-9); // near-noiseless: extreme scores
    for (int level = 1; level <= 4; ++level) {
        std::vector<std::uint8_t> priors(level - 1, 0);
        const double llr = msd_llr(inst.y, inst.h, 1e-9, level, priors);
        CHECK(std::isfinite(llr));
        CHECK(std::fabs(llr) <= llr_clamp);
    }
    for (double v : bicm_llr(inst.y, inst.h, 1e-9)) {
        CHECK(std::isfinite(v));
        CHECK(std::fabs(v) <= llr_clamp);
    }
}

TEST_CASE("noiseless llr signs spell out the transmitted label")
{
    CounterRng rng(31, RngDomain::test, 0);
    for (int trial = 0; trial < 20; ++trial) {
        auto h = ChannelRealization::rayleigh(2, 16, rng);
        const int k = 1 + int(rng.next_index(16));
        const auto y = transmit(k, h, 0.0, rng);
        const auto bits = unmap_antenna(k, 4);
        const double noise_var = 1e-6;

        const auto parallel = bicm_llr(y, h, noise_var);
        for (int j = 0; j < 4; ++j) CHECK((parallel[j] < 0.0) == (bits[j] == 1));

        std::vector<std::uint8_t> priors;
        for (int level = 1; level <= 4; ++level) {
            const double llr = msd_llr(y, h, noise_var, level, priors);
            CHECK((llr < 0.0) == (bits[level - 1] == 1));
            priors.push_back(bits[level - 1]);
        }
    }
}

TEST_CASE("final msd level discriminates exactly two antennas")
{
    CounterRng rng(37, RngDomain::test, 0);
    const double noise_var = 0.6;
    auto inst = random_instance(rng, 3, 8, noise_var);
    for (int prior = 0; prior < 4; ++prior) {
        std::vector<std::uint8_t> bits{std::uint8_t(prior & 1), std::uint8_t((prior >> 1) & 1)};
        const double llr = msd_llr(inst.y, inst.h, noise_var, 3, bits);
        // antennas with labels prior and prior|4
        double d0 = 0.0, d1 = 0.0;
        for (int p = 0; p < 3; ++p) {
            d0 += std::norm(inst.y[p] - inst.h.column(prior + 1)[p]);
            d1 += std::norm(inst.y[p] - inst.h.column((prior | 4) + 1)[p]);
        }
        CHECK(llr == Catch::Approx((d1 - d0) / noise_var).margin(1e-9));
    }
}

TEST_CASE("msd llr validates its inputs")
{
    CounterRng rng(41, RngDomain::test, 0);
    auto inst = random_instance(rng, 1, 4, 0.5);
    CHECK_THROWS_AS(msd_llr(inst.y, inst.h, 0.5, 2, {}), std::invalid_argument);
    CHECK_THROWS_AS(msd_llr(inst.y, inst.h, 0.5, 0, {}), std::invalid_argument);
}
