#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sskmlc/construction.hpp"

using namespace sskmlc;

namespace {

// Independent reference for the length-4 design channel: unrolled check/variable
// node formulas in extended precision (tanh form) driven by std::mt19937, fully
// separate from the library's recursion and RNG.
std::vector<double> oracle_length4(double design_snr_db, int samples, unsigned rng_seed)
{
    std::mt19937 gen(rng_seed);
    std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
    const double noise_var = 0.5 * std::pow(10.0, -design_snr_db / 10.0);
    const double noise_sd = std::sqrt(noise_var / 2.0);
    std::normal_distribution<double> noise(0.0, noise_sd);

    auto boxplus_ref = [](long double a, long double b) {
        return 2.0L * std::atanh(std::tanh(a / 2.0L) * std::tanh(b / 2.0L));
    };

    std::vector<long long> errors(4, 0);
    for (int s = 0; s < samples; ++s) {
        long double llr[4];
        for (int j = 0; j < 4; ++j) {
            const std::complex<double> h(unit(gen), unit(gen));
            const std::complex<double> y = h + std::complex<double>(noise(gen), noise(gen));
            const double channel = 4.0 * (std::conj(h) * y).real() / noise_var;
            llr[j] = std::clamp(channel, -llr_clamp, llr_clamp);
        }
        const long double f02 = boxplus_ref(llr[0], llr[2]);
        const long double f13 = boxplus_ref(llr[1], llr[3]);
        const long double g02 = llr[0] + llr[2];
        const long double g13 = llr[1] + llr[3];
        const long double leaf[4] = {boxplus_ref(f02, f13), f02 + f13, boxplus_ref(g02, g13),
                                     g02 + g13};
        for (int j = 0; j < 4; ++j)
            if (leaf[j] < 0.0L) ++errors[j];
    }
    std::vector<double> p(4);
    for (int j = 0; j < 4; ++j) p[j] = double(errors[j]) / samples;
    return p;
}

CapacityReport synthetic_report(std::vector<double> levels, double se = 1e-4)
{
    CapacityReport report;
    report.level_capacity = std::move(levels);
    report.level_std_error.assign(report.level_capacity.size(), se);
    return report;
}

} // namespace

TEST_CASE("high design snr drives every error probability toward zero")
{
    // deep fades keep the rate strictly positive at finite SNR, but at 40 dB
    // it is orders of magnitude below any usable operating point
    const auto profile = estimate_reliabilities(16, 40.0, 20000, 3);
    for (double p : profile.error_prob) CHECK(p <= 5e-4);
}

TEST_CASE("two-channel polarization direction")
{
    const auto profile = estimate_reliabilities(2, 0.0, 50000, 5);
    CHECK(profile.error_prob[0] > profile.error_prob[1]);
}

TEST_CASE("length-4 reliabilities match an independent oracle")
{
    const auto lib = estimate_reliabilities(4, 3.29, 100000, 7);
    const auto ref = oracle_length4(3.29, 200000, 1234);
    for (int j = 0; j < 4; ++j) {
        const double se_lib = std::sqrt(lib.error_prob[j] * (1 - lib.error_prob[j]) / 100000.0);
        const double se_ref = std::sqrt(ref[j] * (1 - ref[j]) / 200000.0);
        CHECK(std::fabs(lib.error_prob[j] - ref[j]) <= 4.0 * (se_lib + se_ref) + 1e-4);
    }
    // polarization ordering: worst, then the two middle channels, then best
    CHECK(lib.error_prob[0] > lib.error_prob[1]);
    CHECK(lib.error_prob[1] > lib.error_prob[3]);
    CHECK(lib.error_prob[2] > lib.error_prob[3]);
    CHECK(lib.error_prob[1] >= lib.error_prob[2] - 0.01);
}

TEST_CASE("median reliability improves with design snr")
{
    const auto low = estimate_reliabilities(64, 1.0, 40000, 11);
    const auto high = estimate_reliabilities(64, 4.0, 40000, 11);
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    CHECK(median(high.error_prob) <= median(low.error_prob));
}

TEST_CASE("long codes polarize by at least a decade")
{
    const auto profile = estimate_reliabilities(256, 0.0, 30000, 13);
    const auto [lo, hi] =
        std::minmax_element(profile.error_prob.begin(), profile.error_prob.end());
    CHECK(*hi >= 10.0 * *lo);
    CHECK(*hi > 0.0);
}

TEST_CASE("reliability estimation is thread-count independent")
{
    const auto a = estimate_reliabilities(64, 2.0, 10000, 17, 1);
    const auto b = estimate_reliabilities(64, 2.0, 10000, 17, 3);
    CHECK(a.error_prob == b.error_prob);
}

TEST_CASE("reliability estimation validates inputs")
{
    CHECK_THROWS_AS(estimate_reliabilities(12, 0.0, 1000, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_reliabilities(16, 0.0, 0, 1), std::invalid_argument);
}

TEST_CASE("rate allocation rounds half-up and clamps")
{
    const auto alloc = allocate_rates(synthetic_report({0.2738, 0.4143, 0.5856, 0.7323}), 256);
    CHECK(alloc.info_counts == std::vector<int>{70, 106, 150, 187});

    const auto all = allocate_rates(synthetic_report({0.999, 1.2}), 16);
    CHECK(all.info_counts == std::vector<int>{16, 16}); // clamped at N

    const auto zero = allocate_rates(synthetic_report({0.0, 0.0, 0.0, 0.0}), 256);
    CHECK(zero.info_counts == std::vector<int>{0, 0, 0, 0});
    CHECK(zero.total_info() == 0);

    // exact .5 rounds up
    const auto half = allocate_rates(synthetic_report({0.5 / 16.0}), 16);
    CHECK(half.info_counts == std::vector<int>{1});
}

TEST_CASE("rate allocation flags capacities below the noise floor")
{
    CHECK_THROWS_AS(allocate_rates(synthetic_report({-0.01, 0.3}, 1e-3), 256), EstimationError);
    // small negative estimates within noise clamp to zero instead
    const auto alloc = allocate_rates(synthetic_report({-0.0005, 0.3}, 1e-3), 256);
    CHECK(alloc.info_counts.front() == 0);
}

TEST_CASE("segregation picks the most reliable indices per block")
{
    ReliabilityProfile profile;
    profile.length = 4;
    profile.error_prob = {0.4, 0.1, 0.3, 0.05};
    RateAllocation alloc;
    alloc.component_length = 2;
    alloc.info_counts = {1, 1};

    const auto specs = segregate(profile, alloc);
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].info_set == std::vector<int>{1});
    CHECK(specs[1].info_set == std::vector<int>{1});
}

TEST_CASE("segregation edge rates")
{
    ReliabilityProfile profile;
    profile.length = 8;
    profile.error_prob = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    RateAllocation alloc;
    alloc.component_length = 4;

    alloc.info_counts = {4, 4};
    auto specs = segregate(profile, alloc);
    CHECK(specs[0].info_set == std::vector<int>{0, 1, 2, 3});
    CHECK(specs[1].info_set == std::vector<int>{0, 1, 2, 3});

    alloc.info_counts = {0, 0};
    specs = segregate(profile, alloc);
    CHECK(specs[0].info_set.empty());
    CHECK(specs[1].info_set.empty());

    alloc.info_counts = {5, 0};
    CHECK_THROWS_AS(segregate(profile, alloc), std::invalid_argument);
    alloc.info_counts = {1, 1, 1};
    CHECK_THROWS_AS(segregate(profile, alloc), std::invalid_argument);
}

TEST_CASE("segregation breaks ties toward the smaller index")
{
    ReliabilityProfile profile;
    profile.length = 4;
    profile.error_prob = {0.5, 0.5, 0.5, 0.5};
    RateAllocation alloc;
    alloc.component_length = 4;
    alloc.info_counts = {2};
    const auto specs = segregate(profile, alloc);
    CHECK(specs[0].info_set == std::vector<int>{0, 1});
}

TEST_CASE("segregated info counts add up")
{
    const auto profile = estimate_reliabilities(64, 2.0, 10000, 19);
    RateAllocation alloc;
    alloc.component_length = 16;
    alloc.info_counts = {3, 7, 11, 15};
    const auto specs = segregate(profile, alloc);
    int total = 0;
    for (const auto& spec : specs) total += spec.info_count();
    CHECK(total == alloc.total_info());
}

TEST_CASE("global best-K spec spans the whole profile")
{
    ReliabilityProfile profile;
    profile.length = 8;
    profile.error_prob = {0.9, 0.1, 0.8, 0.2, 0.7, 0.3, 0.6, 0.4};
    const auto spec = most_reliable_spec(profile, 3);
    CHECK(spec.block_length == 8);
    CHECK(spec.info_set == std::vector<int>{1, 3, 5});
    CHECK_THROWS_AS(most_reliable_spec(profile, 9), std::invalid_argument);
}
