#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "temlab/brownian.hpp"
#include "temlab/rng.hpp"

using namespace temlab;

TEST_CASE("uniform_from_bits stays inside the open unit interval") {
    CHECK(uniform_from_bits(0) > 0.0);
    CHECK(uniform_from_bits(~0ull) < 1.0);
    CHECK(uniform_from_bits(1ull << 62) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("inverse normal CDF hits known quantiles") {
    CHECK(inverse_normal_cdf(0.5) == 0.0);
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    CHECK(inverse_normal_cdf(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(inverse_normal_cdf(1e-300) < -37.0);
    CHECK_THROWS_AS((void)inverse_normal_cdf(0.0), std::domain_error);
    CHECK_THROWS_AS((void)inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("inverse normal CDF is antisymmetric around 1/2") {
    for (double p : {0.1, 0.3, 0.42, 0.001})
        CHECK(inverse_normal_cdf(p) == doctest::Approx(-inverse_normal_cdf(1.0 - p)).epsilon(1e-12));
    // Deep tail: 1 - p is no longer exact in double, so only ask for the
    // accuracy the rounded argument supports.
    CHECK(inverse_normal_cdf(1e-8) == doctest::Approx(-inverse_normal_cdf(1.0 - 1e-8)).epsilon(1e-6));
}

TEST_CASE("normal streams are pure functions of (seed, stream, index)") {
    NormalStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (std::uint64_t i : {0ull, 1ull, 2ull, 1000ull, (1ull << 40)}) {
        CHECK(a(i) == b(i));
        CHECK(a(i) != c(i));
        CHECK(a(i) != d(i));
    }
    // Evaluation order is irrelevant.
    const double late = a(5);
    (void)a(0);
    CHECK(a(5) == late);
}

TEST_CASE("normal stream sample moments match N(0,1)") {
    NormalStream s(2024, 0);
    const std::size_t n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = s(i);
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    // 5 sigma bands for n = 2e5.
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("fine increments live on the lattice and have the right scale") {
    const double delta = 0x1p-10;
    BrownianDriver drv(99, delta, 4096);
    const auto inc = drv.fine_increments(3);
    REQUIRE(inc.size() == 4096);
    double sumsq = 0.0;
    for (double x : inc) {
        const double q = x / kIncrementQuantum;
        CHECK(q == std::nearbyint(q)); // exact lattice point
        sumsq += x * x;
    }
    // E sum = n * delta; loose CLT band.
    CHECK(sumsq / (4096.0 * delta) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("paths are decorrelated across path indices") {
    const double delta = 0x1p-8;
    BrownianDriver drv(7, delta, 2048);
    const auto a = drv.fine_increments(0);
    const auto b = drv.fine_increments(1);
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    const double corr = dot / (2048.0 * delta);
    CHECK(std::abs(corr) < 0.15);
}

TEST_CASE("coarsen preserves sums exactly and chains bitwise") {
    BrownianDriver drv(5, 0x1p-12, 8192);
    const auto fine = drv.fine_increments(11);

    double total_fine = 0.0;
    for (double x : fine) total_fine += x;

    const auto by2 = coarsen(fine, 2);
    const auto by8 = coarsen(fine, 8);
    const auto chained = coarsen(coarsen(by2, 2), 2);
    REQUIRE(by8.size() == chained.size());
    for (std::size_t i = 0; i < by8.size(); ++i) CHECK(by8[i] == chained[i]);

    double total_by8 = 0.0;
    for (double x : by8) total_by8 += x;
    CHECK(total_fine == total_by8); // exact on the lattice

    CHECK_THROWS_AS((void)coarsen(fine, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)coarsen(fine, 0), std::invalid_argument);
}

TEST_CASE("driver rejects degenerate parameters") {
    CHECK_THROWS_AS(BrownianDriver(1, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(BrownianDriver(1, 0x1p-4, 0), std::invalid_argument);
}
