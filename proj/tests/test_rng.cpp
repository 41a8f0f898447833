#include "dkm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>

using namespace dkm;

namespace {

// Reference CDF via erfc.
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

} // namespace

TEST_CASE("normal quantile inverts the erfc-based CDF to 1e-9") {
    // Both branches of the approximation, including deep tails.
    for (double u = 1e-12; u < 1.0; u = u < 0.1 ? u * 2.0 : u + 0.01) {
        const double z = detail::normal_quantile(u);
        CHECK(std::abs(normal_cdf(z) - u) <= 2e-9 * std::max(u, 1.0 - u) + 1e-15);
    }
}

TEST_CASE("normal quantile is antisymmetric") {
    for (double u : {1e-9, 0.01, 0.2, 0.49}) {
        CHECK(detail::normal_quantile(u) == doctest::Approx(-detail::normal_quantile(1.0 - u)).epsilon(1e-9));
    }
}

TEST_CASE("draws are pure functions of (seed, stream, counter)") {
    const RngKey key{123, 456};
    CHECK(uniform01(key, 7) == uniform01(key, 7));
    CHECK(normal(key, 7) == normal(key, 7));
    CHECK(uniform01(key, 7) != uniform01(key, 8));
    CHECK(uniform01(key, 7) != uniform01(RngKey{123, 457}, 7));
    CHECK(uniform01(key, 7) != uniform01(RngKey{124, 456}, 7));
}

TEST_CASE("uniform draws stay in the open unit interval and look uniform") {
    const RngKey key{999, 0};
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = uniform01(key, static_cast<std::uint64_t>(i));
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) <= 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("child keys decorrelate related tags") {
    const RngKey root{5, 0};
    const auto a = root.child(1);
    const auto b = root.child(2);
    CHECK(a.seed != b.seed);
    double sxy = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        sxy += (uniform01(a, static_cast<std::uint64_t>(i)) - 0.5) *
               (uniform01(b, static_cast<std::uint64_t>(i)) - 0.5);
    }
    CHECK(std::abs(sxy / n / (1.0 / 12.0)) <= 0.05);
}
