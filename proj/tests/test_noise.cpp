#include <doctest.h>

#include <cmath>
#include <vector>

#include "sfde/noise.hpp"

using namespace sfde;

TEST_CASE("brownian increments: empty, bitwise determinism, replay slices") {
    const NoiseStream stream(0x5EED5EEDull, 3, 2);

    CHECK(brownian_increments(stream, 0, 0.01).empty());

    const auto a = brownian_increments(stream, 200, 0.01);
    const auto b = brownian_increments(stream, 200, 0.01);
    CHECK(a == b);

    // a restart at step 50 replays exactly the tail increments
    const auto tail = stream.increments(150, 0.01, 50);
    for (std::size_t i = 0; i < tail.size(); ++i)
        CHECK(tail[i] == a[i + 50 * 2]);
}

TEST_CASE("increments are a pure function of (seed, path, step, component)") {
    const NoiseStream s1(42, 7, 3);
    const NoiseStream s2(42, 7, 3);
    CHECK(s1.normal(1000, 2) == s2.normal(1000, 2));

    // every coordinate of the index changes the draw
    CHECK(NoiseStream(43, 7, 3).normal(1000, 2) != s1.normal(1000, 2));
    CHECK(NoiseStream(42, 8, 3).normal(1000, 2) != s1.normal(1000, 2));
    CHECK(s1.normal(1001, 2) != s1.normal(1000, 2));
    CHECK(s1.normal(1000, 1) != s1.normal(1000, 2));
}

TEST_CASE("increment moments match a Gaussian with variance dt") {
    const double dt = 0.25;
    const long n = 1'000'000;
    const NoiseStream stream(2718281828ull, 0, 1);

    double sum = 0.0, sum_sq = 0.0;
    long positive = 0;
    for (long i = 0; i < n; ++i) {
        const double z = std::sqrt(dt) * stream.normal(static_cast<std::uint64_t>(i), 0);
        sum += z;
        sum_sq += z * z;
        positive += z > 0.0 ? 1 : 0;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;

    // CLT bounds at 4 standard deviations of the sampling error
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(dt / n));
    CHECK(std::abs(var - dt) <= 4.0 * dt * std::sqrt(2.0 / n));
    CHECK(std::abs(positive / static_cast<double>(n) - 0.5) <= 4.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("components and paths are uncorrelated") {
    const long n = 200'000;
    const NoiseStream stream(99, 0, 2);
    const NoiseStream other(99, 1, 2);
    double cross_comp = 0.0, cross_path = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto step = static_cast<std::uint64_t>(i);
        cross_comp += stream.normal(step, 0) * stream.normal(step, 1);
        cross_path += stream.normal(step, 0) * other.normal(step, 0);
    }
    CHECK(std::abs(cross_comp / n) <= 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(cross_path / n) <= 4.0 / std::sqrt(static_cast<double>(n)));
}
