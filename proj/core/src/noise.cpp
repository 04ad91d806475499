#include "sfde/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfde {

namespace detail {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

PhiloxBlock philox4x32(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3,
                       std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mul_hi_lo(kPhiloxM0, c0, hi0, lo0);
        mul_hi_lo(kPhiloxM1, c2, hi1, lo1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return PhiloxBlock{{c0, c1, c2, c3}};
}

} // namespace detail

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t path_index, int dimension)
    : master_seed_(master_seed), path_index_(path_index), dimension_(dimension) {
    if (dimension < 1) throw std::invalid_argument("noise: dimension must be >= 1");
    // Key mixes seed and path so distinct (seed, path) pairs give distinct
    // streams; the raw path index also enters the counter for injectivity.
    const std::uint64_t key = detail::splitmix64(master_seed ^ detail::splitmix64(path_index));
    key0_ = static_cast<std::uint32_t>(key);
    key1_ = static_cast<std::uint32_t>(key >> 32);
    ctr3_ = static_cast<std::uint32_t>(path_index);
}

double NoiseStream::normal(std::uint64_t step, int component) const {
    const auto block = detail::philox4x32(static_cast<std::uint32_t>(step),
                                          static_cast<std::uint32_t>(step >> 32),
                                          static_cast<std::uint32_t>(component),
                                          ctr3_, key0_, key1_);
    const std::uint64_t a = block.v[0] | (static_cast<std::uint64_t>(block.v[1]) << 32);
    const std::uint64_t b = block.v[2] | (static_cast<std::uint64_t>(block.v[3]) << 32);
    // u1 in (0, 1], u2 in [0, 1): Box-Muller never sees log(0)
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void NoiseStream::fill_increment(std::uint64_t step, double dt, std::span<double> out) const {
    const double scale = std::sqrt(dt);
    for (int j = 0; j < dimension_; ++j) out[static_cast<std::size_t>(j)] = scale * normal(step, j);
}

std::vector<double> NoiseStream::increments(int n_steps, double dt, std::uint64_t first_step) const {
    if (n_steps < 0) throw std::invalid_argument("noise: n_steps must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(n_steps) * dimension_);
    for (int s = 0; s < n_steps; ++s)
        fill_increment(first_step + static_cast<std::uint64_t>(s), dt,
                       std::span<double>(out).subspan(static_cast<std::size_t>(s) * dimension_,
                                                      static_cast<std::size_t>(dimension_)));
    return out;
}

std::vector<double> brownian_increments(const NoiseStream& stream, int n_steps, double dt) {
    return stream.increments(n_steps, dt);
}

} // namespace sfde
