#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sfde {

namespace detail {

// Philox 4x32-10 block cipher (Salmon et al., SC 2011). Counter-based:
// every 128-bit output block is a pure function of (key, counter), so any
// increment can be regenerated in isolation.
struct PhiloxBlock {
    std::uint32_t v[4];
};

PhiloxBlock philox4x32(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3,
                       std::uint32_t k0, std::uint32_t k1);

} // namespace detail

/// One path's Brownian driver. The standard normal for (master_seed,
/// path_index, step, component) is a pure function of those four integers:
/// identical regardless of worker count, evaluation order, or restart point.
class NoiseStream {
public:
    NoiseStream(std::uint64_t master_seed, std::uint64_t path_index, int dimension);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t path_index() const { return path_index_; }
    int dimension() const { return dimension_; }

    /// Standard normal deviate for the given absolute step and component.
    double normal(std::uint64_t step, int component) const;

    /// ΔW for one step: d independent N(0, dt) components.
    void fill_increment(std::uint64_t step, double dt, std::span<double> out) const;

    /// Increments for steps first_step, ..., first_step + n_steps - 1,
    /// flattened as n_steps x d. Variance dt per component.
    std::vector<double> increments(int n_steps, double dt, std::uint64_t first_step = 0) const;

private:
    std::uint64_t master_seed_;
    std::uint64_t path_index_;
    int dimension_;
    std::uint32_t key0_;
    std::uint32_t key1_;
    std::uint32_t ctr3_;
};

/// Free-function form: n_steps Gaussian(0, dt I_d) increment vectors starting
/// at step 0, deterministic in (master_seed, path_index).
std::vector<double> brownian_increments(const NoiseStream& stream, int n_steps, double dt);

} // namespace sfde
