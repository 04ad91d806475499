#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace sfde {

/// Carrier for every Monte Carlo number the library reports. Reproducible:
/// the same seed and configuration give the same mean bit-for-bit.
struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::uint64_t master_seed = 0;
};

/// Two-pass mean / standard error with a fixed left-to-right summation
/// order, so results do not depend on how the samples were produced.
inline MonteCarloEstimate summarize(std::span<const double> samples, std::uint64_t master_seed) {
    MonteCarloEstimate est;
    est.n_paths = static_cast<long>(samples.size());
    est.master_seed = master_seed;
    if (samples.empty()) return est;
    double sum = 0.0;
    for (double s : samples) sum += s;
    est.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double s : samples) {
            const double d = s - est.mean;
            ss += d * d;
        }
        const double var = ss / static_cast<double>(samples.size() - 1);
        est.std_error = std::sqrt(var / static_cast<double>(samples.size()));
    }
    return est;
}

/// Batch estimate plus the fraction of paths censored at the horizon.
struct BatchEstimate {
    MonteCarloEstimate estimate;
    double censored_fraction = 0.0;
};

} // namespace sfde
