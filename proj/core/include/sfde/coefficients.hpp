#pragma once

#include <functional>
#include <span>

#include "sfde/segment.hpp"

namespace sfde {

using DriftFn = std::function<void(const SegmentView&, std::span<const double> x,
                                   std::span<const double> u, std::span<double> out)>;
/// Writes the n x d diffusion matrix column-major: out[i + j*n] = sigma_ij,
/// so column j is the vector multiplying the j-th Brownian component.
using DiffusionFn = std::function<void(const SegmentView&, std::span<const double> x,
                                       std::span<const double> u, std::span<double> out)>;
using RunningCostFn = std::function<double(const SegmentView&, std::span<const double> x,
                                           std::span<const double> u)>;
using TerminalCostFn = std::function<double(const SegmentView&, std::span<const double> x)>;
using RegionFn = std::function<bool(const SegmentView&, std::span<const double> x)>;

inline RegionFn whole_space() {
    return [](const SegmentView&, std::span<const double>) { return true; };
}

/// Problem data for one controlled system: dynamics, costs and the open
/// region G whose first exit time stops the cost integral.
struct CoefficientSet {
    int state_dim = 1;   // n
    int noise_dim = 1;   // d
    int control_dim = 1; // m
    DriftFn drift;
    DiffusionFn diffusion;
    RunningCostFn running_cost;
    TerminalCostFn terminal_cost;
    RegionFn region;

    CoefficientSet with_region(RegionFn r) const {
        CoefficientSet out = *this;
        out.region = std::move(r);
        return out;
    }

    void validate() const {
        if (state_dim < 1 || noise_dim < 1 || control_dim < 1)
            throw std::invalid_argument("coefficients: dimensions must be >= 1");
        if (!drift || !diffusion || !region)
            throw std::invalid_argument("coefficients: drift, diffusion and region are required");
    }
};

inline double zero_running_cost(const SegmentView&, std::span<const double>,
                                std::span<const double>) { return 0.0; }
inline double zero_terminal_cost(const SegmentView&, std::span<const double>) { return 0.0; }

} // namespace sfde
