#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sfde/portfolio.hpp"
#include "sfde/simulator.hpp"

namespace sfde::testing {

// ---- coefficient corpus -------------------------------------------------

/// Geometric growth: drift mu x, diffusion sigma x, no delay dependence.
inline CoefficientSet make_gbm(double mu, double sigma) {
    CoefficientSet c;
    c.drift = [mu](const SegmentView&, std::span<const double> x, std::span<const double>,
                   std::span<double> out) { out[0] = mu * x[0]; };
    c.diffusion = [sigma](const SegmentView&, std::span<const double> x, std::span<const double>,
                          std::span<double> out) { out[0] = sigma * x[0]; };
    c.running_cost = zero_running_cost;
    c.terminal_cost = [](const SegmentView&, std::span<const double> x) { return x[0]; };
    c.region = whole_space();
    return c;
}

/// Standard Brownian motion: drift 0, unit diffusion.
inline CoefficientSet make_brownian() {
    CoefficientSet c;
    c.drift = [](const SegmentView&, std::span<const double>, std::span<const double>,
                 std::span<double> out) { out[0] = 0.0; };
    c.diffusion = [](const SegmentView&, std::span<const double>, std::span<const double>,
                     std::span<double> out) { out[0] = 1.0; };
    c.running_cost = zero_running_cost;
    c.terminal_cost = zero_terminal_cost;
    c.region = whole_space();
    return c;
}

/// Pure delayed feedback: drift S(t - r), no noise.
inline CoefficientSet make_delay_drift() {
    CoefficientSet c;
    c.drift = [](const SegmentView& seg, std::span<const double>, std::span<const double>,
                 std::span<double> out) { out[0] = seg.front()[0]; };
    c.diffusion = [](const SegmentView&, std::span<const double>, std::span<const double>,
                     std::span<double> out) { out[0] = 0.0; };
    c.running_cost = zero_running_cost;
    c.terminal_cost = zero_terminal_cost;
    c.region = whole_space();
    return c;
}

/// Constant drift and diffusion.
inline CoefficientSet make_const(double drift, double diffusion) {
    CoefficientSet c;
    c.drift = [drift](const SegmentView&, std::span<const double>, std::span<const double>,
                      std::span<double> out) { out[0] = drift; };
    c.diffusion = [diffusion](const SegmentView&, std::span<const double>, std::span<const double>,
                              std::span<double> out) { out[0] = diffusion; };
    c.running_cost = zero_running_cost;
    c.terminal_cost = zero_terminal_cost;
    c.region = whole_space();
    return c;
}

inline MarkovControlLaw idle_law() {
    return MarkovControlLaw::constant("idle", {0.0}, ControlBounds::scalar(-1.0, 1.0));
}

/// Delay-free setups still need a (trivial) history: one step of dt.
inline ControlledState point_state(double x, double dt) {
    return ControlledState::from_segment(SegmentPath::constant(x, 1, dt));
}

inline RegionFn interval_region(double lo, double hi) {
    return [lo, hi](const SegmentView&, std::span<const double> x) {
        return x[0] > lo && x[0] < hi;
    };
}

// ---- independent oracles ------------------------------------------------

/// Method-of-steps oracle for dS/dt = S(t - 1) with S == 1 on [-1, 0]:
/// on each unit interval the solution is the running polynomial
/// S(t) = sum c_j (t - k)^j, advanced by exact polynomial integration.
class MethodOfStepsOracle {
public:
    explicit MethodOfStepsOracle(int intervals) {
        std::vector<double> current{1.0}; // S == 1 on [-1, 0]
        segments_.push_back(current);
        for (int k = 0; k < intervals; ++k) {
            // S'(t) = previous polynomial evaluated at local coordinate,
            // so integrate the previous coefficients once
            std::vector<double> next(segments_.back().size() + 1, 0.0);
            next[0] = eval(segments_.size() - 1, 1.0); // continuity at the knot
            for (std::size_t j = 0; j < segments_.back().size(); ++j)
                next[j + 1] = segments_.back()[j] / static_cast<double>(j + 1);
            segments_.push_back(std::move(next));
        }
    }

    /// S(t) for t >= -1.
    double operator()(double t) const {
        if (t <= 0.0) return 1.0;
        std::size_t k = static_cast<std::size_t>(t);
        if (k + 1 >= segments_.size()) k = segments_.size() - 2;
        return eval(k + 1, t - static_cast<double>(k));
    }

private:
    double eval(std::size_t index, double local) const {
        double value = 0.0;
        double power = 1.0;
        for (double c : segments_[index]) {
            value += c * power;
            power *= local;
        }
        return value;
    }

    std::vector<std::vector<double>> segments_; // [0] is the history itself
};

/// Gambler's-ruin expectation on the fine grid {0, dx, ..., 1}: solves
/// E_i = 1 + (E_{i-1} + E_{i+1})/2 by the Thomas algorithm and returns the
/// exit-time expectation E_i * dx^2 at the grid point nearest x.
inline double walk_exit_time_oracle(double x, int grid_points) {
    const int interior = grid_points - 1;
    std::vector<double> diag(interior, 1.0), rhs(interior, 1.0);
    std::vector<double> upper(interior, -0.5), lower(interior, -0.5);
    // forward elimination
    for (int i = 1; i < interior; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> steps(interior);
    steps[interior - 1] = rhs[interior - 1] / diag[interior - 1];
    for (int i = interior - 2; i >= 0; --i)
        steps[i] = (rhs[i] - upper[i] * steps[i + 1]) / diag[i];
    const double dx = 1.0 / grid_points;
    const int node = static_cast<int>(std::lround(x / dx));
    return steps[node - 1] * dx * dx;
}

/// Exact geometric-growth solution driven by the same Brownian path.
inline double gbm_exact(double x0, double mu, double sigma, double t, double w_t) {
    return x0 * std::exp((mu - 0.5 * sigma * sigma) * t + sigma * w_t);
}

/// Random scalar segment with values in [lo, hi], fixed-seed generator.
inline SegmentPath random_segment(std::mt19937_64& rng, int history_steps, double dt,
                                  double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> values(static_cast<std::size_t>(history_steps) + 1);
    for (auto& v : values) v = dist(rng);
    return SegmentPath(std::move(values), 1, dt);
}

} // namespace sfde::testing
