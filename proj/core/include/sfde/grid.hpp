#pragma once

#include <cmath>
#include <string>

#include "sfde/errors.hpp"

namespace sfde {

/// Rounds span/dt to the nearest integer and checks the span really is a
/// multiple of dt (relative tolerance 1e-6). Throws AlignmentError otherwise.
inline int aligned_step_count(double span, double dt, const char* what) {
    if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be positive");
    const double ratio = span / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6 * std::max(1.0, std::abs(rounded))) {
        throw AlignmentError(std::string(what) + " = " + std::to_string(span) +
                             " is not a multiple of dt = " + std::to_string(dt));
    }
    return static_cast<int>(rounded);
}

/// Uniform time grid shared by the history window [-r, 0] and the forward
/// window [0, a]. Both r and a must be integer multiples of dt.
class SimulationGrid {
public:
    SimulationGrid(double delay_r, double horizon_a, double dt)
        : delay_r_(delay_r), horizon_a_(horizon_a), dt_(dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be positive");
        if (!(delay_r > 0.0)) throw std::invalid_argument("grid: delay r must be positive");
        if (!(horizon_a > 0.0)) throw std::invalid_argument("grid: horizon a must be positive");
        n_history_ = aligned_step_count(delay_r, dt, "delay r");
        n_forward_ = aligned_step_count(horizon_a, dt, "horizon a");
        if (n_history_ < 1) throw std::invalid_argument("grid: r/dt must be at least 1");
        if (n_forward_ < 1) throw std::invalid_argument("grid: a/dt must be at least 1");
    }

    double delay() const { return delay_r_; }
    double horizon() const { return horizon_a_; }
    double dt() const { return dt_; }
    int history_steps() const { return n_history_; }
    int forward_steps() const { return n_forward_; }

    double time_at(int step) const { return step * dt_; }

    bool is_aligned(double t) const {
        const double ratio = t / dt_;
        return std::abs(ratio - std::round(ratio)) <= 1e-6 * std::max(1.0, std::abs(ratio));
    }

    /// Grid index of a forward time t in [0, a]; throws if misaligned or out of range.
    int step_index(double t) const {
        const int k = aligned_step_count(t, dt_, "time t");
        if (k < 0 || k > n_forward_)
            throw std::invalid_argument("grid: time " + std::to_string(t) + " outside [0, a]");
        return k;
    }

private:
    double delay_r_;
    double horizon_a_;
    double dt_;
    int n_history_;
    int n_forward_;
};

} // namespace sfde
