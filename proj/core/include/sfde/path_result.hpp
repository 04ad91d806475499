#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sfde/state.hpp"

namespace sfde {

/// One simulated path. The trajectory holds the state at the grid times
/// start_time - r, ..., min(tau_G, a); exit_time is the first grid time at
/// which the region predicate failed, or the horizon with censored = true.
struct PathResult {
    int dim = 1;
    int control_dim = 1;
    double dt = 0.0;
    double start_time = 0.0;
    int history_steps = 0;                // r/dt
    std::vector<double> trajectory;       // (history_steps + 1 + steps) x dim
    std::vector<double> control_trace;    // steps x control_dim
    double exit_time = 0.0;
    bool censored = false;
    double running_cost_integral = 0.0;
    ControlledState exit_state;

    int steps_taken() const {
        return static_cast<int>(trajectory.size()) / dim - history_steps - 1;
    }
    double final_time() const { return start_time + steps_taken() * dt; }

    std::span<const double> state_at_index(int i) const {
        return {trajectory.data() + static_cast<std::size_t>(i) * dim,
                static_cast<std::size_t>(dim)};
    }
    double time_of_index(int i) const { return start_time + (i - history_steps) * dt; }

    /// Segment S_t extracted from the stored trajectory (t grid-aligned,
    /// start_time <= t <= final time).
    SegmentPath segment_at(double t) const;
    ControlledState state_at(double t) const;
};

/// First exit information: (tau_G, state there); for censored paths the
/// horizon and the final state, with the censored flag preserved in result.
std::pair<double, ControlledState> exit_time(const PathResult& result);

/// Replays the stored trajectory step by step, rebuilding the segment view
/// (with its rolling norm accumulator) and the control used at each step.
/// Visits exactly the steps the integrator took, in order.
class PathWalker {
public:
    explicit PathWalker(const PathResult& result);

    bool done() const { return step_ >= result_->steps_taken(); }
    void advance();

    double time() const { return result_->start_time + step_ * result_->dt; }
    SegmentView view() const;
    std::span<const double> current() const;
    std::span<const double> control() const;

private:
    const PathResult* result_;
    int step_ = 0;
    double norm_sq_sum_ = 0.0;
};

} // namespace sfde
