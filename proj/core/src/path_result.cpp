#include "sfde/path_result.hpp"

namespace sfde {

SegmentPath PathResult::segment_at(double t) const {
    return segment_extract(trajectory, dim, dt, start_time - history_steps * dt,
                           history_steps, t);
}

ControlledState PathResult::state_at(double t) const {
    return ControlledState::from_segment(segment_at(t));
}

std::pair<double, ControlledState> exit_time(const PathResult& result) {
    return {result.exit_time, result.exit_state};
}

PathWalker::PathWalker(const PathResult& result) : result_(&result) {
    norm_sq_sum_ = partial_norm_sq(result.trajectory.data(), result.history_steps + 1, result.dim);
}

void PathWalker::advance() {
    const int n = result_->dim;
    const double* entering = result_->trajectory.data() +
                             static_cast<std::size_t>(step_ + result_->history_steps) * n;
    const double* leaving = result_->trajectory.data() + static_cast<std::size_t>(step_) * n;
    for (int c = 0; c < n; ++c) norm_sq_sum_ += entering[c] * entering[c];
    for (int c = 0; c < n; ++c) norm_sq_sum_ -= leaving[c] * leaving[c];
    ++step_;
}

SegmentView PathWalker::view() const {
    const int n = result_->dim;
    return SegmentView{result_->trajectory.data() + static_cast<std::size_t>(step_) * n,
                       result_->history_steps + 1, n, result_->dt, norm_sq_sum_};
}

std::span<const double> PathWalker::current() const {
    return result_->state_at_index(step_ + result_->history_steps);
}

std::span<const double> PathWalker::control() const {
    return {result_->control_trace.data() + static_cast<std::size_t>(step_) * result_->control_dim,
            static_cast<std::size_t>(result_->control_dim)};
}

} // namespace sfde
