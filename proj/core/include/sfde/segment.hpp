#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "sfde/errors.hpp"
#include "sfde/grid.hpp"

namespace sfde {

/// Sum of squared sample norms over all points except the last one, i.e.
/// the unscaled left-endpoint quadrature of the squared L2 norm on [-r, 0].
double partial_norm_sq(const double* data, int points, int dim);

/// Non-owning window of (points x dim) samples with spacing dt, covering the
/// offsets -r, -r+dt, ..., 0 with r = (points-1)*dt. norm_sq_sum caches
/// partial_norm_sq for the window so the simulator can maintain it by a
/// rolling update instead of an O(points) scan per step.
struct SegmentView {
    const double* data = nullptr;
    int points = 0;
    int dim = 0;
    double dt = 0.0;
    double norm_sq_sum = 0.0;

    std::span<const double> value(int i) const {
        return {data + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> front() const { return value(0); }
    std::span<const double> back() const { return value(points - 1); }
    double delay() const { return (points - 1) * dt; }

    /// Left-endpoint Riemann approximation of the L2([-r,0]) norm.
    double norm() const { return std::sqrt(norm_sq_sum * dt); }
};

/// Discretized history path: samples of phi at offsets -r, -r+dt, ..., 0.
/// Immutable after construction.
class SegmentPath {
public:
    /// Placeholder two-point zero segment (dim 1, dt 1); real segments come
    /// from the named constructors below.
    SegmentPath() : values_{0.0, 0.0}, points_(2), dim_(1), dt_(1.0) {}

    SegmentPath(std::vector<double> values, int dim, double dt);

    static SegmentPath constant(double value, int history_steps, double dt);
    static SegmentPath constant(std::span<const double> value, int history_steps, double dt);
    /// Scalar segment interpolating linearly from value at_minus_r to at_zero.
    static SegmentPath linear(double at_minus_r, double at_zero, int history_steps, double dt);
    /// Scalar segment sampled from fn(offset) at the grid offsets in [-r, 0].
    static SegmentPath sampled(const std::function<double(double)>& fn, int history_steps, double dt);

    int points() const { return points_; }
    int history_steps() const { return points_ - 1; }
    int dim() const { return dim_; }
    double dt() const { return dt_; }
    double delay() const { return (points_ - 1) * dt_; }

    std::span<const double> value(int i) const {
        return {values_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<const double> at_zero() const { return value(points_ - 1); }
    std::span<const double> raw() const { return values_; }

    SegmentView view() const {
        return SegmentView{values_.data(), points_, dim_, dt_,
                           partial_norm_sq(values_.data(), points_, dim_)};
    }

private:
    std::vector<double> values_; // points x dim, oldest sample first
    int points_;
    int dim_;
    double dt_;
};

/// sqrt( sum_{i < n_history} |phi_i|^2 * dt ), the left-endpoint quadrature
/// of the L2([-r,0]) norm.
double segment_norm(const SegmentPath& seg);
double segment_norm(const SegmentView& seg);

/// Segment of a sampled trajectory ending at time t: value at offset p equals
/// the trajectory at t+p. The trajectory starts at traj_start_time and has
/// one sample per dt. history_steps sets the segment length r/dt.
SegmentPath segment_extract(std::span<const double> trajectory, int dim, double dt,
                            double traj_start_time, int history_steps, double t);

/// The shifted history: value at offset s is x for s >= -t and seg(s+t)
/// for s < -t. t > r clamps to the all-x segment; t < 0 is an error.
SegmentPath segment_shift(const SegmentPath& seg, std::span<const double> x, double t);
SegmentPath segment_shift(const SegmentPath& seg, double x, double t);

} // namespace sfde
