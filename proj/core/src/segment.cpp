#include "sfde/segment.hpp"

#include <algorithm>
#include <stdexcept>

namespace sfde {

double partial_norm_sq(const double* data, int points, int dim) {
    double sum = 0.0;
    const std::size_t count = static_cast<std::size_t>(points - 1) * dim;
    for (std::size_t i = 0; i < count; ++i) sum += data[i] * data[i];
    return sum;
}

SegmentPath::SegmentPath(std::vector<double> values, int dim, double dt)
    : values_(std::move(values)), dim_(dim), dt_(dt) {
    if (dim_ < 1) throw std::invalid_argument("segment: dim must be >= 1");
    if (!(dt_ > 0.0)) throw std::invalid_argument("segment: dt must be positive");
    if (values_.empty() || values_.size() % dim_ != 0)
        throw std::invalid_argument("segment: values size must be a nonzero multiple of dim");
    points_ = static_cast<int>(values_.size() / dim_);
    if (points_ < 2) throw std::invalid_argument("segment: needs at least 2 sample points");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("segment: non-finite sample");
}

SegmentPath SegmentPath::constant(double value, int history_steps, double dt) {
    return constant(std::span<const double>(&value, 1), history_steps, dt);
}

SegmentPath SegmentPath::constant(std::span<const double> value, int history_steps, double dt) {
    const int dim = static_cast<int>(value.size());
    std::vector<double> values(static_cast<std::size_t>(history_steps + 1) * dim);
    for (int i = 0; i <= history_steps; ++i)
        std::copy(value.begin(), value.end(), values.begin() + static_cast<std::size_t>(i) * dim);
    return SegmentPath(std::move(values), dim, dt);
}

SegmentPath SegmentPath::linear(double at_minus_r, double at_zero, int history_steps, double dt) {
    std::vector<double> values(static_cast<std::size_t>(history_steps) + 1);
    for (int i = 0; i <= history_steps; ++i) {
        const double w = static_cast<double>(i) / history_steps;
        values[static_cast<std::size_t>(i)] = at_minus_r + w * (at_zero - at_minus_r);
    }
    return SegmentPath(std::move(values), 1, dt);
}

SegmentPath SegmentPath::sampled(const std::function<double(double)>& fn, int history_steps, double dt) {
    std::vector<double> values(static_cast<std::size_t>(history_steps) + 1);
    for (int i = 0; i <= history_steps; ++i)
        values[static_cast<std::size_t>(i)] = fn((i - history_steps) * dt);
    return SegmentPath(std::move(values), 1, dt);
}

double segment_norm(const SegmentPath& seg) {
    return std::sqrt(partial_norm_sq(seg.raw().data(), seg.points(), seg.dim()) * seg.dt());
}

double segment_norm(const SegmentView& seg) {
    return std::sqrt(partial_norm_sq(seg.data, seg.points, seg.dim) * seg.dt);
}

SegmentPath segment_extract(std::span<const double> trajectory, int dim, double dt,
                            double traj_start_time, int history_steps, double t) {
    if (dim < 1) throw std::invalid_argument("segment_extract: dim must be >= 1");
    if (trajectory.size() % dim != 0)
        throw std::invalid_argument("segment_extract: trajectory size not a multiple of dim");
    const int traj_points = static_cast<int>(trajectory.size() / dim);
    const int offset = aligned_step_count(t - traj_start_time, dt, "t - trajectory start");
    const int first = offset - history_steps;
    if (first < 0 || offset >= traj_points)
        throw std::invalid_argument("segment_extract: trajectory does not cover [t-r, t]");
    std::vector<double> values(trajectory.begin() + static_cast<std::size_t>(first) * dim,
                               trajectory.begin() + static_cast<std::size_t>(offset + 1) * dim);
    return SegmentPath(std::move(values), dim, dt);
}

SegmentPath segment_shift(const SegmentPath& seg, std::span<const double> x, double t) {
    if (t < 0.0) throw std::invalid_argument("segment_shift: t must be nonnegative");
    if (static_cast<int>(x.size()) != seg.dim())
        throw ShapeError("segment_shift: x dimension mismatch");
    const int points = seg.points();
    const int dim = seg.dim();
    // t >= r freezes the whole history at x, no alignment required
    const int k = t >= seg.delay() ? points - 1
                                   : aligned_step_count(t, seg.dt(), "shift time t");
    std::vector<double> values(static_cast<std::size_t>(points) * dim);
    // offsets s < -t copy seg(s + t); offsets s >= -t take the frozen value x
    const int copied = points - 1 - k;
    std::copy(seg.raw().begin() + static_cast<std::size_t>(k) * dim,
              seg.raw().begin() + static_cast<std::size_t>(k + copied) * dim, values.begin());
    for (int i = copied; i < points; ++i)
        std::copy(x.begin(), x.end(), values.begin() + static_cast<std::size_t>(i) * dim);
    return SegmentPath(std::move(values), dim, seg.dt());
}

SegmentPath segment_shift(const SegmentPath& seg, double x, double t) {
    return segment_shift(seg, std::span<const double>(&x, 1), t);
}

} // namespace sfde
