#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sfde/segment.hpp"

namespace sfde {

/// Box description of the control set U.
struct ControlBounds {
    std::vector<double> lo;
    std::vector<double> hi;

    static ControlBounds scalar(double lo_, double hi_) { return {{lo_}, {hi_}}; }
    static ControlBounds unit_interval() { return scalar(0.0, 1.0); }

    int dim() const { return static_cast<int>(lo.size()); }
    void clamp(std::span<double> u) const {
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] < lo[i]) u[i] = lo[i];
            if (u[i] > hi[i]) u[i] = hi[i];
        }
    }
    bool contains(std::span<const double> u) const {
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u[i] < lo[i] || u[i] > hi[i]) return false;
        return true;
    }
};

/// Deterministic feedback map u(segment, current) -> U. Evaluation clamps
/// the raw map into the bounds box so outputs always lie in U.
class MarkovControlLaw {
public:
    using EvalFn = std::function<void(const SegmentView&, std::span<const double> x,
                                      std::span<double> u_out)>;

    MarkovControlLaw(std::string id, ControlBounds bounds, EvalFn fn);

    static MarkovControlLaw constant(std::string id, std::vector<double> u, ControlBounds bounds);
    static MarkovControlLaw constant_scalar(double v, ControlBounds bounds = ControlBounds::unit_interval());

    const std::string& id() const { return id_; }
    const ControlBounds& bounds() const { return bounds_; }
    int control_dim() const { return bounds_.dim(); }

    void evaluate(const SegmentView& seg, std::span<const double> x, std::span<double> u_out) const {
        fn_(seg, x, u_out);
        bounds_.clamp(u_out);
    }

    std::vector<double> evaluate(const SegmentView& seg, std::span<const double> x) const {
        std::vector<double> u(static_cast<std::size_t>(control_dim()));
        evaluate(seg, x, u);
        return u;
    }

private:
    std::string id_;
    ControlBounds bounds_;
    EvalFn fn_;
};

} // namespace sfde
