#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sfde/segment.hpp"

namespace sfde {

/// The pair (segment, current vector): the Markov state of the delay system.
/// By the continuity convention, states built via from_segment have
/// current equal to the segment value at offset 0.
struct ControlledState {
    SegmentPath segment;
    std::vector<double> current;

    static ControlledState from_segment(SegmentPath seg) {
        std::vector<double> x(seg.at_zero().begin(), seg.at_zero().end());
        return ControlledState{std::move(seg), std::move(x)};
    }

    int dim() const { return segment.dim(); }
    SegmentView view() const { return segment.view(); }

    void validate() const {
        if (static_cast<int>(current.size()) != segment.dim())
            throw ShapeError("state: current dimension does not match segment");
        for (double v : current)
            if (!std::isfinite(v)) throw std::invalid_argument("state: non-finite current value");
    }
};

} // namespace sfde
