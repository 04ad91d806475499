#include "sfde/control_law.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace sfde {

MarkovControlLaw::MarkovControlLaw(std::string id, ControlBounds bounds, EvalFn fn)
    : id_(std::move(id)), bounds_(std::move(bounds)), fn_(std::move(fn)) {
    if (bounds_.lo.size() != bounds_.hi.size() || bounds_.lo.empty())
        throw std::invalid_argument("control law: malformed bounds box");
    for (std::size_t i = 0; i < bounds_.lo.size(); ++i)
        if (!(bounds_.lo[i] <= bounds_.hi[i]))
            throw std::invalid_argument("control law: bounds lo > hi");
    if (!fn_) throw std::invalid_argument("control law: missing evaluation function");
}

MarkovControlLaw MarkovControlLaw::constant(std::string id, std::vector<double> u, ControlBounds bounds) {
    auto value = std::make_shared<std::vector<double>>(std::move(u));
    return MarkovControlLaw(std::move(id), std::move(bounds),
                            [value](const SegmentView&, std::span<const double>, std::span<double> out) {
                                std::copy(value->begin(), value->end(), out.begin());
                            });
}

MarkovControlLaw MarkovControlLaw::constant_scalar(double v, ControlBounds bounds) {
    char id[32];
    std::snprintf(id, sizeof(id), "const_%g", v);
    return constant(id, {v}, std::move(bounds));
}

} // namespace sfde
