#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sfde/state.hpp"

namespace sfde {

/// A functional f(segment, x) with its x-derivatives, the inputs to the
/// generator formula. gamma_analytic, when set, is a closed form for the
/// shift derivative and is preferred over the forward difference.
struct SmoothFunctional {
    std::function<double(const SegmentView&, std::span<const double> x)> value;
    std::function<void(const SegmentView&, std::span<const double> x, std::span<double> grad)> grad_x;
    /// n x n Hessian, row-major.
    std::function<void(const SegmentView&, std::span<const double> x, std::span<double> hess)> hess_x;
    std::function<double(const SegmentView&, std::span<const double> x)> gamma_analytic;

    bool has_gamma_analytic() const { return static_cast<bool>(gamma_analytic); }
};

/// f = x^p for scalar states (p = 2 gives the quadratic test functional).
SmoothFunctional power_functional(double power);

/// f = c . x (scalar or vector state).
SmoothFunctional linear_functional(std::vector<double> coefficients);

/// f constant, all derivatives zero.
SmoothFunctional constant_functional(double value);

/// Largest |H_ij - H_ji| of the supplied Hessian at the given state.
double hessian_asymmetry(const SmoothFunctional& f, const ControlledState& state);

/// Largest deviation between the supplied gradient and a central finite
/// difference of value in x, relative to max(1, |grad|).
double gradient_fd_error(const SmoothFunctional& f, const ControlledState& state, double fd_step);

/// Empirical convergence probe for the shift derivative: forward differences
/// at h, h/2 and h/4. Converged when the dyadic gaps shrink.
struct GammaProbe {
    double fd_h = 0.0;
    double fd_half = 0.0;
    double fd_quarter = 0.0;
    bool converged = false;
};
GammaProbe gamma_convergence_probe(const SmoothFunctional& f, const ControlledState& state, double h);

} // namespace sfde
