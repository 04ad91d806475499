#include "sfde/functional.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "sfde/generator.hpp"

namespace sfde {

SmoothFunctional power_functional(double power) {
    SmoothFunctional f;
    f.value = [power](const SegmentView&, std::span<const double> x) {
        return std::pow(x[0], power);
    };
    f.grad_x = [power](const SegmentView&, std::span<const double> x, std::span<double> grad) {
        grad[0] = power * std::pow(x[0], power - 1.0);
    };
    f.hess_x = [power](const SegmentView&, std::span<const double> x, std::span<double> hess) {
        hess[0] = power * (power - 1.0) * std::pow(x[0], power - 2.0);
    };
    // independent of the segment: the shift is invisible
    f.gamma_analytic = [](const SegmentView&, std::span<const double>) { return 0.0; };
    return f;
}

SmoothFunctional linear_functional(std::vector<double> coefficients) {
    if (coefficients.empty()) throw std::invalid_argument("linear functional: empty coefficients");
    const auto c = std::make_shared<std::vector<double>>(std::move(coefficients));
    SmoothFunctional f;
    f.value = [c](const SegmentView&, std::span<const double> x) {
        double v = 0.0;
        for (std::size_t i = 0; i < c->size(); ++i) v += (*c)[i] * x[i];
        return v;
    };
    f.grad_x = [c](const SegmentView&, std::span<const double>, std::span<double> grad) {
        std::copy(c->begin(), c->end(), grad.begin());
    };
    f.hess_x = [c](const SegmentView&, std::span<const double>, std::span<double> hess) {
        std::fill(hess.begin(), hess.end(), 0.0);
    };
    f.gamma_analytic = [](const SegmentView&, std::span<const double>) { return 0.0; };
    return f;
}

SmoothFunctional constant_functional(double value) {
    SmoothFunctional f;
    f.value = [value](const SegmentView&, std::span<const double>) { return value; };
    f.grad_x = [](const SegmentView&, std::span<const double>, std::span<double> grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
    };
    f.hess_x = [](const SegmentView&, std::span<const double>, std::span<double> hess) {
        std::fill(hess.begin(), hess.end(), 0.0);
    };
    f.gamma_analytic = [](const SegmentView&, std::span<const double>) { return 0.0; };
    return f;
}

double hessian_asymmetry(const SmoothFunctional& f, const ControlledState& state) {
    const int n = state.dim();
    std::vector<double> hess(static_cast<std::size_t>(n) * n);
    const auto view = state.view();
    f.hess_x(view, state.current, hess);
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            worst = std::max(worst, std::abs(hess[static_cast<std::size_t>(a) * n + b] -
                                             hess[static_cast<std::size_t>(b) * n + a]));
    return worst;
}

double gradient_fd_error(const SmoothFunctional& f, const ControlledState& state, double fd_step) {
    const int n = state.dim();
    const auto view = state.view();
    std::vector<double> grad(static_cast<std::size_t>(n));
    f.grad_x(view, state.current, grad);

    std::vector<double> bumped(state.current.begin(), state.current.end());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        bumped[static_cast<std::size_t>(i)] = state.current[static_cast<std::size_t>(i)] + fd_step;
        const double up = f.value(view, bumped);
        bumped[static_cast<std::size_t>(i)] = state.current[static_cast<std::size_t>(i)] - fd_step;
        const double down = f.value(view, bumped);
        bumped[static_cast<std::size_t>(i)] = state.current[static_cast<std::size_t>(i)];
        const double fd = (up - down) / (2.0 * fd_step);
        const double scale = std::max(1.0, std::abs(grad[static_cast<std::size_t>(i)]));
        worst = std::max(worst, std::abs(fd - grad[static_cast<std::size_t>(i)]) / scale);
    }
    return worst;
}

GammaProbe gamma_convergence_probe(const SmoothFunctional& f, const ControlledState& state, double h) {
    GammaProbe probe;
    probe.fd_h = gamma_forward_difference(f, state, h);
    probe.fd_half = gamma_forward_difference(f, state, h / 2.0);
    probe.fd_quarter = gamma_forward_difference(f, state, h / 4.0);
    const double gap_coarse = std::abs(probe.fd_h - probe.fd_half);
    const double gap_fine = std::abs(probe.fd_half - probe.fd_quarter);
    probe.converged = gap_fine <= gap_coarse + 1e-12;
    return probe;
}

} // namespace sfde
