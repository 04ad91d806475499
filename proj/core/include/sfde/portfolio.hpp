#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfde/optimizer.hpp"

namespace sfde {

/// Market and utility parameters of the delayed portfolio problem:
/// risky drift mu, risk-free rate k (k <= mu), volatility sigma > 0,
/// utility exponent p in (0, 1), plus the simulation grid.
struct PortfolioParams {
    double mu = 0.06;
    double k = 0.04;
    double sigma = 0.4;
    double p = 0.5;
    double delay_r = 0.5;
    double horizon_a = 1.0;
    double dt = 1e-3;

    SimulationGrid grid() const { return SimulationGrid(delay_r, horizon_a, dt); }
    void validate() const;
};

/// Wealth dynamics with history feedback:
///   drift     (phi, x, u) -> (mu u + k (1 - u)) x / (1 + ||phi||)
///   diffusion (phi, x, u) -> sigma u x / (1 + ||phi||)
/// The fraction u is clamped to [0, 1] inside the coefficients (no borrowing,
/// no shortselling). L = 0, psi(phi, x) = x^p. Region defaults to the whole
/// space: experiments run the fixed-horizon surrogate.
CoefficientSet portfolio_coefficients(const PortfolioParams& params);
CoefficientSet portfolio_coefficients(const PortfolioParams& params, RegionFn region);

/// The closed-form optimal fraction (mu - k)(1 + ||phi||) / (sigma^2 (1 - p)),
/// clamped to [0, 1]. interior reports whether the unclamped value already
/// satisfied the constraint.
struct OptimalFraction {
    double fraction = 0.0;
    double unclamped = 0.0;
    bool interior = false;
};
OptimalFraction optimal_fraction(const PortfolioParams& params, const ControlledState& state);

/// Feedback law evaluating the clamped closed form along the path. Id "closed_form".
MarkovControlLaw optimal_fraction_law(const PortfolioParams& params);

/// The candidate value functional f(phi, x) = ||phi||^2 x^p, with the
/// analytic shift derivative x^p (x^2 - phi(-r)^2).
SmoothFunctional candidate_functional(double p);

/// Left side of the substituted boundary identity
///   p (mu-k)^2 ||phi||^2 / (2 sigma^2 (1-p)) + k p ||phi||^2 / (1+||phi||)
///   + x^2 - phi(-r)^2,
/// with the convention x = phi(0).
double boundary_identity_residual(const PortfolioParams& params, const ControlledState& state);

/// m(v) over a control grid at one state, the grid argmax, the boundary
/// identity residual there, and the observed gap between the forward
/// difference and analytic shift terms.
struct CandidateValueReport {
    std::vector<double> controls;
    std::vector<double> m_values;
    double argmax_control = 0.0;
    int argmax_index = -1;
    double boundary_residual = 0.0;
    double gamma_fd_error = 0.0;
};
CandidateValueReport candidate_value_check(const PortfolioParams& params, const ControlledState& state,
                                           const ControlGrid& control_grid, double h);

/// Solves the boundary identity for the segment's oldest sample: keeps every
/// other sample of base_shape and bisects on phi(-r) until the residual
/// crosses zero. The returned state satisfies the identity to ~1e-12.
ControlledState make_boundary_state(const PortfolioParams& params, const SegmentPath& base_shape);

/// Fixed-horizon policy experiment: ranks constant fractions and the closed
/// form law by E[S(T)^p] under common random numbers, and reports the m(v)
/// curve at the initial state.
struct PortfolioReport {
    PolicyRanking ranking;
    int closed_form_rank = -1;            // 1-based
    OptimalFraction initial_fraction;
    CandidateValueReport initial_curve;
    double closed_form_clamped_fraction = 0.0; // share of clamped steps, pilot paths
};
PortfolioReport portfolio_experiment(const PortfolioParams& params, const ControlledState& init,
                                     const SimulationGrid& grid, long n_paths,
                                     std::uint64_t master_seed,
                                     std::span<const double> constant_fractions,
                                     const ControlGrid& mcurve_grid, double h, int workers = 1);

} // namespace sfde
