#pragma once

#include <cstdint>
#include <span>

#include "sfde/coefficients.hpp"
#include "sfde/control_law.hpp"
#include "sfde/estimate.hpp"
#include "sfde/functional.hpp"
#include "sfde/grid.hpp"
#include "sfde/simulator.hpp"

namespace sfde {

/// Forward difference of f along the exact shift: [f(shift(phi, x, h), x) - f(phi, x)] / h.
double gamma_forward_difference(const SmoothFunctional& f, const ControlledState& state, double h);

/// Shift derivative Gamma f: the analytic form when the functional carries
/// one, otherwise the forward difference at step h (h grid-aligned, 0 < h <= r).
double gamma_apply(const SmoothFunctional& f, const ControlledState& state, double h);

/// The generator evaluated through its differential formula:
///   A^v f = Gamma f + grad_x f . mu(phi,x,v) + 1/2 sum_j sigma_j^T hess_x f sigma_j,
/// with sigma_j the j-th diffusion column.
double generator_apply(const SmoothFunctional& f, const CoefficientSet& coeffs,
                       std::span<const double> control, const ControlledState& state, double h);

/// The generator evaluated through its definition: simulate to time h under
/// the law and return (mean f(S_h, S(h)) - f(phi, x)) / h, std_error scaled by 1/h.
MonteCarloEstimate weak_generator_estimate(const SmoothFunctional& f, const CoefficientSet& coeffs,
                                           const MarkovControlLaw& law, const ControlledState& state,
                                           const SimulationGrid& grid, double h, long n_paths,
                                           std::uint64_t master_seed, int workers = 1);

/// Side-by-side record of the two routes to A^u f at one state.
struct GeneratorReport {
    double analytic = 0.0;
    MonteCarloEstimate monte_carlo;
    double h_used = 0.0;
    double discrepancy = 0.0;
};
GeneratorReport generator_report(const SmoothFunctional& f, const CoefficientSet& coeffs,
                                 const MarkovControlLaw& law, const ControlledState& state,
                                 const SimulationGrid& grid, double h, long n_paths,
                                 std::uint64_t master_seed, int workers = 1);

/// Bounded stopping rule: a fixed horizon, or the first exit from G censored
/// at the grid horizon.
struct StoppingRule {
    enum class Kind { FixedTime, RegionExit };
    Kind kind = Kind::FixedTime;
    double time = 0.0;

    static StoppingRule fixed(double t) { return {Kind::FixedTime, t}; }
    static StoppingRule region_exit() { return {Kind::RegionExit, 0.0}; }
};

/// Both sides of E f(stopped) = f(start) + E int_0^tau A^u f dt, estimated on
/// the same paths. The right side integrates generator_apply left-endpoint
/// along each path, with gamma step h_gamma (default 4 dt when <= 0).
struct DynkinReport {
    MonteCarloEstimate lhs;
    MonteCarloEstimate rhs;
    double gap = 0.0;
};
DynkinReport dynkin_check(const SmoothFunctional& f, const CoefficientSet& coeffs,
                          const MarkovControlLaw& law, const ControlledState& init,
                          const SimulationGrid& grid, const StoppingRule& stopping,
                          long n_paths, std::uint64_t master_seed, int workers = 1,
                          double h_gamma = 0.0);

/// Monte Carlo representation of the Dirichlet-Poisson value
///   w(phi, x) = E[psi(exit)] + E[int_0^tau g dt].
/// A pilot run checks the censored fraction (warn above 1%) and the
/// integrability proxy E int |g| dt.
struct DirichletReport {
    MonteCarloEstimate estimate;
    double censored_fraction = 0.0;
    bool censored_warning = false;
    double pilot_abs_source_integral = 0.0;
    double pilot_censored_fraction = 0.0;
};
DirichletReport dirichlet_poisson_estimate(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                           const ControlledState& init, const SimulationGrid& grid,
                                           const RunningCostFn& g, const TerminalCostFn& psi,
                                           long n_paths, std::uint64_t master_seed, int workers = 1);

/// Companion diagnostic for a candidate solution: max |A^u w + g| over the
/// supplied states (zero for the true solution inside G).
double dirichlet_consistency(const SmoothFunctional& w, const CoefficientSet& coeffs,
                             const MarkovControlLaw& law, const RunningCostFn& g,
                             std::span<const ControlledState> states, double h);

} // namespace sfde
