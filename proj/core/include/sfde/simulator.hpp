#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sfde/coefficients.hpp"
#include "sfde/control_law.hpp"
#include "sfde/errors.hpp"
#include "sfde/estimate.hpp"
#include "sfde/grid.hpp"
#include "sfde/noise.hpp"
#include "sfde/path_result.hpp"

namespace sfde {

/// Any state component beyond this magnitude aborts the path with BlowUpError.
inline constexpr double kBlowUpThreshold = 1e12;

/// Euler-Maruyama integration of the controlled delay equation from
/// (init, start_time) to the first grid time outside G, censored at the
/// horizon. Noise increments are indexed by absolute step number, so a
/// restart at t1 replays exactly the increments from step t1/dt onward.
PathResult simulate_path(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                         const ControlledState& init, const SimulationGrid& grid,
                         const NoiseStream& stream, double start_time = 0.0);

using PayoffFn = std::function<double(const PathResult&)>;

/// Low-level batch driver: simulates paths 0..n_paths-1 (path i seeded with
/// NoiseStream(master_seed, i)) and invokes the visitor once per path. The
/// visitor may run concurrently on different paths and must only write to
/// per-path slots; the PathResult buffer is reused between calls.
using PathVisitor = std::function<void(long path_index, const PathResult&)>;
void for_each_path(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                   const ControlledState& init, const SimulationGrid& grid, long n_paths,
                   std::uint64_t master_seed, const PathVisitor& visit, int workers = 1);

/// Seeded batch estimator of E[payoff]. Path i uses NoiseStream(master_seed, i);
/// payoffs are reduced in path order, so the result is bitwise independent of
/// the worker count. Requires n_paths >= 2.
BatchEstimate monte_carlo_batch(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                const ControlledState& init, const SimulationGrid& grid,
                                long n_paths, std::uint64_t master_seed,
                                const PayoffFn& payoff, int workers = 1);

/// Same batch driver, but hands back the raw per-path payoffs (path order).
struct BatchSamples {
    std::vector<double> payoffs;
    long censored_count = 0;
};
BatchSamples monte_carlo_samples(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                 const ControlledState& init, const SimulationGrid& grid,
                                 long n_paths, std::uint64_t master_seed,
                                 const PayoffFn& payoff, int workers = 1);

/// Pathwise Markov/restart identity: simulate once on [0, a], restart from
/// the extracted state at t1 with the same noise stream, and return the
/// largest state deviation on [t1, a]. Zero up to round-off by contract.
double flow_property_check(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                           const ControlledState& init, const SimulationGrid& grid,
                           double t1, const NoiseStream& stream);

/// Second-moment curve t -> E[ ||S_t||^2 + |S(t)|^2 ] and the least-squares
/// exponent beta fitting E|S(t)-S(s)|^2 ~ |t-s|^beta over small lags.
/// Computed along the unstopped dynamics (region ignored); diagnostic only.
struct MomentDiagnostics {
    std::vector<double> times;
    std::vector<double> second_moments;
    double increment_exponent = 0.0;
    bool degenerate = false;   // zero increments, no exponent to fit
    double sup_moment = 0.0;
};
MomentDiagnostics moment_diagnostics(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                     const ControlledState& init, const SimulationGrid& grid,
                                     long n_paths, std::uint64_t master_seed, int workers = 1);

using StatePredicate = std::function<bool(const SegmentView&, std::span<const double> x)>;

/// Empirical transition probability P[(S_t, S(t)) in event] with binomial
/// standard error, along the unstopped dynamics.
MonteCarloEstimate transition_probability_estimate(const CoefficientSet& coeffs,
                                                   const MarkovControlLaw& law,
                                                   const ControlledState& init,
                                                   const SimulationGrid& grid, double t,
                                                   const StatePredicate& event, long n_paths,
                                                   std::uint64_t master_seed, int workers = 1);

} // namespace sfde
