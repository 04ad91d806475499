#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfde/generator.hpp"

namespace sfde {

/// Finite set of control points covering U, with the coarsest spacing kept
/// for argmin stability statements.
struct ControlGrid {
    std::vector<std::vector<double>> points;
    double resolution = 0.0;

    static ControlGrid linspace(double lo, double hi, int count);
    static ControlGrid from_list(std::vector<std::vector<double>> pts, double resolution);

    std::size_t size() const { return points.size(); }
};

enum class Direction { Minimize, Maximize };

/// Pointwise dynamic-programming record at one state: A^v f + L^v over the
/// control grid, its best value (the residual) and where it is attained.
struct HJBReport {
    std::vector<double> per_control_values;
    double residual = 0.0;
    std::vector<double> argmin_control;
    int argmin_index = -1;
    Direction direction = Direction::Minimize;
};

/// J(phi, x, u) = E[ int_0^tau L dt + psi(exit) ], censored paths contribute
/// the running cost up to the horizon plus psi at the censor state.
BatchEstimate cost_functional(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                              const ControlledState& init, const SimulationGrid& grid,
                              long n_paths, std::uint64_t master_seed, int workers = 1);

/// Evaluates A^v f + L(phi, x, v) for every v in the grid and returns the
/// extremal value and its argmin (argmax under Direction::Maximize).
HJBReport hjb_residual(const SmoothFunctional& f, const CoefficientSet& coeffs,
                       const ControlGrid& control_grid, const ControlledState& state, double h,
                       Direction direction = Direction::Minimize);

std::vector<double> pointwise_optimal_control(const SmoothFunctional& f, const CoefficientSet& coeffs,
                                              const ControlGrid& control_grid,
                                              const ControlledState& state, double h,
                                              Direction direction = Direction::Minimize);

struct PolicyRow {
    std::string law_id;
    MonteCarloEstimate estimate;
    double censored_fraction = 0.0;
};

/// Cost of every law in a family under common random numbers, sorted
/// best-first. Per-path payoffs are retained so paired comparisons between
/// laws can use the variance-reduced difference estimator.
struct PolicyRanking {
    std::vector<PolicyRow> rows;                  // sorted best-first
    std::vector<std::string> law_order;           // family order, index into payoffs
    std::vector<std::vector<double>> payoffs;     // [family index][path]
    Direction direction = Direction::Minimize;

    int rank_of(const std::string& law_id) const; // 1-based; -1 if absent
    /// Paired CRN estimate of payoff(a) - payoff(b), by family index.
    MonteCarloEstimate difference(std::size_t a, std::size_t b) const;
    MonteCarloEstimate difference(const std::string& a, const std::string& b) const;
};

PolicyRanking policy_search(const CoefficientSet& coeffs,
                            std::span<const MarkovControlLaw> family, const ControlledState& init,
                            const SimulationGrid& grid, long n_paths, std::uint64_t master_seed,
                            Direction direction = Direction::Minimize, int workers = 1);

/// Empirical lower bounds for the admissibility constants: the largest
/// observed ratios |u(phi,x)-u(eta,y)|^2 / (|x-y|^2 + ||phi-eta||^2) and
/// |u(phi,x)|^2 / (1 + |x|^2 + ||phi||^2) over sampled state pairs.
struct AdmissibilityReport {
    double lipschitz_ratio_max = 0.0;
    double growth_ratio_max = 0.0;
    bool non_lipschitz_warning = false; // ratio above 1e6
};

/// Sampling box for the probe: segment samples uniform in [value_lo, value_hi],
/// current uniform in [x_lo, x_hi].
struct SamplingBox {
    double value_lo = -1.0;
    double value_hi = 1.0;
    double x_lo = -1.0;
    double x_hi = 1.0;
    int history_steps = 8;
    int dim = 1;
    double dt = 0.125;
};

AdmissibilityReport admissibility_probe(const MarkovControlLaw& law, long n_samples,
                                        std::uint64_t seed, const SamplingBox& box);

} // namespace sfde
