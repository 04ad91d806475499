#include "sfde/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sfde {

ControlGrid ControlGrid::linspace(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("control grid: count must be >= 1");
    if (!(lo <= hi)) throw std::invalid_argument("control grid: lo > hi");
    ControlGrid grid;
    grid.points.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        grid.points.push_back({lo});
        grid.resolution = 0.0;
        return grid;
    }
    grid.resolution = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i)
        grid.points.push_back({lo + grid.resolution * i});
    return grid;
}

ControlGrid ControlGrid::from_list(std::vector<std::vector<double>> pts, double resolution) {
    if (pts.empty()) throw std::invalid_argument("control grid: empty point list");
    ControlGrid grid;
    grid.points = std::move(pts);
    grid.resolution = resolution;
    return grid;
}

BatchEstimate cost_functional(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                              const ControlledState& init, const SimulationGrid& grid,
                              long n_paths, std::uint64_t master_seed, int workers) {
    if (!coeffs.terminal_cost)
        throw std::invalid_argument("cost functional: terminal cost psi is required");
    const auto payoff = [&coeffs](const PathResult& p) {
        const auto exit_view = p.exit_state.view();
        return p.running_cost_integral + coeffs.terminal_cost(exit_view, p.exit_state.current);
    };
    return monte_carlo_batch(coeffs, law, init, grid, n_paths, master_seed, payoff, workers);
}

HJBReport hjb_residual(const SmoothFunctional& f, const CoefficientSet& coeffs,
                       const ControlGrid& control_grid, const ControlledState& state, double h,
                       Direction direction) {
    if (control_grid.points.empty())
        throw std::invalid_argument("hjb: control grid must be nonempty");

    HJBReport report;
    report.direction = direction;
    report.per_control_values.reserve(control_grid.points.size());
    const auto view = state.view();
    for (std::size_t i = 0; i < control_grid.points.size(); ++i) {
        const auto& v = control_grid.points[i];
        double value = generator_apply(f, coeffs, v, state, h);
        if (coeffs.running_cost) value += coeffs.running_cost(view, state.current, v);
        report.per_control_values.push_back(value);
        const bool better = report.argmin_index < 0 ||
                            (direction == Direction::Minimize ? value < report.residual
                                                              : value > report.residual);
        if (better) {
            report.residual = value;
            report.argmin_index = static_cast<int>(i);
        }
    }
    report.argmin_control = control_grid.points[static_cast<std::size_t>(report.argmin_index)];
    return report;
}

std::vector<double> pointwise_optimal_control(const SmoothFunctional& f, const CoefficientSet& coeffs,
                                              const ControlGrid& control_grid,
                                              const ControlledState& state, double h,
                                              Direction direction) {
    return hjb_residual(f, coeffs, control_grid, state, h, direction).argmin_control;
}

int PolicyRanking::rank_of(const std::string& law_id) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].law_id == law_id) return static_cast<int>(i) + 1;
    return -1;
}

MonteCarloEstimate PolicyRanking::difference(std::size_t a, std::size_t b) const {
    if (a >= payoffs.size() || b >= payoffs.size())
        throw std::out_of_range("policy ranking: law index out of range");
    std::vector<double> diff(payoffs[a].size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = payoffs[a][i] - payoffs[b][i];
    return summarize(diff, rows.empty() ? 0 : rows.front().estimate.master_seed);
}

MonteCarloEstimate PolicyRanking::difference(const std::string& a, const std::string& b) const {
    const auto index_of = [this](const std::string& id) -> std::size_t {
        for (std::size_t i = 0; i < law_order.size(); ++i)
            if (law_order[i] == id) return i;
        throw std::out_of_range("policy ranking: unknown law id " + id);
    };
    return difference(index_of(a), index_of(b));
}

PolicyRanking policy_search(const CoefficientSet& coeffs,
                            std::span<const MarkovControlLaw> family, const ControlledState& init,
                            const SimulationGrid& grid, long n_paths, std::uint64_t master_seed,
                            Direction direction, int workers) {
    if (family.empty()) throw std::invalid_argument("policy search: family must be nonempty");
    if (!coeffs.terminal_cost)
        throw std::invalid_argument("policy search: terminal cost psi is required");

    PolicyRanking ranking;
    ranking.direction = direction;
    ranking.payoffs.reserve(family.size());

    const auto payoff = [&coeffs](const PathResult& p) {
        const auto exit_view = p.exit_state.view();
        return p.running_cost_integral + coeffs.terminal_cost(exit_view, p.exit_state.current);
    };

    // common random numbers: every law sees the same master seed
    for (const auto& law : family) {
        BatchSamples samples =
            monte_carlo_samples(coeffs, law, init, grid, n_paths, master_seed, payoff, workers);
        PolicyRow row;
        row.law_id = law.id();
        row.estimate = summarize(samples.payoffs, master_seed);
        row.censored_fraction =
            static_cast<double>(samples.censored_count) / static_cast<double>(n_paths);
        ranking.rows.push_back(row);
        ranking.law_order.push_back(law.id());
        ranking.payoffs.push_back(std::move(samples.payoffs));
    }

    std::stable_sort(ranking.rows.begin(), ranking.rows.end(),
                     [direction](const PolicyRow& a, const PolicyRow& b) {
                         return direction == Direction::Minimize ? a.estimate.mean < b.estimate.mean
                                                                 : a.estimate.mean > b.estimate.mean;
                     });
    return ranking;
}

AdmissibilityReport admissibility_probe(const MarkovControlLaw& law, long n_samples,
                                        std::uint64_t seed, const SamplingBox& box) {
    if (n_samples < 100) throw std::invalid_argument("admissibility probe: needs >= 100 samples");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> seg_dist(box.value_lo, box.value_hi);
    std::uniform_real_distribution<double> x_dist(box.x_lo, box.x_hi);

    const int points = box.history_steps + 1;
    const int n = box.dim;
    const int m = law.control_dim();

    const auto draw_state = [&]() {
        std::vector<double> values(static_cast<std::size_t>(points) * n);
        for (auto& v : values) v = seg_dist(rng);
        for (int c = 0; c < n; ++c)
            values[values.size() - static_cast<std::size_t>(n) + c] = x_dist(rng);
        return ControlledState::from_segment(SegmentPath(std::move(values), n, box.dt));
    };

    AdmissibilityReport report;
    std::vector<double> ua(static_cast<std::size_t>(m)), ub(static_cast<std::size_t>(m));
    for (long s = 0; s < n_samples; ++s) {
        const ControlledState a = draw_state();
        const ControlledState b = draw_state();
        const auto va = a.view();
        const auto vb = b.view();
        law.evaluate(va, a.current, ua);
        law.evaluate(vb, b.current, ub);

        double du = 0.0, dx = 0.0, dphi = 0.0, mag = 0.0, xa = 0.0;
        for (int c = 0; c < m; ++c) du += (ua[c] - ub[c]) * (ua[c] - ub[c]);
        for (int c = 0; c < n; ++c) dx += (a.current[c] - b.current[c]) * (a.current[c] - b.current[c]);
        for (int i = 0; i < points - 1; ++i)
            for (int c = 0; c < n; ++c) {
                const double d = a.segment.value(i)[c] - b.segment.value(i)[c];
                dphi += d * d;
            }
        dphi *= box.dt;
        for (int c = 0; c < m; ++c) mag += ua[c] * ua[c];
        for (int c = 0; c < n; ++c) xa += a.current[c] * a.current[c];

        const double denom = dx + dphi;
        if (denom > 1e-14)
            report.lipschitz_ratio_max = std::max(report.lipschitz_ratio_max, du / denom);
        report.growth_ratio_max =
            std::max(report.growth_ratio_max, mag / (1.0 + xa + va.norm_sq_sum * box.dt));
    }
    report.non_lipschitz_warning = report.lipschitz_ratio_max > 1e6;
    return report;
}

} // namespace sfde
