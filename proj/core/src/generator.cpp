#include "sfde/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfde {

namespace {

struct GeneratorScratch {
    std::vector<double> grad, hess, mu, sigma, shift_buf;
};

// grad_x f . mu + 1/2 sum_j sigma_j^T hess_x f sigma_j at one state view,
// plus the supplied shift term.
double generator_formula(const SmoothFunctional& f, const CoefficientSet& coeffs,
                         std::span<const double> control, const SegmentView& view,
                         std::span<const double> x, double gamma_term, GeneratorScratch& ws) {
    const int n = coeffs.state_dim;
    const int d = coeffs.noise_dim;
    ws.grad.resize(static_cast<std::size_t>(n));
    ws.hess.resize(static_cast<std::size_t>(n) * n);
    ws.mu.resize(static_cast<std::size_t>(n));
    ws.sigma.resize(static_cast<std::size_t>(n) * d);

    f.grad_x(view, x, ws.grad);
    f.hess_x(view, x, ws.hess);
    coeffs.drift(view, x, control, ws.mu);
    coeffs.diffusion(view, x, control, ws.sigma);

    double first_order = 0.0;
    for (int i = 0; i < n; ++i)
        first_order += ws.grad[static_cast<std::size_t>(i)] * ws.mu[static_cast<std::size_t>(i)];

    double second_order = 0.0;
    for (int j = 0; j < d; ++j) {
        const double* col = ws.sigma.data() + static_cast<std::size_t>(j) * n;
        for (int a = 0; a < n; ++a) {
            double hrow = 0.0;
            for (int b = 0; b < n; ++b)
                hrow += ws.hess[static_cast<std::size_t>(a) * n + b] * col[b];
            second_order += col[a] * hrow;
        }
    }
    return gamma_term + first_order + 0.5 * second_order;
}

// Forward difference of f along the shift, working directly on a view.
double gamma_fd_view(const SmoothFunctional& f, const SegmentView& view,
                     std::span<const double> x, double h, std::vector<double>& buf) {
    if (!(h > 0.0)) throw std::invalid_argument("gamma: h must be positive");
    if (h > view.delay() + 1e-12)
        throw std::invalid_argument("gamma: h must not exceed the delay r");
    const int k = aligned_step_count(h, view.dt, "gamma step h");
    const int points = view.points;
    const int n = view.dim;
    buf.resize(static_cast<std::size_t>(points) * n);
    const int copied = points - 1 - k;
    std::copy(view.data + static_cast<std::size_t>(k) * n,
              view.data + static_cast<std::size_t>(k + copied) * n, buf.begin());
    for (int i = copied; i < points; ++i)
        std::copy(x.begin(), x.end(), buf.begin() + static_cast<std::size_t>(i) * n);
    const SegmentView after{buf.data(), points, n, view.dt,
                            partial_norm_sq(buf.data(), points, n)};
    return (f.value(after, x) - f.value(view, x)) / h;
}

void check_functional(const SmoothFunctional& f) {
    if (!f.value || !f.grad_x || !f.hess_x)
        throw std::invalid_argument("generator: functional needs value, grad_x and hess_x");
}

} // namespace

double gamma_forward_difference(const SmoothFunctional& f, const ControlledState& state, double h) {
    std::vector<double> buf;
    const SegmentView view = state.view();
    return gamma_fd_view(f, view, state.current, h, buf);
}

double gamma_apply(const SmoothFunctional& f, const ControlledState& state, double h) {
    if (f.has_gamma_analytic()) return f.gamma_analytic(state.view(), state.current);
    return gamma_forward_difference(f, state, h);
}

double generator_apply(const SmoothFunctional& f, const CoefficientSet& coeffs,
                       std::span<const double> control, const ControlledState& state, double h) {
    check_functional(f);
    coeffs.validate();
    if (state.dim() != coeffs.state_dim)
        throw ShapeError("generator: state dimension does not match coefficients");
    if (static_cast<int>(control.size()) != coeffs.control_dim)
        throw ShapeError("generator: control dimension does not match coefficients");
    GeneratorScratch ws;
    const SegmentView view = state.view();
    const double gamma_term = f.has_gamma_analytic()
                                  ? f.gamma_analytic(view, state.current)
                                  : gamma_fd_view(f, view, state.current, h, ws.shift_buf);
    return generator_formula(f, coeffs, control, view, state.current, gamma_term, ws);
}

MonteCarloEstimate weak_generator_estimate(const SmoothFunctional& f, const CoefficientSet& coeffs,
                                           const MarkovControlLaw& law, const ControlledState& state,
                                           const SimulationGrid& grid, double h, long n_paths,
                                           std::uint64_t master_seed, int workers) {
    check_functional(f);
    if (!grid.is_aligned(h) || !(h > 0.0))
        throw AlignmentError("weak generator: h must be a positive grid multiple");
    const double f0 = f.value(state.view(), state.current);

    const SimulationGrid sub(grid.delay(), h, grid.dt());
    const CoefficientSet unstopped = coeffs.with_region(whole_space());
    const BatchSamples samples = monte_carlo_samples(
        unstopped, law, state, sub, n_paths, master_seed,
        [&](const PathResult& p) {
            PathWalker walker(p);
            while (!walker.done()) walker.advance();
            return f.value(walker.view(), walker.current());
        },
        workers);

    MonteCarloEstimate est = summarize(samples.payoffs, master_seed);
    est.mean = (est.mean - f0) / h;
    est.std_error /= h;
    return est;
}

GeneratorReport generator_report(const SmoothFunctional& f, const CoefficientSet& coeffs,
                                 const MarkovControlLaw& law, const ControlledState& state,
                                 const SimulationGrid& grid, double h, long n_paths,
                                 std::uint64_t master_seed, int workers) {
    GeneratorReport report;
    report.h_used = h;
    const auto view = state.view();
    const std::vector<double> control = law.evaluate(view, state.current);
    report.analytic = generator_apply(f, coeffs, control, state, h);
    report.monte_carlo =
        weak_generator_estimate(f, coeffs, law, state, grid, h, n_paths, master_seed, workers);
    report.discrepancy = std::abs(report.analytic - report.monte_carlo.mean);
    return report;
}

DynkinReport dynkin_check(const SmoothFunctional& f, const CoefficientSet& coeffs,
                          const MarkovControlLaw& law, const ControlledState& init,
                          const SimulationGrid& grid, const StoppingRule& stopping,
                          long n_paths, std::uint64_t master_seed, int workers, double h_gamma) {
    check_functional(f);
    if (n_paths < 2) throw std::invalid_argument("dynkin: n_paths must be >= 2");
    const double h = h_gamma > 0.0 ? h_gamma : 4.0 * grid.dt();

    CoefficientSet run_coeffs = coeffs;
    SimulationGrid run_grid = grid;
    if (stopping.kind == StoppingRule::Kind::FixedTime) {
        if (!(stopping.time > 0.0) || !grid.is_aligned(stopping.time))
            throw AlignmentError("dynkin: fixed stopping time must be a positive grid multiple");
        run_coeffs = coeffs.with_region(whole_space());
        run_grid = SimulationGrid(grid.delay(), stopping.time, grid.dt());
    }

    const double f0 = f.value(init.view(), init.current);
    std::vector<double> lhs_samples(static_cast<std::size_t>(n_paths));
    std::vector<double> rhs_samples(static_cast<std::size_t>(n_paths));

    thread_local GeneratorScratch ws;
    for_each_path(run_coeffs, law, init, run_grid, n_paths, master_seed,
                  [&](long i, const PathResult& p) {
                      double integral = 0.0;
                      PathWalker walker(p);
                      while (!walker.done()) {
                          const SegmentView view = walker.view();
                          const auto x = walker.current();
                          const double gamma_term =
                              f.has_gamma_analytic()
                                  ? f.gamma_analytic(view, x)
                                  : gamma_fd_view(f, view, x, h, ws.shift_buf);
                          integral += generator_formula(f, run_coeffs, walker.control(), view, x,
                                                        gamma_term, ws) * p.dt;
                          walker.advance();
                      }
                      lhs_samples[static_cast<std::size_t>(i)] =
                          f.value(walker.view(), walker.current());
                      rhs_samples[static_cast<std::size_t>(i)] = f0 + integral;
                  },
                  workers);

    DynkinReport report;
    report.lhs = summarize(lhs_samples, master_seed);
    report.rhs = summarize(rhs_samples, master_seed);
    report.gap = std::abs(report.lhs.mean - report.rhs.mean);
    return report;
}

DirichletReport dirichlet_poisson_estimate(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                           const ControlledState& init, const SimulationGrid& grid,
                                           const RunningCostFn& g, const TerminalCostFn& psi,
                                           long n_paths, std::uint64_t master_seed, int workers) {
    if (!g || !psi) throw std::invalid_argument("dirichlet: source g and boundary psi are required");
    if (n_paths < 2) throw std::invalid_argument("dirichlet: n_paths must be >= 2");

    CoefficientSet problem = coeffs;
    problem.running_cost = g;
    problem.terminal_cost = psi;

    const auto payoff = [&](const PathResult& p) {
        const auto exit_view = p.exit_state.view();
        return p.running_cost_integral + psi(exit_view, p.exit_state.current);
    };

    DirichletReport report;

    // pilot: censored fraction and the integrability proxy E int |g| dt
    {
        CoefficientSet pilot_problem = problem;
        pilot_problem.running_cost = [&g](const SegmentView& seg, std::span<const double> x,
                                          std::span<const double> u) { return std::abs(g(seg, x, u)); };
        const long pilot_n = std::min<long>(n_paths, 1000);
        const BatchSamples pilot = monte_carlo_samples(
            pilot_problem, law, init, grid, pilot_n, master_seed,
            [](const PathResult& p) { return p.running_cost_integral; }, workers);
        const MonteCarloEstimate abs_g = summarize(pilot.payoffs, master_seed);
        report.pilot_abs_source_integral = abs_g.mean;
        report.pilot_censored_fraction =
            static_cast<double>(pilot.censored_count) / static_cast<double>(pilot_n);
    }

    const BatchEstimate main = monte_carlo_batch(problem, law, init, grid, n_paths,
                                                 master_seed, payoff, workers);
    report.estimate = main.estimate;
    report.censored_fraction = main.censored_fraction;
    report.censored_warning = report.pilot_censored_fraction > 0.01 ||
                              report.censored_fraction > 0.01 ||
                              !std::isfinite(report.pilot_abs_source_integral);
    return report;
}

double dirichlet_consistency(const SmoothFunctional& w, const CoefficientSet& coeffs,
                             const MarkovControlLaw& law, const RunningCostFn& g,
                             std::span<const ControlledState> states, double h) {
    double worst = 0.0;
    for (const auto& state : states) {
        const auto view = state.view();
        const std::vector<double> control = law.evaluate(view, state.current);
        const double residual =
            generator_apply(w, coeffs, control, state, h) + g(view, state.current, control);
        worst = std::max(worst, std::abs(residual));
    }
    return worst;
}

} // namespace sfde
