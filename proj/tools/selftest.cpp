#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sfde/csv.hpp"

namespace sfde::cli {

namespace {

struct Harness {
    int failures = 0;
    int total = 0;

    void check(const std::string& name, bool ok) {
        ++total;
        if (!ok) ++failures;
        std::printf("%s %s\n", ok ? "ok  " : "FAIL", name.c_str());
    }
};

CoefficientSet zero_dynamics() {
    CoefficientSet c;
    c.drift = [](const SegmentView&, std::span<const double>, std::span<const double>,
                 std::span<double> out) { out[0] = 0.0; };
    c.diffusion = [](const SegmentView&, std::span<const double>, std::span<const double>,
                     std::span<double> out) { out[0] = 0.0; };
    c.running_cost = zero_running_cost;
    c.terminal_cost = zero_terminal_cost;
    c.region = whole_space();
    return c;
}

MarkovControlLaw idle_law() {
    return MarkovControlLaw::constant("idle", {0.0}, ControlBounds::scalar(-1.0, 1.0));
}

} // namespace

int selftest() {
    Harness h;

    // segment operations
    {
        const SegmentPath unit = SegmentPath::constant(1.0, 100, 0.01);
        h.check("segment_norm of the unit constant history is exactly 1", segment_norm(unit) == 1.0);
        const SegmentPath zero = SegmentPath::constant(0.0, 100, 0.01);
        h.check("segment_norm of the zero history is 0", segment_norm(zero) == 0.0);

        const SegmentPath shifted_id = segment_shift(unit, 1.0, 0.0);
        h.check("segment_shift by t=0 leaves the history unchanged",
                shifted_id.raw().size() == unit.raw().size() &&
                    std::equal(shifted_id.raw().begin(), shifted_id.raw().end(), unit.raw().begin()));

        const SegmentPath lin = SegmentPath::linear(-1.0, 0.0, 100, 0.01);
        const SegmentPath frozen = segment_shift(lin, 7.0, lin.delay());
        bool all_frozen = true;
        for (int i = 0; i < frozen.points(); ++i) all_frozen &= frozen.value(i)[0] == 7.0;
        h.check("segment_shift by t=r freezes the whole history at x", all_frozen);

        std::vector<double> traj(301);
        for (int i = 0; i <= 300; ++i) traj[static_cast<std::size_t>(i)] = 42.0;
        const SegmentPath sub = segment_extract(traj, 1, 0.01, -1.0, 100, 1.5);
        bool constant_segment = true;
        for (int i = 0; i < sub.points(); ++i) constant_segment &= sub.value(i)[0] == 42.0;
        h.check("segment_extract of a constant trajectory is constant", constant_segment);
    }

    // noise stream
    {
        const NoiseStream stream(2024, 5, 1);
        h.check("brownian_increments with n=0 is empty", brownian_increments(stream, 0, 0.01).empty());
        const auto a = brownian_increments(stream, 64, 0.01);
        const auto b = brownian_increments(stream, 64, 0.01);
        h.check("brownian_increments is bitwise deterministic", a == b);
    }

    // simulator
    {
        const SimulationGrid grid(0.1, 1.0, 0.1);
        const auto init = ControlledState::from_segment(SegmentPath::constant(3.0, 1, 0.1));
        const NoiseStream stream(7, 0, 1);
        const PathResult path = simulate_path(zero_dynamics(), idle_law(), init, grid, stream);
        bool constant_path = !path.censored ? false : true;
        for (double v : path.trajectory) constant_path &= v == 3.0;
        h.check("zero dynamics give a constant trajectory censored at the horizon", constant_path);

        auto outside = zero_dynamics();
        outside.region = [](const SegmentView&, std::span<const double>) { return false; };
        const PathResult immediate = simulate_path(outside, idle_law(), init, grid, stream);
        h.check("a start outside G exits immediately at start_time",
                immediate.exit_time == 0.0 && !immediate.censored &&
                    immediate.exit_state.current[0] == 3.0);

        const auto one = monte_carlo_batch(zero_dynamics(), idle_law(), init, grid, 64, 99,
                                           [](const PathResult&) { return 1.0; });
        h.check("payoff identically 1 estimates mean 1 with zero std error",
                one.estimate.mean == 1.0 && one.estimate.std_error == 0.0);

        const auto again = monte_carlo_batch(zero_dynamics(), idle_law(), init, grid, 64, 99,
                                             [](const PathResult&) { return 1.0; });
        h.check("same seed twice gives bitwise identical means",
                one.estimate.mean == again.estimate.mean);

        const double dev = flow_property_check(zero_dynamics(), idle_law(), init, grid, 0.0, stream);
        h.check("flow property at t1=0 has exactly zero deviation", dev == 0.0);

        const auto everything = transition_probability_estimate(
            zero_dynamics(), idle_law(), init, grid, 0.5,
            [](const SegmentView&, std::span<const double>) { return true; }, 128, 4);
        const auto nothing = transition_probability_estimate(
            zero_dynamics(), idle_law(), init, grid, 0.5,
            [](const SegmentView&, std::span<const double>) { return false; }, 128, 4);
        h.check("transition probability of the full event is 1, of the empty event 0",
                everything.mean == 1.0 && nothing.mean == 0.0);

        const auto moments =
            moment_diagnostics(zero_dynamics(), idle_law(), init, grid, 128, 11);
        h.check("zero dynamics report a degenerate increment exponent", moments.degenerate);
    }

    // generator calculus
    {
        const SimulationGrid grid(0.1, 1.0, 0.1);
        const auto init = ControlledState::from_segment(SegmentPath::constant(1.0, 1, 0.1));
        const SmoothFunctional square = power_functional(2.0);
        h.check("gamma of a segment-independent functional is 0",
                gamma_forward_difference(square, init, 0.1) == 0.0);

        const SmoothFunctional candidate = candidate_functional(0.5);
        const auto flat = ControlledState::from_segment(SegmentPath::constant(2.0, 10, 0.01));
        h.check("gamma of the candidate functional vanishes on a constant history",
                gamma_forward_difference(candidate, flat, 0.04) == 0.0 &&
                    gamma_apply(candidate, flat, 0.04) == 0.0);

        const SmoothFunctional flat_f = constant_functional(5.0);
        auto drift_c = zero_dynamics();
        drift_c.drift = [](const SegmentView&, std::span<const double>, std::span<const double>,
                           std::span<double> out) { out[0] = 0.3; };
        const std::vector<double> v{0.0};
        h.check("generator of a constant functional is 0",
                generator_apply(flat_f, drift_c, v, init, 0.1) == 0.0);
        h.check("generator of f=x under drift c is c",
                generator_apply(linear_functional({1.0}), drift_c, v, init, 0.1) == 0.3);

        const auto weak = weak_generator_estimate(flat_f, drift_c, idle_law(), init, grid, 0.2, 64, 5);
        h.check("weak generator of a constant functional is 0 with zero std error",
                weak.mean == 0.0 && weak.std_error == 0.0);

        const auto dynkin = dynkin_check(square, zero_dynamics(), idle_law(), init, grid,
                                         StoppingRule::fixed(1.0), 64, 3);
        h.check("static process balances the Dynkin identity exactly",
                dynkin.gap == 0.0 && dynkin.lhs.mean == 1.0);

        const auto dirichlet = dirichlet_poisson_estimate(
            zero_dynamics().with_region([](const SegmentView&, std::span<const double> x) {
                return x[0] < 2.0; // never exits, censors; harmless for psi = 1
            }),
            idle_law(), init, grid, zero_running_cost,
            [](const SegmentView&, std::span<const double>) { return 1.0; }, 64, 17);
        h.check("dirichlet value with g=0, psi=1 is exactly 1",
                dirichlet.estimate.mean == 1.0 && dirichlet.estimate.std_error == 0.0);
    }

    // optimizer
    {
        const SimulationGrid grid(0.1, 1.0, 0.1);
        const auto init = ControlledState::from_segment(SegmentPath::constant(1.0, 1, 0.1));
        auto coeffs = zero_dynamics();
        coeffs.terminal_cost = [](const SegmentView&, std::span<const double>) { return 1.0; };
        const auto cost1 = cost_functional(coeffs, idle_law(), init, grid, 64, 21);
        h.check("cost functional with L=0, psi=1 is exactly 1", cost1.estimate.mean == 1.0);

        auto clock = zero_dynamics();
        clock.running_cost = [](const SegmentView&, std::span<const double>,
                                std::span<const double>) { return 1.0; };
        const auto costT = cost_functional(clock, idle_law(), init, grid, 64, 21);
        h.check("cost functional with L=1 on a never-exited horizon T=1 is T",
                std::abs(costT.estimate.mean - 1.0) < 1e-12);

        auto flat_cost = zero_dynamics();
        flat_cost.running_cost = [](const SegmentView&, std::span<const double>,
                                    std::span<const double>) { return 0.7; };
        const auto report = hjb_residual(constant_functional(1.0), flat_cost,
                                         ControlGrid::linspace(0.0, 1.0, 11), init, 0.1);
        h.check("hjb residual with constant L=c and constant f is c",
                std::abs(report.residual - 0.7) < 1e-15);

        auto rising = zero_dynamics();
        rising.running_cost = [](const SegmentView&, std::span<const double>,
                                 std::span<const double> u) { return u[0]; };
        const auto argmin = pointwise_optimal_control(constant_functional(1.0), rising,
                                                      ControlGrid::linspace(0.2, 1.0, 9), init, 0.1);
        h.check("monotone objective picks the smallest grid control", argmin[0] == 0.2);

        const auto single = pointwise_optimal_control(constant_functional(1.0), flat_cost,
                                                      ControlGrid::linspace(0.4, 0.4, 1), init, 0.1);
        h.check("a single-point control grid is its own argmin", single[0] == 0.4);

        const std::vector<MarkovControlLaw> pair{
            MarkovControlLaw::constant("a", {0.3}, ControlBounds::unit_interval()),
            MarkovControlLaw::constant("b", {0.9}, ControlBounds::unit_interval())};
        const auto tie = policy_search(coeffs, pair, init, grid, 64, 31);
        h.check("control-independent dynamics tie bitwise under common random numbers",
                tie.rows[0].estimate.mean == tie.rows[1].estimate.mean);

        const auto probe = admissibility_probe(
            MarkovControlLaw::constant("c", {0.5}, ControlBounds::unit_interval()), 200, 13, {});
        h.check("a constant law has zero Lipschitz ratio and bounded growth ratio",
                probe.lipschitz_ratio_max == 0.0 && probe.growth_ratio_max <= 0.25);
    }

    // portfolio example
    {
        PortfolioParams params;
        params.mu = 0.06;
        params.k = 0.04;
        params.sigma = 0.4;
        params.p = 0.5;
        params.delay_r = 0.2;
        params.horizon_a = 0.4;
        params.dt = 0.01;
        const auto grid = params.grid();
        const auto init =
            ControlledState::from_segment(SegmentPath::constant(1.0, grid.history_steps(), grid.dt()));

        const auto coeffs = portfolio_coefficients(params);
        const NoiseStream stream(3, 0, 1);
        const auto risk_free = simulate_path(
            coeffs, MarkovControlLaw::constant("u0", {0.0}, ControlBounds::unit_interval()), init,
            grid, stream);
        bool increasing = true;
        for (int i = grid.history_steps(); i + 1 < grid.history_steps() + 1 + risk_free.steps_taken(); ++i)
            increasing &= risk_free.state_at_index(i + 1)[0] > risk_free.state_at_index(i)[0];
        h.check("risk-free portfolio wealth strictly increases", increasing);

        auto zero_init = init;
        zero_init.current[0] = 0.0;
        const auto absorbed = simulate_path(
            coeffs, MarkovControlLaw::constant("u1", {1.0}, ControlBounds::unit_interval()),
            zero_init, grid, stream);
        h.check("zero wealth is absorbed at zero",
                absorbed.exit_state.current[0] == 0.0);

        PortfolioParams flat = params;
        flat.k = flat.mu;
        const auto fraction = optimal_fraction(flat, init);
        h.check("zero excess return makes the optimal fraction 0",
                fraction.fraction == 0.0 && fraction.interior);

        const auto report = portfolio_experiment(params, init, grid, 64, 41, std::vector<double>{0.0},
                                                 ControlGrid::linspace(0.0, 1.0, 101), 4 * grid.dt());
        const auto& rows = report.ranking.rows;
        bool found = false;
        for (const auto& row : rows)
            if (row.law_id == "const_0" && row.estimate.std_error == 0.0) found = true;
        h.check("the all-risk-free family member has zero std error", found);
    }

    std::printf("selftest: %d/%d checks passed\n", h.total - h.failures, h.total);
    return h.failures == 0 ? 0 : 1;
}

} // namespace sfde::cli
