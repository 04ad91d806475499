#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "sfde/simulator.hpp"

using namespace sfde;
using namespace sfde::testing;

TEST_CASE("zero dynamics hold the state constant until the horizon") {
    const SimulationGrid grid(0.1, 1.0, 0.1);
    const auto init = point_state(2.5, 0.1);
    const PathResult path =
        simulate_path(make_const(0.0, 0.0), idle_law(), init, grid, NoiseStream(1, 0, 1));
    CHECK(path.censored);
    CHECK(path.exit_time == 1.0);
    for (double v : path.trajectory) CHECK(v == 2.5);
}

TEST_CASE("method of steps oracle: dS = S(t-1) dt from a unit history") {
    const double dt = 1e-3;
    const SimulationGrid grid(1.0, 2.0, dt);
    const auto init = ControlledState::from_segment(SegmentPath::constant(1.0, 1000, dt));
    const PathResult path =
        simulate_path(make_delay_drift(), idle_law(), init, grid, NoiseStream(1, 0, 1));

    const MethodOfStepsOracle oracle(2);
    CHECK(oracle(1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(oracle(2.0) == doctest::Approx(3.5).epsilon(1e-15));

    const int R = grid.history_steps();
    CHECK(std::abs(path.state_at_index(R + 1000)[0] - 2.0) < 0.01);
    CHECK(std::abs(path.state_at_index(R + 2000)[0] - 3.5) < 0.01);

    // Euler stays O(dt)-close to the piecewise-polynomial solution throughout
    double sup_err = 0.0;
    for (int k = 0; k <= 2000; k += 10)
        sup_err = std::max(sup_err, std::abs(path.state_at_index(R + k)[0] - oracle(k * dt)));
    CHECK(sup_err < 0.01);
}

TEST_CASE("delay-free exponential growth reaches e at t = 1") {
    const double dt = 1e-3;
    const SimulationGrid grid(dt, 1.0, dt);
    const PathResult path = simulate_path(make_gbm(1.0, 0.0), idle_law(), point_state(1.0, dt),
                                          grid, NoiseStream(1, 0, 1));
    const double e = std::exp(1.0);
    CHECK(std::abs(path.exit_state.current[0] - e) < 3.0 * e * dt);
}

TEST_CASE("exit times: deterministic descent, censoring, immediate exit") {
    const double dt = 1e-3;
    const SimulationGrid grid(dt, 2.0, dt);

    SUBCASE("unit descent from 1 exits the half line at t = 1") {
        auto coeffs = make_const(-1.0, 0.0);
        coeffs.region = [](const SegmentView&, std::span<const double> x) { return x[0] > 0.0; };
        const PathResult path =
            simulate_path(coeffs, idle_law(), point_state(1.0, dt), grid, NoiseStream(1, 0, 1));
        const auto [tau, state] = exit_time(path);
        CHECK(!path.censored);
        CHECK(std::abs(tau - 1.0) <= dt + 1e-12);
        CHECK(state.current[0] <= 0.0 + 1e-9);
    }

    SUBCASE("region always true censors at the horizon") {
        const PathResult path = simulate_path(make_const(-1.0, 0.0), idle_law(),
                                              point_state(1.0, dt), grid, NoiseStream(1, 0, 1));
        CHECK(path.censored);
        CHECK(path.exit_time == grid.horizon());
    }

    SUBCASE("start outside the region exits at start_time with the initial state") {
        auto coeffs = make_const(-1.0, 0.0);
        coeffs.region = [](const SegmentView&, std::span<const double> x) { return x[0] > 5.0; };
        const PathResult path =
            simulate_path(coeffs, idle_law(), point_state(1.0, dt), grid, NoiseStream(1, 0, 1));
        CHECK(path.exit_time == 0.0);
        CHECK(path.exit_state.current[0] == 1.0);
        CHECK(path.steps_taken() == 0);
    }
}

TEST_CASE("monte carlo batch: GBM mean, determinism, worker invariance") {
    const double dt = 1e-3;
    const SimulationGrid grid(dt, 1.0, dt);
    const auto coeffs = make_gbm(0.05, 0.2);
    const auto payoff = [](const PathResult& p) { return p.exit_state.current[0]; };

    const BatchEstimate est = monte_carlo_batch(coeffs, idle_law(), point_state(1.0, dt), grid,
                                                20000, 314159, payoff, 2);
    const double exact = std::exp(0.05); // 1.0512710963760241
    CHECK(std::abs(est.estimate.mean - exact) <= 3.0 * est.estimate.std_error + 1e-4);
    CHECK(est.censored_fraction == 1.0);

    const BatchEstimate rerun = monte_carlo_batch(coeffs, idle_law(), point_state(1.0, dt), grid,
                                                  20000, 314159, payoff, 2);
    CHECK(est.estimate.mean == rerun.estimate.mean);

    const BatchEstimate serial = monte_carlo_batch(coeffs, idle_law(), point_state(1.0, dt), grid,
                                                   20000, 314159, payoff, 1);
    const BatchEstimate wide = monte_carlo_batch(coeffs, idle_law(), point_state(1.0, dt), grid,
                                                 20000, 314159, payoff, 5);
    CHECK(serial.estimate.mean == est.estimate.mean);
    CHECK(wide.estimate.mean == est.estimate.mean);
    CHECK(serial.estimate.std_error == wide.estimate.std_error);
}

TEST_CASE("flow property: restart reproduces the path") {
    SUBCASE("deterministic delayed dynamics restart exactly") {
        const double dt = 1e-2;
        const SimulationGrid grid(0.5, 2.0, dt);
        const auto init = ControlledState::from_segment(SegmentPath::constant(1.0, 50, dt));
        for (double t1 : {0.0, 0.5, 1.0}) {
            const double dev = flow_property_check(make_delay_drift(), idle_law(), init, grid, t1,
                                                   NoiseStream(5, 0, 1));
            CHECK(dev <= 1e-12);
        }
    }

    SUBCASE("delayed noisy dynamics restart to round-off") {
        PortfolioParams params;
        const auto grid = params.grid(); // r = 0.5, a = 1, dt = 1e-3
        const auto init =
            ControlledState::from_segment(SegmentPath::constant(1.0, grid.history_steps(), grid.dt()));
        const auto coeffs = portfolio_coefficients(params);
        const auto law = optimal_fraction_law(params);
        const double dev =
            flow_property_check(coeffs, law, init, grid, 0.5, NoiseStream(6, 0, 1));
        CHECK(dev <= 1e-10);
    }
}

TEST_CASE("strong error against the exact geometric solution scales as sqrt(dt) or better") {
    const double mu = 0.05, sigma = 0.2, T = 1.0;
    const long paths = 400;
    std::vector<double> log_dt, log_err;
    for (const double dt : {0.04, 0.02, 0.01, 0.005}) {
        const SimulationGrid grid(dt, T, dt);
        const int steps = grid.forward_steps();
        double total_err = 0.0;
        for (long i = 0; i < paths; ++i) {
            const NoiseStream stream(271828, static_cast<std::uint64_t>(i), 1);
            const PathResult path = simulate_path(make_gbm(mu, sigma), idle_law(),
                                                  point_state(1.0, dt), grid, stream);
            // drive the exact solution with the very same increments
            const auto dw = brownian_increments(stream, steps, dt);
            double w = 0.0;
            for (double inc : dw) w += inc;
            total_err += std::abs(path.exit_state.current[0] - gbm_exact(1.0, mu, sigma, T, w));
        }
        log_dt.push_back(std::log(dt));
        log_err.push_back(std::log(total_err / paths));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(log_dt.size());
    for (std::size_t i = 0; i < log_dt.size(); ++i) {
        sx += log_dt[i];
        sy += log_err[i];
        sxx += log_dt[i] * log_dt[i];
        sxy += log_dt[i] * log_err[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 0.4);
    CHECK(slope <= 1.1);
}

TEST_CASE("shrinking the region never lengthens a shared-noise exit time") {
    const double dt = 1e-3;
    const SimulationGrid grid(dt, 2.0, dt);
    auto wide = make_brownian();
    wide.region = interval_region(-1.0, 1.0);
    auto narrow = make_brownian();
    narrow.region = interval_region(-0.5, 0.5);

    for (long i = 0; i < 50; ++i) {
        const NoiseStream stream(31337, static_cast<std::uint64_t>(i), 1);
        const PathResult big =
            simulate_path(wide, idle_law(), point_state(0.0, dt), grid, stream);
        const PathResult small =
            simulate_path(narrow, idle_law(), point_state(0.0, dt), grid, stream);
        CHECK(small.exit_time <= big.exit_time);
        CHECK(big.exit_time <= grid.horizon());
        CHECK(small.exit_time <= grid.horizon());
    }
}

TEST_CASE("moment diagnostics: Brownian exponent near 1, bounded coefficients bounded") {
    const double dt = 1e-2;
    const SimulationGrid grid(dt, 1.0, dt);
    const auto diag =
        moment_diagnostics(make_brownian(), idle_law(), point_state(0.0, dt), grid, 2000, 654321);
    CHECK(!diag.degenerate);
    CHECK(std::abs(diag.increment_exponent - 1.0) <= 0.1);
    CHECK(diag.sup_moment < 10.0);
    CHECK(diag.second_moments.front() == doctest::Approx(0.0));
}

TEST_CASE("transition probability of the Gaussian half line is one half") {
    const double dt = 1e-2;
    const SimulationGrid grid(dt, 1.0, dt);
    const auto est = transition_probability_estimate(
        make_brownian(), idle_law(), point_state(0.0, dt), grid, 1.0,
        [](const SegmentView&, std::span<const double> x) { return x[0] <= 0.0; }, 20000, 31415);
    CHECK(std::abs(est.mean - 0.5) <= 3.0 * est.std_error);
}

TEST_CASE("a diverging path aborts with the offending step and path index") {
    const double dt = 0.5;
    const SimulationGrid grid(dt, 10.0, dt);
    CoefficientSet explode = make_const(0.0, 0.0);
    explode.drift = [](const SegmentView&, std::span<const double> x, std::span<const double>,
                       std::span<double> out) { out[0] = 1e7 * (1.0 + x[0] * x[0]); };
    CHECK_THROWS_AS(
        simulate_path(explode, idle_law(), point_state(1.0, dt), grid, NoiseStream(1, 0, 1)),
        BlowUpError);
    try {
        monte_carlo_batch(explode, idle_law(), point_state(1.0, dt), grid, 8, 1,
                          [](const PathResult&) { return 0.0; }, 2);
        CHECK(false);
    } catch (const BlowUpError& e) {
        CHECK(e.path_index == 0);
        CHECK(e.step_index >= 0);
    }
}
