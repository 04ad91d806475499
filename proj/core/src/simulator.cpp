#include "sfde/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace sfde {

namespace {

struct SimScratch {
    std::vector<double> u, mu, sigma, dw;
};

void check_setup(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                 const ControlledState& init, const SimulationGrid& grid,
                 const NoiseStream& stream) {
    coeffs.validate();
    init.validate();
    if (init.dim() != coeffs.state_dim)
        throw ShapeError("simulate: state dimension does not match coefficients");
    if (law.control_dim() != coeffs.control_dim)
        throw ShapeError("simulate: control dimension does not match coefficients");
    if (stream.dimension() != coeffs.noise_dim)
        throw ShapeError("simulate: noise dimension does not match coefficients");
    if (init.segment.points() != grid.history_steps() + 1)
        throw std::invalid_argument("simulate: initial segment length does not match grid");
    if (std::abs(init.segment.dt() - grid.dt()) > 1e-12 * grid.dt())
        throw std::invalid_argument("simulate: initial segment dt does not match grid");
}

// Core Euler-Maruyama loop. Noise steps are absolute: the step from time
// k*dt to (k+1)*dt always consumes increment index k.
void simulate_into(PathResult& out, SimScratch& ws, const CoefficientSet& coeffs,
                   const MarkovControlLaw& law, const ControlledState& init,
                   const SimulationGrid& grid, const NoiseStream& stream, double start_time) {
    const int n = coeffs.state_dim;
    const int d = coeffs.noise_dim;
    const int m = coeffs.control_dim;
    const int R = grid.history_steps();
    const int N = grid.forward_steps();
    const double dt = grid.dt();
    const int k0 = grid.step_index(start_time);

    out.dim = n;
    out.control_dim = m;
    out.dt = dt;
    out.start_time = start_time;
    out.history_steps = R;
    out.running_cost_integral = 0.0;
    out.censored = false;

    const int max_points = R + 1 + (N - k0);
    out.trajectory.clear();
    out.trajectory.reserve(static_cast<std::size_t>(max_points) * n);
    out.control_trace.clear();
    out.control_trace.reserve(static_cast<std::size_t>(N - k0) * m);

    // history from the segment, state at start_time from the current vector
    const auto seg_raw = init.segment.raw();
    out.trajectory.insert(out.trajectory.end(), seg_raw.begin(),
                          seg_raw.end() - n);
    out.trajectory.insert(out.trajectory.end(), init.current.begin(), init.current.end());

    ws.u.resize(static_cast<std::size_t>(m));
    ws.mu.resize(static_cast<std::size_t>(n));
    ws.sigma.resize(static_cast<std::size_t>(n) * d);
    ws.dw.resize(static_cast<std::size_t>(d));

    double norm_sq = partial_norm_sq(out.trajectory.data(), R + 1, n);

    int k = k0;
    bool exited = false;
    while (true) {
        const double* base = out.trajectory.data() + out.trajectory.size() -
                             static_cast<std::size_t>(R + 1) * n;
        const SegmentView view{base, R + 1, n, dt, norm_sq};
        const std::span<const double> x{base + static_cast<std::size_t>(R) * n,
                                        static_cast<std::size_t>(n)};
        if (!coeffs.region(view, x)) {
            exited = true;
            out.exit_time = grid.time_at(k);
            break;
        }
        if (k == N) {
            out.censored = true;
            out.exit_time = grid.horizon();
            break;
        }

        law.evaluate(view, x, ws.u);
        coeffs.drift(view, x, ws.u, ws.mu);
        coeffs.diffusion(view, x, ws.u, ws.sigma);
        stream.fill_increment(static_cast<std::uint64_t>(k), dt, ws.dw);
        if (coeffs.running_cost)
            out.running_cost_integral += coeffs.running_cost(view, x, ws.u) * dt;
        out.control_trace.insert(out.control_trace.end(), ws.u.begin(), ws.u.end());

        // rolling left-endpoint norm: x enters the window, the oldest point leaves
        for (int c = 0; c < n; ++c) norm_sq += x[c] * x[c];
        for (int c = 0; c < n; ++c) norm_sq -= base[c] * base[c];

        for (int i = 0; i < n; ++i) {
            double next = x[i] + ws.mu[i] * dt;
            for (int j = 0; j < d; ++j)
                next += ws.sigma[static_cast<std::size_t>(j) * n + i] * ws.dw[static_cast<std::size_t>(j)];
            if (!std::isfinite(next) || std::abs(next) > kBlowUpThreshold)
                throw BlowUpError(k, -1, "simulate: state blew up at step " + std::to_string(k));
            out.trajectory.push_back(next);
        }
        ++k;
    }

    if (exited && k == k0) {
        out.exit_state = init; // immediate exit: the start state is the exit state
    } else {
        out.exit_state = out.state_at(out.exit_time);
    }
}

// Runs fn(path_index) over 0..n-1 on `workers` threads in contiguous chunks.
// Exceptions are collected and the one with the lowest path index rethrown,
// so failures are independent of the worker count too.
void parallel_for_paths(long n_paths, int workers,
                        const std::function<void(long)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n_paths < 2 * workers) {
        for (long i = 0; i < n_paths; ++i) fn(i);
        return;
    }
    struct Failure {
        long path = -1;
        std::exception_ptr error;
    };
    std::vector<Failure> failures(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const long chunk = (n_paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long lo = w * chunk;
        const long hi = std::min(n_paths, lo + chunk);
        pool.emplace_back([&, lo, hi, w]() {
            for (long i = lo; i < hi; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    failures[static_cast<std::size_t>(w)] = {i, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    const Failure* first = nullptr;
    for (const auto& f : failures)
        if (f.error && (!first || f.path < first->path)) first = &f;
    if (first) std::rethrow_exception(first->error);
}

} // namespace

PathResult simulate_path(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                         const ControlledState& init, const SimulationGrid& grid,
                         const NoiseStream& stream, double start_time) {
    check_setup(coeffs, law, init, grid, stream);
    PathResult out;
    SimScratch ws;
    simulate_into(out, ws, coeffs, law, init, grid, stream, start_time);
    return out;
}

void for_each_path(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                   const ControlledState& init, const SimulationGrid& grid, long n_paths,
                   std::uint64_t master_seed, const PathVisitor& visit, int workers) {
    check_setup(coeffs, law, init, grid, NoiseStream(master_seed, 0, coeffs.noise_dim));
    if (n_paths < 1) throw std::invalid_argument("batch: n_paths must be >= 1");

    thread_local PathResult path;
    thread_local SimScratch ws;
    parallel_for_paths(n_paths, workers, [&](long i) {
        const NoiseStream stream(master_seed, static_cast<std::uint64_t>(i), coeffs.noise_dim);
        try {
            simulate_into(path, ws, coeffs, law, init, grid, stream, 0.0);
        } catch (const BlowUpError& e) {
            throw e.with_path(i);
        }
        visit(i, path);
    });
}

BatchSamples monte_carlo_samples(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                 const ControlledState& init, const SimulationGrid& grid,
                                 long n_paths, std::uint64_t master_seed,
                                 const PayoffFn& payoff, int workers) {
    BatchSamples out;
    out.payoffs.assign(static_cast<std::size_t>(std::max(0L, n_paths)), 0.0);
    std::vector<unsigned char> censored(static_cast<std::size_t>(std::max(0L, n_paths)), 0);

    for_each_path(coeffs, law, init, grid, n_paths, master_seed,
                  [&](long i, const PathResult& path) {
                      out.payoffs[static_cast<std::size_t>(i)] = payoff(path);
                      censored[static_cast<std::size_t>(i)] = path.censored ? 1 : 0;
                  },
                  workers);

    for (unsigned char c : censored) out.censored_count += c;
    return out;
}

BatchEstimate monte_carlo_batch(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                const ControlledState& init, const SimulationGrid& grid,
                                long n_paths, std::uint64_t master_seed,
                                const PayoffFn& payoff, int workers) {
    if (n_paths < 2) throw std::invalid_argument("batch: n_paths must be >= 2");
    const BatchSamples samples =
        monte_carlo_samples(coeffs, law, init, grid, n_paths, master_seed, payoff, workers);
    BatchEstimate out;
    out.estimate = summarize(samples.payoffs, master_seed);
    out.censored_fraction =
        static_cast<double>(samples.censored_count) / static_cast<double>(n_paths);
    return out;
}

double flow_property_check(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                           const ControlledState& init, const SimulationGrid& grid,
                           double t1, const NoiseStream& stream) {
    const PathResult full = simulate_path(coeffs, law, init, grid, stream, 0.0);
    if (full.final_time() < t1 - 0.5 * grid.dt())
        throw std::invalid_argument("flow check: path exits before t1");

    const ControlledState mid = full.state_at(t1);
    const PathResult restart = simulate_path(coeffs, law, mid, grid, stream, t1);

    const int n = full.dim;
    const int k1 = grid.step_index(t1);
    const int shared =
        std::min(full.steps_taken() - k1, restart.steps_taken());
    double max_dev = 0.0;
    for (int s = 0; s <= shared; ++s) {
        const auto a = full.state_at_index(full.history_steps + k1 + s);
        const auto b = restart.state_at_index(restart.history_steps + s);
        for (int c = 0; c < n; ++c) max_dev = std::max(max_dev, std::abs(a[c] - b[c]));
    }
    return max_dev;
}

MomentDiagnostics moment_diagnostics(const CoefficientSet& coeffs, const MarkovControlLaw& law,
                                     const ControlledState& init, const SimulationGrid& grid,
                                     long n_paths, std::uint64_t master_seed, int workers) {
    if (n_paths < 2) throw std::invalid_argument("moments: n_paths must be >= 2");
    const CoefficientSet unstopped = coeffs.with_region(whole_space());

    const int N = grid.forward_steps();
    const int n = coeffs.state_dim;
    // per-path rows so the reduction over paths is order-fixed
    std::vector<double> moment_rows(static_cast<std::size_t>(n_paths) * (N + 1), 0.0);
    const int n_lags = 6;
    const int lag_base = grid.step_index(grid.horizon()) / 2;
    std::vector<double> increment_rows(static_cast<std::size_t>(n_paths) * n_lags, 0.0);

    for_each_path(unstopped, law, init, grid, n_paths, master_seed, [&](long i, const PathResult& path) {
        PathWalker walker(path);
        double* row = moment_rows.data() + static_cast<std::size_t>(i) * (N + 1);
        for (int k = 0; k <= N; ++k) {
            double value = walker.view().norm_sq_sum * grid.dt();
            const auto x = walker.current();
            for (int c = 0; c < n; ++c) value += x[c] * x[c];
            row[k] = value;
            if (k < N) walker.advance();
        }
        // squared increments from the mid-horizon anchor, dyadic lags
        double* inc = increment_rows.data() + static_cast<std::size_t>(i) * n_lags;
        const auto anchor = path.state_at_index(path.history_steps + lag_base);
        for (int l = 0; l < n_lags; ++l) {
            const int lag = 1 << l;
            if (lag_base + lag > N) { inc[l] = -1.0; continue; }
            const auto y = path.state_at_index(path.history_steps + lag_base + lag);
            double ss = 0.0;
            for (int c = 0; c < n; ++c) ss += (y[c] - anchor[c]) * (y[c] - anchor[c]);
            inc[l] = ss;
        }
    }, workers);

    MomentDiagnostics out;
    out.times.resize(static_cast<std::size_t>(N) + 1);
    out.second_moments.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int k = 0; k <= N; ++k) out.times[static_cast<std::size_t>(k)] = grid.time_at(k);
    for (long i = 0; i < n_paths; ++i) {
        const double* row = moment_rows.data() + static_cast<std::size_t>(i) * (N + 1);
        for (int k = 0; k <= N; ++k) out.second_moments[static_cast<std::size_t>(k)] += row[k];
    }
    for (auto& m : out.second_moments) m /= static_cast<double>(n_paths);
    out.sup_moment = *std::max_element(out.second_moments.begin(), out.second_moments.end());

    // least-squares slope of log E|S(t+lag)-S(t)|^2 against log(lag)
    std::vector<double> log_lag, log_mean;
    for (int l = 0; l < n_lags; ++l) {
        const int lag = 1 << l;
        if (lag_base + lag > N) continue;
        double mean = 0.0;
        for (long i = 0; i < n_paths; ++i)
            mean += increment_rows[static_cast<std::size_t>(i) * n_lags + l];
        mean /= static_cast<double>(n_paths);
        if (mean <= 1e-300) { out.degenerate = true; break; }
        log_lag.push_back(std::log(lag * grid.dt()));
        log_mean.push_back(std::log(mean));
    }
    if (!out.degenerate && log_lag.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double cnt = static_cast<double>(log_lag.size());
        for (std::size_t i = 0; i < log_lag.size(); ++i) {
            sx += log_lag[i];
            sy += log_mean[i];
            sxx += log_lag[i] * log_lag[i];
            sxy += log_lag[i] * log_mean[i];
        }
        out.increment_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    } else if (log_lag.size() < 2) {
        out.degenerate = true;
    }
    if (out.degenerate) out.increment_exponent = std::numeric_limits<double>::quiet_NaN();
    return out;
}

MonteCarloEstimate transition_probability_estimate(const CoefficientSet& coeffs,
                                                   const MarkovControlLaw& law,
                                                   const ControlledState& init,
                                                   const SimulationGrid& grid, double t,
                                                   const StatePredicate& event, long n_paths,
                                                   std::uint64_t master_seed, int workers) {
    if (n_paths < 1) throw std::invalid_argument("transition: n_paths must be >= 1");
    if (!grid.is_aligned(t)) throw AlignmentError("transition: t is not grid-aligned");

    MonteCarloEstimate est;
    est.n_paths = n_paths;
    est.master_seed = master_seed;

    double hits = 0.0;
    if (t <= 0.0) {
        const auto view = init.view();
        hits = event(view, init.current) ? static_cast<double>(n_paths) : 0.0;
    } else {
        const SimulationGrid sub(grid.delay(), t, grid.dt());
        const CoefficientSet unstopped = coeffs.with_region(whole_space());
        const BatchSamples samples = monte_carlo_samples(
            unstopped, law, init, sub, n_paths, master_seed,
            [&](const PathResult& p) {
                PathWalker walker(p);
                while (!walker.done()) walker.advance();
                return event(walker.view(), walker.current()) ? 1.0 : 0.0;
            },
            workers);
        for (double v : samples.payoffs) hits += v;
    }
    const double p = hits / static_cast<double>(n_paths);
    est.mean = p;
    est.std_error = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n_paths));
    return est;
}

} // namespace sfde
