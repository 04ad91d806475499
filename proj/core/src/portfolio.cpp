#include "sfde/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfde {

void PortfolioParams::validate() const {
    // k == mu is allowed: zero excess return is a legitimate degenerate probe
    if (k > mu) throw std::invalid_argument("portfolio: requires k <= mu");
    if (!(sigma > 0.0)) throw std::invalid_argument("portfolio: sigma must be positive");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("portfolio: p must lie in (0, 1)");
    grid(); // grid invariants
}

CoefficientSet portfolio_coefficients(const PortfolioParams& params) {
    return portfolio_coefficients(params, whole_space());
}

CoefficientSet portfolio_coefficients(const PortfolioParams& params, RegionFn region) {
    params.validate();
    const double mu = params.mu;
    const double k = params.k;
    const double sigma = params.sigma;
    const double p = params.p;

    CoefficientSet coeffs;
    coeffs.state_dim = 1;
    coeffs.noise_dim = 1;
    coeffs.control_dim = 1;
    coeffs.drift = [mu, k](const SegmentView& seg, std::span<const double> x,
                           std::span<const double> u, std::span<double> out) {
        const double frac = std::clamp(u[0], 0.0, 1.0);
        out[0] = (mu * frac + k * (1.0 - frac)) * x[0] / (1.0 + seg.norm());
    };
    coeffs.diffusion = [sigma](const SegmentView& seg, std::span<const double> x,
                               std::span<const double> u, std::span<double> out) {
        const double frac = std::clamp(u[0], 0.0, 1.0);
        out[0] = sigma * frac * x[0] / (1.0 + seg.norm());
    };
    coeffs.running_cost = zero_running_cost;
    coeffs.terminal_cost = [p](const SegmentView&, std::span<const double> x) {
        return std::pow(x[0], p);
    };
    coeffs.region = std::move(region);
    return coeffs;
}

OptimalFraction optimal_fraction(const PortfolioParams& params, const ControlledState& state) {
    params.validate();
    if (!(state.current[0] > 0.0))
        throw std::invalid_argument("optimal fraction: requires x > 0");
    OptimalFraction out;
    const double nrm = segment_norm(state.segment);
    out.unclamped = (params.mu - params.k) * (1.0 + nrm) /
                    (params.sigma * params.sigma * (1.0 - params.p));
    out.interior = out.unclamped >= 0.0 && out.unclamped <= 1.0;
    out.fraction = std::clamp(out.unclamped, 0.0, 1.0);
    return out;
}

MarkovControlLaw optimal_fraction_law(const PortfolioParams& params) {
    params.validate();
    const double mu = params.mu;
    const double k = params.k;
    const double denom = params.sigma * params.sigma * (1.0 - params.p);
    return MarkovControlLaw(
        "closed_form", ControlBounds::unit_interval(),
        [mu, k, denom](const SegmentView& seg, std::span<const double>, std::span<double> out) {
            out[0] = (mu - k) * (1.0 + seg.norm()) / denom;
        });
}

SmoothFunctional candidate_functional(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("candidate: p must lie in (0, 1)");
    SmoothFunctional f;
    f.value = [p](const SegmentView& seg, std::span<const double> x) {
        const double nrm = seg.norm();
        return nrm * nrm * std::pow(x[0], p);
    };
    f.grad_x = [p](const SegmentView& seg, std::span<const double> x, std::span<double> grad) {
        const double nrm = seg.norm();
        grad[0] = nrm * nrm * p * std::pow(x[0], p - 1.0);
    };
    f.hess_x = [p](const SegmentView& seg, std::span<const double> x, std::span<double> hess) {
        const double nrm = seg.norm();
        hess[0] = nrm * nrm * p * (p - 1.0) * std::pow(x[0], p - 2.0);
    };
    // gamma of ||phi||^2 x^p along the shift: x^p (x^2 - phi(-r)^2)
    f.gamma_analytic = [p](const SegmentView& seg, std::span<const double> x) {
        const double oldest = seg.front()[0];
        return std::pow(x[0], p) * (x[0] * x[0] - oldest * oldest);
    };
    return f;
}

double boundary_identity_residual(const PortfolioParams& params, const ControlledState& state) {
    params.validate();
    const double x = state.current[0];
    const double nrm = segment_norm(state.segment);
    const double nrm_sq = nrm * nrm;
    const double oldest = state.segment.value(0)[0];
    const double excess = params.mu - params.k;
    return params.p * excess * excess * nrm_sq /
               (2.0 * params.sigma * params.sigma * (1.0 - params.p)) +
           params.k * params.p * nrm_sq / (1.0 + nrm) + x * x - oldest * oldest;
}

CandidateValueReport candidate_value_check(const PortfolioParams& params,
                                           const ControlledState& state,
                                           const ControlGrid& control_grid, double h) {
    params.validate();
    if (!(state.current[0] > 0.0))
        throw std::invalid_argument("candidate check: requires x > 0");
    if (!(segment_norm(state.segment) > 0.0))
        throw std::invalid_argument("candidate check: requires ||phi|| > 0");
    if (control_grid.points.empty())
        throw std::invalid_argument("candidate check: control grid must be nonempty");

    const CoefficientSet coeffs = portfolio_coefficients(params);
    const SmoothFunctional f = candidate_functional(params.p);

    CandidateValueReport report;
    report.controls.reserve(control_grid.size());
    report.m_values.reserve(control_grid.size());
    for (std::size_t i = 0; i < control_grid.size(); ++i) {
        const auto& v = control_grid.points[i];
        report.controls.push_back(v[0]);
        const double m = generator_apply(f, coeffs, v, state, h);
        report.m_values.push_back(m);
        if (report.argmax_index < 0 || m > report.m_values[static_cast<std::size_t>(report.argmax_index)])
            report.argmax_index = static_cast<int>(i);
    }
    report.argmax_control = report.controls[static_cast<std::size_t>(report.argmax_index)];
    report.boundary_residual = boundary_identity_residual(params, state);
    report.gamma_fd_error = std::abs(gamma_forward_difference(f, state, h) -
                                     f.gamma_analytic(state.view(), state.current));
    return report;
}

ControlledState make_boundary_state(const PortfolioParams& params, const SegmentPath& base_shape) {
    params.validate();
    if (base_shape.dim() != 1)
        throw std::invalid_argument("boundary state: scalar segments only");

    std::vector<double> values(base_shape.raw().begin(), base_shape.raw().end());
    const auto residual_at = [&](double oldest) {
        values[0] = oldest;
        const ControlledState probe =
            ControlledState::from_segment(SegmentPath(values, 1, base_shape.dt()));
        return boundary_identity_residual(params, probe);
    };

    // residual(0) = positive terms + x^2 > 0 and the -phi(-r)^2 term dominates
    // for large phi(-r) (dt * coefficient < 1), so a root is bracketed
    double lo = 0.0;
    double hi = std::max(1.0, 2.0 * std::abs(base_shape.value(0)[0]));
    double r_lo = residual_at(lo);
    if (!(r_lo > 0.0))
        throw std::invalid_argument("boundary state: residual at phi(-r)=0 must be positive");
    double r_hi = residual_at(hi);
    int expansions = 0;
    while (r_hi > 0.0 && expansions++ < 200) {
        hi *= 2.0;
        r_hi = residual_at(hi);
    }
    if (r_hi > 0.0)
        throw std::runtime_error("boundary state: could not bracket the identity root");

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double r_mid = residual_at(mid);
        if (r_mid > 0.0) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    const double root = 0.5 * (lo + hi);
    values[0] = root;
    return ControlledState::from_segment(SegmentPath(values, 1, base_shape.dt()));
}

PortfolioReport portfolio_experiment(const PortfolioParams& params, const ControlledState& init,
                                     const SimulationGrid& grid, long n_paths,
                                     std::uint64_t master_seed,
                                     std::span<const double> constant_fractions,
                                     const ControlGrid& mcurve_grid, double h, int workers) {
    params.validate();
    const CoefficientSet coeffs = portfolio_coefficients(params);

    std::vector<MarkovControlLaw> family;
    family.reserve(constant_fractions.size() + 1);
    for (double v : constant_fractions)
        family.push_back(MarkovControlLaw::constant_scalar(v));
    family.push_back(optimal_fraction_law(params));

    PortfolioReport report;
    report.ranking =
        policy_search(coeffs, family, init, grid, n_paths, master_seed, Direction::Maximize, workers);
    report.closed_form_rank = report.ranking.rank_of("closed_form");
    report.initial_fraction = optimal_fraction(params, init);
    report.initial_curve = candidate_value_check(params, init, mcurve_grid, h);

    // clamp diagnostic: share of closed-form control evaluations pinned at a bound
    const long pilot = std::min<long>(n_paths, 100);
    long clamped = 0, total = 0;
    for_each_path(coeffs, family.back(), init, grid, pilot, master_seed,
                  [&](long, const PathResult& p) {
                      for (int s = 0; s < p.steps_taken(); ++s) {
                          const double u = p.control_trace[static_cast<std::size_t>(s)];
                          clamped += (u <= 0.0 || u >= 1.0) ? 1 : 0;
                          ++total;
                      }
                  },
                  1);
    report.closed_form_clamped_fraction =
        total > 0 ? static_cast<double>(clamped) / static_cast<double>(total) : 0.0;
    return report;
}

} // namespace sfde
