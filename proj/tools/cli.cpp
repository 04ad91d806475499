#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfde/config.hpp"
#include "sfde/csv.hpp"

namespace sfde::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    int workers = 1;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
};

struct RunContext {
    ExperimentConfig config;
    CommonOptions options;
    fs::path out;
    ordered_json manifest;

    std::uint64_t seed() const {
        return options.has_seed_override ? options.seed_override : config.master_seed;
    }

    fs::path artifact(const std::string& name) {
        manifest["outputs"].push_back(name);
        return out / name;
    }

    void finish(const std::string& command) {
        manifest["command"] = command;
        manifest["version"] = kVersion;
        manifest["master_seed"] = seed();
        manifest["workers"] = options.workers;
        std::ofstream file(out / "manifest.json");
        file << manifest.dump(2) << '\n';
    }
};

RunContext make_context(const CommonOptions& options, const std::string& command) {
    RunContext ctx{load_config_file(options.config_path), options, {}, {}};
    std::string dir = !options.out_dir.empty() ? options.out_dir
                      : !ctx.config.output_dir.empty() ? ctx.config.output_dir
                                                       : std::string(".");
    ctx.out = fs::path(dir);
    fs::create_directories(ctx.out);
    ctx.manifest["command"] = command;
    ctx.manifest["config"] = ordered_json::parse(config_echo_json(ctx.config));
    ctx.manifest["outputs"] = ordered_json::array();
    return ctx;
}

ordered_json estimate_json(const MonteCarloEstimate& est) {
    return {{"mean", est.mean},
            {"std_error", est.std_error},
            {"n_paths", est.n_paths},
            {"master_seed", est.master_seed}};
}

int cmd_simulate(const CommonOptions& options) {
    RunContext ctx = make_context(options, "simulate");
    const auto coeffs = ctx.config.coefficients();
    const auto grid = ctx.config.grid();
    const auto init = ctx.config.initial_state();
    const auto law = ctx.config.fixed_law();
    const NoiseStream stream(ctx.seed(), static_cast<std::uint64_t>(ctx.config.path_index),
                             coeffs.noise_dim);
    const PathResult path = simulate_path(coeffs, law, init, grid, stream);

    std::ofstream csv(ctx.artifact("paths.csv"));
    write_path_csv(csv, path);
    ctx.manifest["results"] = {{"exit_time", path.exit_time},
                               {"censored", path.censored},
                               {"running_cost_integral", path.running_cost_integral},
                               {"path_index", ctx.config.path_index}};
    ctx.finish("simulate");
    return 0;
}

int cmd_generator(const CommonOptions& options) {
    RunContext ctx = make_context(options, "generator");
    const auto coeffs = ctx.config.coefficients();
    const auto grid = ctx.config.grid();
    const auto init = ctx.config.initial_state();
    const auto law = ctx.config.fixed_law();
    const auto f = ctx.config.functional_object();
    const double h = ctx.config.generator_h > 0.0 ? ctx.config.generator_h : 4.0 * grid.dt();

    const GeneratorReport report = generator_report(f, coeffs, law, init, grid, h,
                                                    ctx.config.n_paths, ctx.seed(),
                                                    options.workers);

    std::ofstream csv(ctx.artifact("generator.csv"));
    write_generator_csv_header(csv);
    write_generator_csv_row(csv, report);
    ctx.manifest["results"] = {{"analytic", report.analytic},
                               {"monte_carlo", estimate_json(report.monte_carlo)},
                               {"h", report.h_used},
                               {"discrepancy", report.discrepancy}};
    ctx.finish("generator");
    return 0;
}

int cmd_dynkin(const CommonOptions& options) {
    RunContext ctx = make_context(options, "dynkin");
    const auto coeffs = ctx.config.coefficients();
    const auto grid = ctx.config.grid();
    const auto init = ctx.config.initial_state();
    const auto law = ctx.config.fixed_law();
    const auto f = ctx.config.functional_object();

    const DynkinReport report =
        dynkin_check(f, coeffs, law, init, grid, ctx.config.stopping_rule(), ctx.config.n_paths,
                     ctx.seed(), options.workers, ctx.config.generator_h);

    std::ofstream csv(ctx.artifact("generator.csv"));
    write_generator_csv_header(csv);
    write_generator_csv_row(csv, report);
    ctx.manifest["results"] = {{"lhs", estimate_json(report.lhs)},
                               {"rhs", estimate_json(report.rhs)},
                               {"gap", report.gap}};
    ctx.finish("dynkin");
    return 0;
}

int cmd_dirichlet(const CommonOptions& options) {
    RunContext ctx = make_context(options, "dirichlet");
    const auto coeffs = ctx.config.coefficients();
    const auto grid = ctx.config.grid();
    const auto init = ctx.config.initial_state();
    const auto law = ctx.config.fixed_law();

    const DirichletReport report =
        dirichlet_poisson_estimate(coeffs, law, init, grid, coeffs.running_cost,
                                   coeffs.terminal_cost, ctx.config.n_paths, ctx.seed(),
                                   options.workers);

    std::ofstream csv(ctx.artifact("generator.csv"));
    write_generator_csv_header(csv);
    write_generator_csv_row(csv, report);
    ctx.manifest["results"] = {{"estimate", estimate_json(report.estimate)},
                               {"censored_fraction", report.censored_fraction},
                               {"censored_warning", report.censored_warning},
                               {"pilot_censored_fraction", report.pilot_censored_fraction},
                               {"pilot_abs_source_integral", report.pilot_abs_source_integral}};
    ctx.finish("dirichlet");
    return 0;
}

int cmd_hjb(const CommonOptions& options) {
    RunContext ctx = make_context(options, "hjb");
    const auto coeffs = ctx.config.coefficients();
    const auto grid = ctx.config.grid();
    const auto init = ctx.config.initial_state();
    const auto f = ctx.config.functional_object();
    const ControlGrid control_grid = ctx.config.hjb_control_grid();
    const double h = ctx.config.generator_h > 0.0 ? ctx.config.generator_h : 4.0 * grid.dt();

    const HJBReport report =
        hjb_residual(f, coeffs, control_grid, init, h, ctx.config.direction_enum());

    std::ofstream csv(ctx.artifact("mcurve.csv"));
    write_mcurve_csv(csv, control_grid, report);
    ctx.manifest["results"] = {{"residual", report.residual},
                               {"argmin_control", report.argmin_control},
                               {"h", h}};
    ctx.finish("hjb");
    return 0;
}

int cmd_policy_search(const CommonOptions& options) {
    RunContext ctx = make_context(options, "policy-search");
    const auto coeffs = ctx.config.coefficients();
    const auto grid = ctx.config.grid();
    const auto init = ctx.config.initial_state();
    const auto family = ctx.config.control_family();

    const PolicyRanking ranking =
        policy_search(coeffs, family, init, grid, ctx.config.n_paths, ctx.seed(),
                      ctx.config.direction_enum(), options.workers);

    std::ofstream csv(ctx.artifact("ranking.csv"));
    write_ranking_csv(csv, ranking);
    ordered_json rows = ordered_json::array();
    for (const auto& row : ranking.rows)
        rows.push_back({{"law_id", row.law_id},
                        {"mean", row.estimate.mean},
                        {"std_error", row.estimate.std_error},
                        {"censored_fraction", row.censored_fraction}});
    ctx.manifest["results"] = {{"ranking", rows}};
    ctx.finish("policy-search");
    return 0;
}

int cmd_portfolio(const CommonOptions& options) {
    RunContext ctx = make_context(options, "portfolio");
    if (ctx.config.model_kind != ExperimentConfig::ModelKind::Portfolio)
        throw ConfigError("portfolio: config must use the portfolio model");
    const auto grid = ctx.config.grid();
    const auto init = ctx.config.initial_state();
    const double h = ctx.config.generator_h > 0.0 ? ctx.config.generator_h : 4.0 * grid.dt();

    const PortfolioReport report = portfolio_experiment(
        ctx.config.portfolio, init, grid, ctx.config.n_paths, ctx.seed(), ctx.config.family,
        ctx.config.hjb_control_grid(), h, options.workers);

    {
        std::ofstream csv(ctx.artifact("ranking.csv"));
        write_ranking_csv(csv, report.ranking);
    }
    {
        std::ofstream csv(ctx.artifact("mcurve.csv"));
        write_mcurve_csv(csv, report.initial_curve);
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.ranking.rows)
        rows.push_back({{"law_id", row.law_id},
                        {"mean", row.estimate.mean},
                        {"std_error", row.estimate.std_error},
                        {"censored_fraction", row.censored_fraction}});
    ctx.manifest["results"] = {
        {"ranking", rows},
        {"closed_form_rank", report.closed_form_rank},
        {"optimal_fraction", report.initial_fraction.fraction},
        {"optimal_fraction_unclamped", report.initial_fraction.unclamped},
        {"optimal_fraction_interior", report.initial_fraction.interior},
        {"boundary_residual", report.initial_curve.boundary_residual},
        {"mcurve_argmax", report.initial_curve.argmax_control},
        {"closed_form_clamped_fraction", report.closed_form_clamped_fraction}};
    ctx.finish("portfolio");
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Controlled stochastic delay equations: simulation, generator checks, "
                 "exit-time functionals and portfolio policy search"};
    app.require_subcommand(1);

    CommonOptions options;
    const auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* config_opt = sub->add_option("--config", options.config_path, "JSON config file");
        if (needs_config) config_opt->required();
        sub->add_option("--out", options.out_dir, "output directory (overrides config)");
        sub->add_option("--workers", options.workers, "worker thread count")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed-override", options.seed_override,
                        "replace the config master seed")
            ->each([&](const std::string&) { options.has_seed_override = true; });
    };

    int (*handler)(const CommonOptions&) = nullptr;
    const auto bind = [&](CLI::App* sub, int (*fn)(const CommonOptions&)) {
        sub->callback([&handler, fn]() { handler = fn; });
        add_common(sub, true);
    };

    bind(app.add_subcommand("simulate", "integrate one path and write paths.csv"), cmd_simulate);
    bind(app.add_subcommand("generator", "analytic vs Monte Carlo generator at the initial state"),
         cmd_generator);
    bind(app.add_subcommand("dynkin", "both sides of the Dynkin identity"), cmd_dynkin);
    bind(app.add_subcommand("dirichlet", "exit-time value estimate with source and boundary data"),
         cmd_dirichlet);
    bind(app.add_subcommand("hjb", "control sweep of the dynamic programming residual"), cmd_hjb);
    bind(app.add_subcommand("policy-search", "rank a control family under common random numbers"),
         cmd_policy_search);
    bind(app.add_subcommand("portfolio", "the delayed portfolio experiment"), cmd_portfolio);
    auto* selftest_cmd = app.add_subcommand("selftest", "run the bundled example suite");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (selftest_cmd->parsed()) return selftest();

    try {
        return handler ? handler(options) : 1;
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace sfde::cli
