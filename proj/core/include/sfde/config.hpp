#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfde/coefficients.hpp"
#include "sfde/control_law.hpp"
#include "sfde/generator.hpp"
#include "sfde/grid.hpp"
#include "sfde/optimizer.hpp"
#include "sfde/portfolio.hpp"
#include "sfde/state.hpp"

namespace sfde {

/// Configuration error with the offending key path (JSON pointer style) or
/// parse location baked into the message.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Scalar coefficient table: each entry is a linear combination of features
/// of (segment, x, u). Enough for the test corpus (geometric growth,
/// additive noise, delayed feedback) without an expression parser.
struct CoefficientTable {
    // drift / diffusion features
    double constant = 0.0;
    double x = 0.0;             // coefficient on x
    double delayed = 0.0;       // coefficient on S(t - r)
    double norm_feedback = 0.0; // coefficient on x / (1 + ||phi||)
    double control = 0.0;       // coefficient on u
    double control_x = 0.0;     // coefficient on u * x

    double eval(const SegmentView& seg, double xv, double uv) const {
        double out = constant + x * xv + control * uv + control_x * uv * xv;
        if (delayed != 0.0) out += delayed * seg.front()[0];
        if (norm_feedback != 0.0) out += norm_feedback * xv / (1.0 + seg.norm());
        return out;
    }
};

/// Scalar cost table: L = const + x_coef x + x_sq x^2 + u_sq u^2,
/// psi = const + x_coef x + power_coef x^power.
struct CostTable {
    double constant = 0.0;
    double x_coef = 0.0;
    double x_sq = 0.0;
    double u_sq = 0.0;
    double power_coef = 0.0;
    double power = 1.0;
};

struct RegionSpec {
    enum class Kind { None, Interval } kind = Kind::None;
    double lo = 0.0;
    double hi = 0.0;
};

struct TableModel {
    CoefficientTable drift;
    CoefficientTable diffusion;
    CostTable running_cost;
    CostTable terminal_cost;
    RegionSpec region;
};

struct InitialSpec {
    enum class Kind { Constant, Linear, Csv } kind = Kind::Constant;
    double value = 1.0;       // Constant
    double from = 1.0;        // Linear, value at -r
    double to = 1.0;          // Linear, value at 0
    std::string csv_path;     // Csv
    std::optional<double> x0; // current; defaults to segment(0)
};

struct FunctionalSpec {
    enum class Kind { XPower, NormSqXPower, Linear } kind = Kind::XPower;
    double power = 2.0;
    double coefficient = 1.0;
};

struct StoppingSpec {
    enum class Kind { Fixed, Exit } kind = Kind::Fixed;
    double time = 1.0;
};

/// Parsed run configuration. Strict: unknown keys anywhere are rejected,
/// master_seed is mandatory (no wall-clock fallback).
struct ExperimentConfig {
    enum class ModelKind { Portfolio, Table } model_kind = ModelKind::Table;
    PortfolioParams portfolio;
    TableModel table;

    double grid_r = 1.0;
    double grid_a = 1.0;
    double grid_dt = 1e-3;

    InitialSpec initial;

    std::vector<double> family;     // constant fractions / control values
    bool include_closed_form = false;
    std::vector<double> control_bounds = {0.0, 1.0};
    double control_value = 0.0;     // fixed law for simulate/generator/dynkin/dirichlet
    double control_grid_lo = 0.0;
    double control_grid_hi = 1.0;
    int control_grid_points = 1001;

    FunctionalSpec functional;
    StoppingSpec stopping;
    std::string direction = "minimize";

    long n_paths = 1000;
    std::uint64_t master_seed = 0;
    bool seed_given = false;
    long path_index = 0;
    double generator_h = 0.0; // <= 0 means 4*dt
    std::string output_dir;

    // --- derived objects ---
    SimulationGrid grid() const { return SimulationGrid(grid_r, grid_a, grid_dt); }
    CoefficientSet coefficients() const;
    ControlledState initial_state() const;
    MarkovControlLaw fixed_law() const;
    std::vector<MarkovControlLaw> control_family() const;
    ControlGrid hjb_control_grid() const;
    SmoothFunctional functional_object() const;
    StoppingRule stopping_rule() const;
    Direction direction_enum() const;
};

ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// The config echoed back as canonical JSON (for the run manifest).
std::string config_echo_json(const ExperimentConfig& config);

} // namespace sfde
