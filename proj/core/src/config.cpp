#include "sfde/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sfde/csv.hpp"

namespace sfde {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("config: unknown key '" + where + "/" + item.key() + "'");
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("config: missing key '" + where + "/" + key + "'");
    }
    if (!obj[key].is_number())
        throw ConfigError("config: key '" + where + "/" + key + "' must be a number");
    return obj[key].get<double>();
}

CoefficientTable parse_coefficient_table(const json& obj, const std::string& where) {
    require_keys(obj, where, {"const", "x", "delayed", "norm_feedback", "control", "control_x"});
    CoefficientTable t;
    t.constant = get_number(obj, where, "const", 0.0);
    t.x = get_number(obj, where, "x", 0.0);
    t.delayed = get_number(obj, where, "delayed", 0.0);
    t.norm_feedback = get_number(obj, where, "norm_feedback", 0.0);
    t.control = get_number(obj, where, "control", 0.0);
    t.control_x = get_number(obj, where, "control_x", 0.0);
    return t;
}

CostTable parse_cost_table(const json& obj, const std::string& where) {
    require_keys(obj, where, {"const", "x", "x_sq", "u_sq", "power_coef", "power"});
    CostTable t;
    t.constant = get_number(obj, where, "const", 0.0);
    t.x_coef = get_number(obj, where, "x", 0.0);
    t.x_sq = get_number(obj, where, "x_sq", 0.0);
    t.u_sq = get_number(obj, where, "u_sq", 0.0);
    t.power_coef = get_number(obj, where, "power_coef", 0.0);
    t.power = get_number(obj, where, "power", 1.0);
    return t;
}

} // namespace

CoefficientSet ExperimentConfig::coefficients() const {
    if (model_kind == ModelKind::Portfolio) return portfolio_coefficients(portfolio);

    const TableModel model = table;
    CoefficientSet coeffs;
    coeffs.state_dim = 1;
    coeffs.noise_dim = 1;
    coeffs.control_dim = 1;
    coeffs.drift = [model](const SegmentView& seg, std::span<const double> x,
                           std::span<const double> u, std::span<double> out) {
        out[0] = model.drift.eval(seg, x[0], u[0]);
    };
    coeffs.diffusion = [model](const SegmentView& seg, std::span<const double> x,
                               std::span<const double> u, std::span<double> out) {
        out[0] = model.diffusion.eval(seg, x[0], u[0]);
    };
    const CostTable L = model.running_cost;
    coeffs.running_cost = [L](const SegmentView&, std::span<const double> x,
                              std::span<const double> u) {
        return L.constant + L.x_coef * x[0] + L.x_sq * x[0] * x[0] + L.u_sq * u[0] * u[0] +
               (L.power_coef != 0.0 ? L.power_coef * std::pow(x[0], L.power) : 0.0);
    };
    const CostTable psi = model.terminal_cost;
    coeffs.terminal_cost = [psi](const SegmentView&, std::span<const double> x) {
        return psi.constant + psi.x_coef * x[0] + psi.x_sq * x[0] * x[0] +
               (psi.power_coef != 0.0 ? psi.power_coef * std::pow(x[0], psi.power) : 0.0);
    };
    if (model.region.kind == RegionSpec::Kind::Interval) {
        const double lo = model.region.lo;
        const double hi = model.region.hi;
        coeffs.region = [lo, hi](const SegmentView&, std::span<const double> x) {
            return x[0] > lo && x[0] < hi;
        };
    } else {
        coeffs.region = whole_space();
    }
    return coeffs;
}

ControlledState ExperimentConfig::initial_state() const {
    const SimulationGrid g = grid();
    SegmentPath seg = [&]() {
        switch (initial.kind) {
            case InitialSpec::Kind::Constant:
                return SegmentPath::constant(initial.value, g.history_steps(), g.dt());
            case InitialSpec::Kind::Linear:
                return SegmentPath::linear(initial.from, initial.to, g.history_steps(), g.dt());
            case InitialSpec::Kind::Csv: {
                std::ifstream in(initial.csv_path);
                if (!in) throw ConfigError("config: cannot open segment csv '" + initial.csv_path + "'");
                SegmentPath loaded = read_segment_csv(in, g.dt());
                if (loaded.points() != g.history_steps() + 1)
                    throw ConfigError("config: segment csv length does not match grid r/dt");
                return loaded;
            }
        }
        throw ConfigError("config: bad initial segment kind");
    }();

    ControlledState state = ControlledState::from_segment(std::move(seg));
    if (initial.x0) state.current[0] = *initial.x0;
    return state;
}

MarkovControlLaw ExperimentConfig::fixed_law() const {
    return MarkovControlLaw::constant_scalar(
        control_value, ControlBounds::scalar(control_bounds[0], control_bounds[1]));
}

std::vector<MarkovControlLaw> ExperimentConfig::control_family() const {
    std::vector<MarkovControlLaw> laws;
    for (double v : family)
        laws.push_back(MarkovControlLaw::constant_scalar(
            v, ControlBounds::scalar(control_bounds[0], control_bounds[1])));
    if (include_closed_form) {
        if (model_kind != ModelKind::Portfolio)
            throw ConfigError("config: include_closed_form requires the portfolio model");
        laws.push_back(optimal_fraction_law(portfolio));
    }
    if (laws.empty()) throw ConfigError("config: control family is empty");
    return laws;
}

ControlGrid ExperimentConfig::hjb_control_grid() const {
    return ControlGrid::linspace(control_grid_lo, control_grid_hi, control_grid_points);
}

SmoothFunctional ExperimentConfig::functional_object() const {
    switch (functional.kind) {
        case FunctionalSpec::Kind::XPower:
            return power_functional(functional.power);
        case FunctionalSpec::Kind::NormSqXPower:
            return candidate_functional(functional.power);
        case FunctionalSpec::Kind::Linear:
            return linear_functional({functional.coefficient});
    }
    throw ConfigError("config: bad functional kind");
}

StoppingRule ExperimentConfig::stopping_rule() const {
    if (stopping.kind == StoppingSpec::Kind::Fixed) return StoppingRule::fixed(stopping.time);
    return StoppingRule::region_exit();
}

Direction ExperimentConfig::direction_enum() const {
    if (direction == "minimize") return Direction::Minimize;
    if (direction == "maximize") return Direction::Maximize;
    throw ConfigError("config: direction must be 'minimize' or 'maximize'");
}

ExperimentConfig parse_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    require_keys(root, "",
                 {"model", "grid", "initial", "control", "functional", "stopping", "direction",
                  "n_paths", "master_seed", "path_index", "generator_h", "output_dir"});

    ExperimentConfig cfg;

    // model
    if (!root.contains("model")) throw ConfigError("config: missing key '/model'");
    {
        const json& model = root["model"];
        if (!model.is_object() || !model.contains("type"))
            throw ConfigError("config: '/model' must be an object with a 'type'");
        const std::string type = model["type"].get<std::string>();
        if (type == "portfolio") {
            require_keys(model, "model", {"type", "mu", "k", "sigma", "p"});
            cfg.model_kind = ExperimentConfig::ModelKind::Portfolio;
            cfg.portfolio.mu = get_number(model, "model", "mu");
            cfg.portfolio.k = get_number(model, "model", "k");
            cfg.portfolio.sigma = get_number(model, "model", "sigma");
            cfg.portfolio.p = get_number(model, "model", "p");
        } else if (type == "table") {
            require_keys(model, "model",
                         {"type", "drift", "diffusion", "running_cost", "terminal_cost", "region"});
            cfg.model_kind = ExperimentConfig::ModelKind::Table;
            if (model.contains("drift"))
                cfg.table.drift = parse_coefficient_table(model["drift"], "model/drift");
            if (model.contains("diffusion"))
                cfg.table.diffusion = parse_coefficient_table(model["diffusion"], "model/diffusion");
            if (model.contains("running_cost"))
                cfg.table.running_cost = parse_cost_table(model["running_cost"], "model/running_cost");
            if (model.contains("terminal_cost"))
                cfg.table.terminal_cost =
                    parse_cost_table(model["terminal_cost"], "model/terminal_cost");
            if (model.contains("region")) {
                const json& region = model["region"];
                require_keys(region, "model/region", {"type", "lo", "hi"});
                const std::string rtype = region["type"].get<std::string>();
                if (rtype == "interval") {
                    cfg.table.region.kind = RegionSpec::Kind::Interval;
                    cfg.table.region.lo = get_number(region, "model/region", "lo");
                    cfg.table.region.hi = get_number(region, "model/region", "hi");
                } else if (rtype == "none") {
                    cfg.table.region.kind = RegionSpec::Kind::None;
                } else {
                    throw ConfigError("config: '/model/region/type' must be 'interval' or 'none'");
                }
            }
        } else {
            throw ConfigError("config: '/model/type' must be 'portfolio' or 'table'");
        }
    }

    // grid
    if (!root.contains("grid")) throw ConfigError("config: missing key '/grid'");
    {
        const json& grid = root["grid"];
        require_keys(grid, "grid", {"r", "a", "dt"});
        cfg.grid_r = get_number(grid, "grid", "r");
        cfg.grid_a = get_number(grid, "grid", "a");
        cfg.grid_dt = get_number(grid, "grid", "dt");
        if (cfg.model_kind == ExperimentConfig::ModelKind::Portfolio) {
            cfg.portfolio.delay_r = cfg.grid_r;
            cfg.portfolio.horizon_a = cfg.grid_a;
            cfg.portfolio.dt = cfg.grid_dt;
        }
    }

    // initial
    if (!root.contains("initial")) throw ConfigError("config: missing key '/initial'");
    {
        const json& initial = root["initial"];
        require_keys(initial, "initial", {"segment", "x"});
        if (!initial.contains("segment"))
            throw ConfigError("config: missing key '/initial/segment'");
        const json& seg = initial["segment"];
        require_keys(seg, "initial/segment", {"type", "value", "from", "to", "path"});
        const std::string type = seg.contains("type") ? seg["type"].get<std::string>() : "constant";
        if (type == "constant") {
            cfg.initial.kind = InitialSpec::Kind::Constant;
            cfg.initial.value = get_number(seg, "initial/segment", "value");
        } else if (type == "linear") {
            cfg.initial.kind = InitialSpec::Kind::Linear;
            cfg.initial.from = get_number(seg, "initial/segment", "from");
            cfg.initial.to = get_number(seg, "initial/segment", "to");
        } else if (type == "csv") {
            cfg.initial.kind = InitialSpec::Kind::Csv;
            if (!seg.contains("path"))
                throw ConfigError("config: missing key '/initial/segment/path'");
            cfg.initial.csv_path = seg["path"].get<std::string>();
        } else {
            throw ConfigError("config: '/initial/segment/type' must be constant, linear or csv");
        }
        if (initial.contains("x")) cfg.initial.x0 = get_number(initial, "initial", "x");
    }

    // control
    if (root.contains("control")) {
        const json& control = root["control"];
        require_keys(control, "control",
                     {"family", "include_closed_form", "bounds", "value", "grid"});
        if (control.contains("family")) {
            if (!control["family"].is_array())
                throw ConfigError("config: '/control/family' must be an array");
            for (const auto& v : control["family"]) {
                if (!v.is_number()) throw ConfigError("config: '/control/family' entries must be numbers");
                cfg.family.push_back(v.get<double>());
            }
        }
        if (control.contains("include_closed_form")) {
            if (!control["include_closed_form"].is_boolean())
                throw ConfigError("config: '/control/include_closed_form' must be a boolean");
            cfg.include_closed_form = control["include_closed_form"].get<bool>();
        }
        if (control.contains("bounds")) {
            if (!control["bounds"].is_array() || control["bounds"].size() != 2)
                throw ConfigError("config: '/control/bounds' must be [lo, hi]");
            cfg.control_bounds = {control["bounds"][0].get<double>(),
                                  control["bounds"][1].get<double>()};
        }
        if (control.contains("value"))
            cfg.control_value = get_number(control, "control", "value");
        if (control.contains("grid")) {
            const json& cg = control["grid"];
            require_keys(cg, "control/grid", {"lo", "hi", "points"});
            cfg.control_grid_lo = get_number(cg, "control/grid", "lo");
            cfg.control_grid_hi = get_number(cg, "control/grid", "hi");
            cfg.control_grid_points = static_cast<int>(get_number(cg, "control/grid", "points"));
        }
    }

    // functional
    if (root.contains("functional")) {
        const json& fn = root["functional"];
        require_keys(fn, "functional", {"type", "power", "coefficient"});
        const std::string type = fn.contains("type") ? fn["type"].get<std::string>() : "x_power";
        if (type == "x_power") {
            cfg.functional.kind = FunctionalSpec::Kind::XPower;
        } else if (type == "norm_sq_x_power") {
            cfg.functional.kind = FunctionalSpec::Kind::NormSqXPower;
        } else if (type == "linear") {
            cfg.functional.kind = FunctionalSpec::Kind::Linear;
        } else {
            throw ConfigError("config: '/functional/type' must be x_power, norm_sq_x_power or linear");
        }
        cfg.functional.power = get_number(fn, "functional", "power", 2.0);
        cfg.functional.coefficient = get_number(fn, "functional", "coefficient", 1.0);
    }

    // stopping
    if (root.contains("stopping")) {
        const json& stop = root["stopping"];
        require_keys(stop, "stopping", {"type", "time"});
        const std::string type = stop.contains("type") ? stop["type"].get<std::string>() : "fixed";
        if (type == "fixed") {
            cfg.stopping.kind = StoppingSpec::Kind::Fixed;
            cfg.stopping.time = get_number(stop, "stopping", "time");
        } else if (type == "exit") {
            cfg.stopping.kind = StoppingSpec::Kind::Exit;
        } else {
            throw ConfigError("config: '/stopping/type' must be 'fixed' or 'exit'");
        }
    }

    if (root.contains("direction")) {
        if (!root["direction"].is_string())
            throw ConfigError("config: '/direction' must be a string");
        cfg.direction = root["direction"].get<std::string>();
        cfg.direction_enum(); // validate
    }

    if (root.contains("n_paths")) {
        if (!root["n_paths"].is_number_integer() || root["n_paths"].get<long>() < 1)
            throw ConfigError("config: '/n_paths' must be a positive integer");
        cfg.n_paths = root["n_paths"].get<long>();
    }

    if (!root.contains("master_seed"))
        throw ConfigError("config: '/master_seed' is mandatory (reproducibility, no wall-clock default)");
    if (!root["master_seed"].is_number_unsigned() && !root["master_seed"].is_number_integer())
        throw ConfigError("config: '/master_seed' must be an unsigned integer");
    cfg.master_seed = root["master_seed"].get<std::uint64_t>();
    cfg.seed_given = true;

    if (root.contains("path_index")) {
        if (!root["path_index"].is_number_integer() || root["path_index"].get<long>() < 0)
            throw ConfigError("config: '/path_index' must be a nonnegative integer");
        cfg.path_index = root["path_index"].get<long>();
    }
    if (root.contains("generator_h")) cfg.generator_h = get_number(root, "", "generator_h");
    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string())
            throw ConfigError("config: '/output_dir' must be a string");
        cfg.output_dir = root["output_dir"].get<std::string>();
    }

    // cross-field validation
    cfg.grid();
    if (cfg.model_kind == ExperimentConfig::ModelKind::Portfolio) cfg.portfolio.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string config_echo_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json out;
    if (cfg.model_kind == ExperimentConfig::ModelKind::Portfolio) {
        out["model"] = {{"type", "portfolio"},
                        {"mu", cfg.portfolio.mu},
                        {"k", cfg.portfolio.k},
                        {"sigma", cfg.portfolio.sigma},
                        {"p", cfg.portfolio.p}};
    } else {
        out["model"] = {{"type", "table"}};
    }
    out["grid"] = {{"r", cfg.grid_r}, {"a", cfg.grid_a}, {"dt", cfg.grid_dt}};
    out["n_paths"] = cfg.n_paths;
    out["master_seed"] = cfg.master_seed;
    out["direction"] = cfg.direction;
    return out.dump(2);
}

} // namespace sfde
