#include "chargegame/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "chargegame/game.hpp"
#include "chargegame/svg.hpp"
#include "json_util.hpp"

namespace chargegame {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::solve: return "solve";
        case ExperimentKind::poa_sweep: return "poa-sweep";
        case ExperimentKind::hetero_sweep: return "hetero-sweep";
        case ExperimentKind::valley_fill: return "valley-fill";
    }
    return "unknown";
}

namespace {

struct Parser {
    const json& j;
    std::vector<std::string>& errors;

    void fail(const std::string& where, const std::string& why) {
        errors.push_back(where + ": " + why);
    }

    bool has(const std::string& key) const { return j.contains(key); }

    std::optional<double> number(const std::string& key, const std::string& where) {
        if (!j.contains(key)) return std::nullopt;
        if (!j.at(key).is_number()) {
            fail(where, "must be a number");
            return std::nullopt;
        }
        return j.at(key).get<double>();
    }

    std::optional<std::vector<double>> number_array(const std::string& key,
                                                    const std::string& where) {
        if (!j.contains(key)) return std::nullopt;
        if (!j.at(key).is_array()) {
            fail(where, "must be an array");
            return std::nullopt;
        }
        std::vector<double> out;
        for (const auto& v : j.at(key)) {
            if (!v.is_number()) {
                fail(where, "entries must be numbers");
                return std::nullopt;
            }
            out.push_back(v.get<double>());
        }
        return out;
    }
};

AgentParams parse_mass_params(const json& jm, const std::string& where, std::size_t h,
                              std::vector<std::string>& errors) {
    AgentParams p;
    if (!jm.contains("gamma") || !jm.at("gamma").is_number()) {
        errors.push_back(where + "/gamma: missing number");
    } else {
        p.gamma = jm.at("gamma").get<double>();
    }
    for (const char* key : {"lower", "upper"}) {
        if (!jm.contains(key) || !jm.at(key).is_array() ||
            (h > 0 && jm.at(key).size() != h)) {
            errors.push_back(where + "/" + key + ": must be an array matching horizon");
            continue;
        }
        std::vector<double> v;
        for (const auto& e : jm.at(key)) v.push_back(e.get<double>());
        if (std::string(key) == "lower") {
            p.lower = std::move(v);
        } else {
            p.upper = std::move(v);
        }
    }
    return p;
}

HeterogeneityModel parse_model(const json& jm, std::size_t horizon,
                               std::vector<std::string>& errors) {
    HeterogeneityModel model;
    if (!jm.contains("kind") || !jm.at("kind").is_string()) {
        errors.push_back("/model/kind: missing string");
        return model;
    }
    const std::string kind = jm.at("kind").get<std::string>();
    if (kind == "continuous-uniform-gamma") {
        model.kind = HeterogeneityKind::continuous_uniform_gamma;
    } else if (kind == "discrete-masses") {
        model.kind = HeterogeneityKind::discrete_masses;
    } else {
        errors.push_back("/model/kind: unknown kind '" + kind + "'");
        return model;
    }
    if (jm.contains("seed")) {
        if (!jm.at("seed").is_number_unsigned() && !jm.at("seed").is_number_integer()) {
            errors.push_back("/model/seed: must be an unsigned integer");
        } else {
            model.seed = jm.at("seed").get<std::uint64_t>();
        }
    }

    if (model.kind == HeterogeneityKind::continuous_uniform_gamma) {
        if (!jm.contains("gamma_support") || !jm.at("gamma_support").is_array() ||
            jm.at("gamma_support").size() != 2) {
            errors.push_back("/model/gamma_support: must be [min, max]");
        } else {
            model.gamma_min = jm.at("gamma_support")[0].get<double>();
            model.gamma_max = jm.at("gamma_support")[1].get<double>();
        }
        for (const char* key : {"lower", "upper"}) {
            if (!jm.contains(key) || !jm.at(key).is_array() ||
                jm.at(key).size() != horizon) {
                errors.push_back(std::string("/model/") + key +
                                 ": must be an array matching horizon");
                continue;
            }
            std::vector<double> v;
            for (const auto& e : jm.at(key)) v.push_back(e.get<double>());
            if (std::string(key) == "lower") {
                model.lower = std::move(v);
            } else {
                model.upper = std::move(v);
            }
        }
    } else {
        if (!jm.contains("masses") || !jm.at("masses").is_array() ||
            jm.at("masses").empty()) {
            errors.push_back("/model/masses: must be a non-empty array");
            return model;
        }
        std::size_t idx = 0;
        for (const auto& e : jm.at("masses")) {
            const std::string where = "/model/masses/" + std::to_string(idx);
            DiscreteMass mass;
            if (!e.contains("probability") || !e.at("probability").is_number()) {
                errors.push_back(where + "/probability: missing number");
            } else {
                mass.probability = e.at("probability").get<double>();
            }
            mass.params = parse_mass_params(e, where, horizon, errors);
            model.masses.push_back(std::move(mass));
            ++idx;
        }
    }

    const ValidationOutcome v = validate_model(model, horizon);
    for (const std::string& msg : v.violations) errors.push_back("/model: " + msg);
    return model;
}

void parse_solver(const json& js, SolverConfig& solver, std::vector<std::string>& errors) {
    Parser p{js, errors};
    if (auto v = p.number("tol_x", "/solver/tol_x")) {
        if (*v <= 0.0) errors.push_back("/solver/tol_x: must be > 0");
        solver.tol_x = *v;
    }
    if (auto v = p.number("tol_residual", "/solver/tol_residual")) {
        if (*v <= 0.0) errors.push_back("/solver/tol_residual: must be > 0");
        solver.tol_residual = *v;
    }
    if (js.contains("max_iter")) {
        if (!js.at("max_iter").is_number_integer() || js.at("max_iter").get<int>() < 1) {
            errors.push_back("/solver/max_iter: must be an integer >= 1");
        } else {
            solver.max_iter = js.at("max_iter").get<int>();
        }
    }
    if (js.contains("c") && !js.at("c").is_null()) {
        if (!js.at("c").is_number() || js.at("c").get<double>() <= 0.0) {
            errors.push_back("/solver/c: must be > 0");
        } else {
            solver.c = js.at("c").get<double>();
        }
    }
    if (js.contains("schedule")) {
        const std::string s =
            js.at("schedule").is_string() ? js.at("schedule").get<std::string>() : "";
        if (s == "gauss-seidel" || s == "gauss_seidel") {
            solver.schedule = Schedule::gauss_seidel;
        } else if (s == "jacobi") {
            solver.schedule = Schedule::jacobi;
        } else {
            errors.push_back("/solver/schedule: must be 'jacobi' or 'gauss-seidel'");
        }
    }
}

bool has_interior_minimum(const std::vector<double>& v) {
    if (v.size() < 3) return false;
    const std::size_t arg =
        std::min_element(v.begin(), v.end()) - v.begin();
    return arg > 0 && arg + 1 < v.size() && v[arg] < v.front() && v[arg] < v.back();
}

}  // namespace

ConfigParse parse_config_text(const std::string& json_text, const std::string& base_dir) {
    ConfigParse out;
    json j;
    try {
        j = detail::parse_json(json_text, "config");
    } catch (const std::exception& e) {
        out.errors.push_back(e.what());
        return out;
    }
    if (!j.is_object()) {
        out.errors.push_back("/: top level must be an object");
        return out;
    }

    ExperimentConfig config;
    auto& errors = out.errors;

    if (!j.contains("experiment") || !j.at("experiment").is_string()) {
        errors.push_back("/experiment: missing string field");
    } else {
        const std::string kind = j.at("experiment").get<std::string>();
        if (kind == "solve") {
            config.kind = ExperimentKind::solve;
        } else if (kind == "poa-sweep") {
            config.kind = ExperimentKind::poa_sweep;
        } else if (kind == "hetero-sweep") {
            config.kind = ExperimentKind::hetero_sweep;
        } else if (kind == "valley-fill") {
            config.kind = ExperimentKind::valley_fill;
        } else {
            errors.push_back("/experiment: unknown kind '" + kind + "'");
        }
    }
    if (!errors.empty()) return out;

    if (j.contains("out_dir")) {
        if (!j.at("out_dir").is_string()) {
            errors.push_back("/out_dir: must be a string");
        } else {
            config.out_dir = j.at("out_dir").get<std::string>();
        }
    }
    if (j.contains("plot")) {
        if (!j.at("plot").is_boolean()) {
            errors.push_back("/plot: must be a boolean");
        } else {
            config.plot = j.at("plot").get<bool>();
        }
    }
    if (j.contains("quiet") && j.at("quiet").is_boolean()) {
        config.quiet = j.at("quiet").get<bool>();
    }
    if (j.contains("threads")) {
        if (!j.at("threads").is_number_integer() || j.at("threads").get<int>() < 0) {
            errors.push_back("/threads: must be an integer >= 0");
        } else {
            config.threads = j.at("threads").get<int>();
        }
    }
    if (j.contains("solver")) {
        if (!j.at("solver").is_object()) {
            errors.push_back("/solver: must be an object");
        } else {
            parse_solver(j.at("solver"), config.solver, errors);
        }
    }

    if (config.kind == ExperimentKind::solve) {
        std::string text;
        std::string where = "/instance";
        if (j.contains("instance_file")) {
            where = "/instance_file";
            if (!j.at("instance_file").is_string()) {
                errors.push_back("/instance_file: must be a string path");
                return out;
            }
            fs::path path = j.at("instance_file").get<std::string>();
            if (path.is_relative()) path = fs::path(base_dir) / path;
            if (!fs::exists(path)) {
                errors.push_back("/instance_file: file does not exist: " + path.string());
                return out;
            }
            text = detail::read_file(path.string());
        } else if (j.contains("instance")) {
            text = j.at("instance").dump();
        } else {
            errors.push_back("/instance: missing (provide instance or instance_file)");
            return out;
        }

        try {
            const json ji = detail::parse_json(text, "instance");
            if (ji.contains("groups")) {
                config.grouped = parse_grouped_instance_text(text);
                config.instance = to_fleet_instance(*config.grouped);
            } else {
                config.instance = parse_instance_text(text);
            }
        } catch (const std::exception& e) {
            errors.push_back(where + ": " + e.what());
            return out;
        }
        const ValidationOutcome v = validate_instance(*config.instance);
        for (const std::string& msg : v.violations) {
            errors.push_back(where + ": " + msg);
        }
        if (!config.solver.c && errors.empty()) {
            config.solver.c = default_regularization(*config.instance);
        }
    } else {
        if (!j.contains("prices")) {
            errors.push_back("/prices: missing field");
            return out;
        }
        Parser p{j, errors};
        if (auto v = p.number_array("prices", "/prices")) {
            config.prices = std::move(*v);
        }
        if (config.prices.empty()) {
            errors.push_back("/prices: must be non-empty");
            return out;
        }
        for (std::size_t t = 0; t < config.prices.size(); ++t) {
            if (!(config.prices[t] > 0.0)) {
                errors.push_back("/prices/" + std::to_string(t) + ": must be > 0");
            }
        }
        const std::size_t h = config.prices.size();

        if (auto v = p.number_array("base_load_per_agent", "/base_load_per_agent")) {
            if (v->size() != h) {
                errors.push_back("/base_load_per_agent: length must match prices");
            }
            for (double e : *v) {
                if (e < 0.0) {
                    errors.push_back("/base_load_per_agent: entries must be >= 0");
                    break;
                }
            }
            config.base_load_per_agent = std::move(*v);
        } else {
            config.base_load_per_agent.assign(h, 0.0);
        }

        if (j.contains("m_values")) {
            if (!j.at("m_values").is_array() || j.at("m_values").empty()) {
                errors.push_back("/m_values: must be a non-empty array");
            } else {
                for (const auto& e : j.at("m_values")) {
                    if (!e.is_number_integer() || e.get<long long>() < 1) {
                        errors.push_back("/m_values: entries must be integers >= 1");
                        break;
                    }
                    config.m_values.push_back(e.get<std::size_t>());
                }
            }
        } else if (config.kind == ExperimentKind::poa_sweep) {
            config.m_values = {5, 10, 20, 50, 100, 200};
        } else if (config.kind == ExperimentKind::hetero_sweep) {
            config.m_values = {25, 100, 400};
        } else {
            config.m_values = {5, 100};
        }

        if (config.kind == ExperimentKind::valley_fill) {
            config.trials = 1;
            if (!has_interior_minimum(config.base_load_per_agent)) {
                errors.push_back("/base_load_per_agent: valley-fill needs an interior minimum");
            }
        } else {
            if (!j.contains("trials") || !j.at("trials").is_number_integer() ||
                j.at("trials").get<long long>() < 1) {
                errors.push_back("/trials: must be an integer >= 1");
            } else {
                config.trials = j.at("trials").get<std::size_t>();
            }
        }

        if (!j.contains("model") || !j.at("model").is_object()) {
            errors.push_back("/model: missing object field");
        } else {
            config.model = parse_model(j.at("model"), h, errors);
            if (config.kind == ExperimentKind::hetero_sweep &&
                config.model->kind != HeterogeneityKind::discrete_masses) {
                errors.push_back("/model/kind: hetero-sweep requires discrete-masses");
            }
        }
    }

    if (errors.empty()) out.config = std::move(config);
    return out;
}

ConfigParse parse_config(const std::string& path) {
    std::string text;
    try {
        text = detail::read_file(path);
    } catch (const std::exception& e) {
        ConfigParse out;
        out.errors.push_back(e.what());
        return out;
    }
    return parse_config_text(text, fs::path(path).parent_path().string());
}

namespace {

json matrix_json(const ChargingMatrix& x) {
    json rows = json::array();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        json row = json::array();
        for (std::size_t t = 0; t < x.cols(); ++t) row.push_back(x(i, t));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_file(const fs::path& path, const std::string& content, bool quiet) {
    std::ofstream outfile(path, std::ios::binary);
    if (!outfile) throw std::runtime_error("cannot write " + path.string());
    outfile << content;
    outfile.close();
    (void)quiet;
    std::cout << "wrote " << path.string() << "\n";
}

int status_exit_code(const std::vector<SweepRecord>& records) {
    for (const SweepRecord& r : records) {
        if (r.status != SolveStatus::converged) return 2;
    }
    return 0;
}

int run_solve(const ExperimentConfig& config) {
    const FleetInstance& instance = *config.instance;
    SolveResult social;
    SolveResult nash;
    if (config.grouped) {
        // Grouped instances are solved through the abstraction and expanded.
        const auto [ps, rs] = solve_grouped(*config.grouped, GroupedProblem::social,
                                            config.solver);
        const auto [pa, ra] = solve_grouped(*config.grouped, GroupedProblem::auxiliary,
                                            config.solver);
        social.x = expand_grouped(*config.grouped, ps);
        social.report = rs;
        nash.x = expand_grouped(*config.grouped, pa);
        nash.report = ra;
    } else {
        social = solve_social(instance, config.solver);
        nash = solve_nash_central(instance, config.solver);
    }

    const double f_social = social.report.objective;
    const double f_nash = nash.report.objective;
    json doc;
    doc["social"] = {{"x", matrix_json(social.x)},
                     {"report", detail::report_json(social.report)}};
    doc["nash"] = {{"x", matrix_json(nash.x)},
                   {"report", detail::report_json(nash.report)}};
    doc["poa"] = f_nash / f_social;
    doc["relative_error"] = (f_nash - f_social) / f_social;

    const fs::path dir = config.out_dir;
    write_file(dir / "solution.json", doc.dump(2) + "\n", config.quiet);

    SweepRecord rec;
    rec.m = instance.agent_count();
    rec.trial = 0;
    rec.seed = 0;
    rec.F_social = f_social;
    rec.F_nash = f_nash;
    rec.rel_error = (f_nash - f_social) / f_social;
    rec.poa = f_nash / f_social;
    rec.normalized_value = f_social / (static_cast<double>(rec.m) * rec.m);
    rec.iters_social = social.report.iterations;
    rec.iters_nash = nash.report.iterations;
    rec.status = social.report.status == SolveStatus::converged
                     ? nash.report.status
                     : social.report.status;
    write_file(dir / "results.csv", records_to_csv({rec}), config.quiet);
    return rec.status == SolveStatus::converged ? 0 : 2;
}

int run_poa_sweep(const ExperimentConfig& config) {
    const ExperimentSetup setup{config.prices, config.base_load_per_agent};
    const std::vector<SweepRecord> records =
        poa_sweep(*config.model, setup, config.m_values, config.trials, config.solver,
                  config.threads);
    const fs::path dir = config.out_dir;
    write_file(dir / "results.csv", records_to_csv(records), config.quiet);
    if (config.plot) {
        write_file(dir / "figure.svg", render_poa_boxplot(records), config.quiet);
    }
    return status_exit_code(records);
}

int run_hetero_sweep(const ExperimentConfig& config) {
    const ExperimentSetup setup{config.prices, config.base_load_per_agent};
    const HeteroSweepResult result =
        hetero_sweep(*config.model, setup, config.m_values, config.trials, config.solver,
                     config.threads);
    const fs::path dir = config.out_dir;
    write_file(dir / "results.csv", records_to_csv(result.records), config.quiet);

    json limit;
    limit["value"] = result.limit.value;
    limit["source"] = "normalized limit problem";
    limit["value_finite_m"] = result.limit.value_finite_m;
    limit["finite_m"] = result.limit.finite_m;
    limit["gap"] = result.limit.gap;
    limit["profiles"] = matrix_json(result.limit.limit_profiles);
    write_file(dir / "limit.json", limit.dump(2) + "\n", config.quiet);

    if (config.plot) {
        write_file(dir / "figure.svg",
                   render_hetero_histograms(result.records, result.limit.value),
                   config.quiet);
    }
    return status_exit_code(result.records);
}

int run_valley_fill(const ExperimentConfig& config) {
    const ExperimentSetup setup{config.prices, config.base_load_per_agent};
    const std::vector<ValleyFillProfiles> profiles =
        valley_fill_experiment(*config.model, setup, config.m_values, config.solver);

    std::vector<SweepRecord> records;
    std::string profile_csv = "m,t,base,social_total,nash_total\n";
    for (const ValleyFillProfiles& p : profiles) {
        records.push_back(p.record);
        for (std::size_t t = 0; t < p.base.size(); ++t) {
            profile_csv += std::to_string(p.m) + "," + std::to_string(t) + "," +
                           format_round_trip(p.base[t]) + "," +
                           format_round_trip(p.social_total[t]) + "," +
                           format_round_trip(p.nash_total[t]) + "\n";
        }
    }
    const fs::path dir = config.out_dir;
    write_file(dir / "results.csv", records_to_csv(records), config.quiet);
    write_file(dir / "profiles.csv", profile_csv, config.quiet);
    if (config.plot) {
        write_file(dir / "figure.svg", render_valley_profiles(profiles), config.quiet);
    }
    return status_exit_code(records);
}

}  // namespace

int run(const ExperimentConfig& config) {
    try {
        fs::create_directories(config.out_dir);
        switch (config.kind) {
            case ExperimentKind::solve: return run_solve(config);
            case ExperimentKind::poa_sweep: return run_poa_sweep(config);
            case ExperimentKind::hetero_sweep: return run_hetero_sweep(config);
            case ExperimentKind::valley_fill: return run_valley_fill(config);
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace chargegame
