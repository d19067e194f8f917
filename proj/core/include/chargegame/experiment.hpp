#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chargegame/grouping.hpp"
#include "chargegame/model.hpp"
#include "chargegame/montecarlo.hpp"
#include "chargegame/solvers.hpp"

namespace chargegame {

enum class ExperimentKind { solve, poa_sweep, hetero_sweep, valley_fill };

std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::solve;

    // solve
    std::optional<FleetInstance> instance;
    std::optional<GroupedInstance> grouped;  // set when the instance came grouped

    // sweeps
    std::optional<HeterogeneityModel> model;
    std::vector<double> prices;
    std::vector<double> base_load_per_agent;
    std::vector<std::size_t> m_values;
    std::size_t trials = 0;

    SolverConfig solver;
    std::string out_dir = "results";
    bool plot = false;
    bool quiet = false;
    int threads = 0;
};

struct ConfigParse {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;  // JSON-pointer-style locations
    bool ok() const { return errors.empty(); }
};

/// Reads and validates an experiment configuration. Defaults are filled in
/// (tol_x = 1e-9, max_iter = 10000, c = p_max * m for solve configs); every
/// schema violation is collected with its location instead of failing fast.
/// Relative instance_file paths resolve against the config file's directory.
ConfigParse parse_config(const std::string& path);
ConfigParse parse_config_text(const std::string& json_text,
                              const std::string& base_dir = ".");

/// Runs the configured experiment and writes results.csv plus the
/// kind-specific outputs (solution.json, limit.json, profiles.csv,
/// figure.svg) under out_dir. Every emitted file is listed on stdout.
/// Returns 0 on success, 1 on fatal errors, 2 when some trials failed.
int run(const ExperimentConfig& config);

}  // namespace chargegame
