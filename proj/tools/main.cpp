#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chargegame/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"PEV charging game experiments: social optima, Nash equilibria, "
                 "price-of-anarchy and heterogeneity sweeps"};

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> schedule;
    bool plot = false;
    bool quiet = false;

    app.add_option("--config", config_path, "experiment configuration (JSON)")
        ->required();
    app.add_option("--out-dir", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "heterogeneity model seed (overrides config)");
    app.add_option("--schedule", schedule, "sweep schedule: jacobi | gauss-seidel")
        ->check(CLI::IsMember({"jacobi", "gauss-seidel"}));
    app.add_flag("--plot", plot, "also render figure.svg");
    app.add_flag("--quiet", quiet, "suppress progress output");

    CLI11_PARSE(app, argc, argv);

    chargegame::ConfigParse parsed = chargegame::parse_config(config_path);
    if (!parsed.ok()) {
        for (const std::string& e : parsed.errors) {
            std::cerr << "config error: " << e << "\n";
        }
        return 1;
    }
    chargegame::ExperimentConfig config = std::move(*parsed.config);

    if (out_dir) config.out_dir = *out_dir;
    if (plot) config.plot = true;
    if (quiet) config.quiet = true;
    if (seed) {
        if (config.model) {
            config.model->seed = *seed;
        } else {
            std::cerr << "warning: --seed ignored, experiment has no heterogeneity model\n";
        }
    }
    if (schedule) {
        config.solver.schedule = *schedule == "jacobi"
                                     ? chargegame::Schedule::jacobi
                                     : chargegame::Schedule::gauss_seidel;
    }

    return chargegame::run(config);
}
