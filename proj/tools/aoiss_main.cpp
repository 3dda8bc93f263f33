#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aoiss/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"aoiss - energy-minimal packet transmission under a peak AoI constraint"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string policy;
    std::string power;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const std::vector<std::string> experiments = {"simulate", "oracle",  "ratio",
                                                  "adversary", "sweep_X", "sweep_WD",
                                                  "sweep_D",  "trace",   "validate"};
    for (const auto& name : experiments) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)");
        sub->add_option("--seed", seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--policy", policy, "greedy or fcfs (overrides config)");
        sub->add_option("--power", power,
                        "power spec: poly:alpha=<a> | exp | table:<csv> (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);

    aoiss::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = aoiss::load_config(config_path);
        cfg.experiment = aoiss::experiment_from_string(app.get_subcommands().front()->get_name());
        if (seed_set) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!policy.empty()) cfg.policy = policy;
        if (!power.empty()) cfg.power_spec = power;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return aoiss::run_experiment(cfg);
}
