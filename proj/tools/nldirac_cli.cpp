#include "nldirac/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Spectral fixed-point solver for nonlinear Dirac boundary value problems"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;

    for (const char* name : {"spectrum", "solve", "check", "sweep", "bootstrap", "functional"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
        sub->add_option("--workers", workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& s) {
                seed = s;
                seed_given = true;
            },
            "seed for randomized estimators");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        nldirac::RunConfig cfg = nldirac::load_config(config_path);
        if (!out_dir.empty()) cfg.run.output_dir = out_dir;
        if (workers > 0) cfg.run.workers = workers;
        if (seed_given) cfg.run.seed = seed;
        return nldirac::run_command(cfg, nldirac::parse_command(command), std::cout);
    } catch (const std::exception& e) {
        std::cerr << "nldirac: " << e.what() << '\n';
        return 1;
    }
}
