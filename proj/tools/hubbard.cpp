#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hubbard/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Boltzmann-Hubbard chain solver"};
    app.require_subcommand(1);

    hubbard::JobSpec job;
    std::string config;
    std::string output;
    std::vector<std::string> overrides;
    unsigned threads = 1;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "Evolve the Wigner function and write observables and snapshots"},
        {"stationary", "Fit the stationary state predicted by the conservation laws"},
        {"manifold", "Export collision-manifold samples and a fixed-k1 slice"},
        {"analyze", "Fit entropy decay rates from a simulate run"},
        {"sweep", "Run simulate, stationary and analyze over a list of parameter values"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config, "JSON config file")->required();
        sub->add_option("-o,--output", output, "Output directory (overrides output_dir)");
        sub->add_option("--set", overrides, "Override a config key, e.g. --set model.eta=0.5")->take_all();
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? hubbard::kExitOk : hubbard::kExitUsage;
    }

    job.command = hubbard::command_from_string(app.get_subcommands().front()->get_name());
    job.config_path = config;
    job.output_dir = output;
    job.overrides = overrides;
    job.threads = threads;
    return hubbard::run_job(job, std::cout, std::cerr);
}
