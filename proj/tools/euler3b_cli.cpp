// Command-line front end: euler3b_cli <command> --config FILE [--out DIR] [--seed N]

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "euler3b/experiment.hpp"
#include "euler3b/normal_form.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Euler-integral experiments for the planar three-body problem"};
    app.require_subcommand(1);
    std::string config, out;
    long long seed = -1;
    for (const std::string& name : e3b::command_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides experiment.out)");
        sub->add_option("--seed", seed, "seed (overrides experiment.seed)")->check(CLI::NonNegativeNumber);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        e3b::ExperimentConfig cfg = e3b::load_config(config);
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!out.empty()) cfg.out = out;
        const e3b::CommandResult r = e3b::run_command(command, cfg, cfg.out);
        std::cout << r.summary;
        for (const std::string& f : r.files) std::cout << "wrote " << f << '\n';
        return 0;
    } catch (const e3b::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const e3b::HypothesisError& e) {
        std::cerr << "hypothesis failed: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
