#include "commands.hpp"

#include "dkm/version.hpp"

#include <CLI11.hpp>

#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Deep Kolmogorov method experiment runner"};
    app.set_version_flag("--version", std::string(dkm::kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "./out";
    std::optional<std::uint64_t> seed;

    const char* names[] = {"train", "rates", "bounds", "fk-check", "mc-rate", "embed-check"};
    const char* descs[] = {
        "Train a network on the Monte-Carlo loss and write checkpoint, history, and report",
        "Run the sample-count and width sweeps and fit the convergence rates",
        "Sweep the a priori bound checkers over random networks",
        "Compare Feynman-Kac estimates against the closed-form solution",
        "Measure the Monte-Carlo L^p convergence rate against the moment bound",
        "Verify the shallow-to-deep embedding preserves realizations",
    };
    for (int i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "Experiment config file")->required();
        sub->add_option("--out", out_dir, "Output directory (default ./out)");
        sub->add_option("--seed", seed, "Seed override (takes precedence over the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage problems share the config-error code
    }
    const std::string name = app.get_subcommands().front()->get_name();
    return dkm::cli::run_command(name, config_path, out_dir, seed);
}
