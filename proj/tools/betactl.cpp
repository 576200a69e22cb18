#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "betactl/cli.hpp"

namespace {

betactl::RunConfig load(const std::string& path) {
    return path.empty() ? betactl::RunConfig{} : betactl::parse_config(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop beta suppression workbench"};
    app.require_subcommand(1);

    int scenario = 1;
    std::string mode = "open";
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    auto* run = app.add_subcommand("run", "simulate one scenario and write its CSV and metrics");
    run->add_option("--scenario", scenario, "scenario id")->required()->check(CLI::Range(1, 3));
    run->add_option("--mode", mode, "loop mode")->required()->check(CLI::IsMember({"open", "closed"}));
    run->add_option("--config", config_path, "TOML config file");
    run->add_option("--seed", seed, "noise seed");
    run->add_option("--out", out_dir, "output directory (overrides BETACTL_OUT)");

    std::string in_dir;
    auto* plot = app.add_subcommand("plot", "render s<id>.svg from CSV pairs");
    plot->add_option("--in", in_dir, "directory holding s<id>_open.csv and s<id>_closed.csv")->required();

    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    verify->add_option("--config", verify_config, "TOML config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            betactl::RunConfig cfg = load(config_path);
            cfg.scenario_id = scenario;
            cfg.mode = betactl::parse_loop_mode(mode);
            if (seed) cfg.seed = *seed;
            return betactl::cmd_run(cfg, betactl::resolve_out_dir(cfg, out_dir), std::cout, std::cerr);
        }
        if (*plot) return betactl::cmd_plot(in_dir, std::cout, std::cerr);
        return betactl::cmd_verify(load(verify_config), std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
