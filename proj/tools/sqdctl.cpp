#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "softqd/cli.hpp"
#include "softqd/common.hpp"

int main(int argc, char** argv) {
    CLI::App app{"soft quality-diversity optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--out", out_override, "output directory (overrides config)");
        sub->add_option("--seed-override", seed_override,
                        "run only this seed instead of the configured list");
    };

    CLI::App* run = app.add_subcommand("run", "optimize and write metrics/population outputs");
    add_common(run);

    std::string sweep_param;
    std::vector<std::string> sweep_values;
    CLI::App* sweep = app.add_subcommand("sweep", "re-run across values of one parameter");
    add_common(sweep);
    sweep->add_option("--param", sweep_param, "parameter to vary")->required();
    sweep->add_option("--values", sweep_values, "values to try")->required()->expected(-1);

    std::uint64_t check_seed = 7;
    CLI::App* check = app.add_subcommand("check", "run the analytic property suite");
    check->add_option("--seed", check_seed, "base seed for the property trials");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11's own exit codes are remapped onto the documented contract:
        // 0 for --help, 1 for any usage error.
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (check->parsed()) return softqd::cmd_check(check_seed);

        softqd::RunConfig cfg;
        if (!config_path.empty()) cfg = softqd::load_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};

        if (run->parsed()) return softqd::cmd_run(cfg);
        return softqd::cmd_sweep(cfg, sweep_param, sweep_values);
    } catch (const softqd::invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
