#include <iostream>

#include <CLI11.hpp>

#include "fcat/config.hpp"
#include "fcat/errors.hpp"
#include "fcat/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Four-component cat state simulations for the qubit-cavity-magnon model"};
    app.set_version_flag("--version", std::string(fcat::kToolVersion));
    app.require_subcommand(1);
    CLI::App* run = app.add_subcommand("run", "run a scenario and write its outputs");
    std::string config_path, scenario, out_dir, preset;
    int workers = 1;
    bool oracle = false;
    run->add_option("--config", config_path, "scenario config file")->check(CLI::ExistingFile);
    run->add_option("--scenario", scenario, "override the config scenario")
        ->check(CLI::IsMember({"fig2_wigner", "fig3_dissipation_scan", "fig4_fidelity_trace", "fig5_fullmodel_wigner",
                               "custom"}));
    run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    run->add_option("--workers", workers, "worker threads for scans and grids")->check(CLI::Range(1, 256));
    run->add_option("--preset", preset, "bundled parameter preset")->check(CLI::IsMember({"paper-set-1", "paper-set-2"}));
    run->add_flag("--oracle-lab-frame", oracle, "add the reduced-truncation full-model cross-check to the dissipation scan");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        fcat::ScenarioConfig cfg;
        const fcat::ConfigOverrides overrides{scenario, preset};
        if (!config_path.empty()) {
            cfg = fcat::parse_config(config_path, overrides);
        } else {
            if (scenario.empty() || preset.empty())
                throw fcat::ConfigError("without --config both --scenario and --preset are required");
            cfg = fcat::parse_config_text("", "<command line>", overrides);
        }
        fcat::RunOptions ro;
        ro.output_dir = out_dir;
        ro.workers = workers;
        ro.oracle_lab_frame = oracle;
        const auto meta = fcat::run_scenario(cfg, ro);
        std::cout << "scenario " << meta["scenario"].get<std::string>() << " done, config_hash "
                  << meta["config_hash"].get<std::string>() << "\n";
        return 0;
    } catch (const fcat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fcat::ModelError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fcat::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
