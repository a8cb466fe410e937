#include <CLI11.hpp>
#include <iostream>

#include "nlhomog/errors.hpp"
#include "nlhomog/runner.hpp"

using namespace nlhomog;

int main(int argc, char** argv) {
    CLI::App app{"Effective drift, correctors and diffusion matrix for periodic "
                 "nonlocal jump operators"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    bool verbose = false;

    for (const char* name : {"cell", "evolve", "einstein", "oracle"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--threads", threads,
                        "worker count (0 = auto; NLHOMOG_THREADS overrides)");
        sub->add_flag("--verbose", verbose, "print progress to stdout");
    }

    CLI11_PARSE(app, argc, argv);
    std::string study = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_config_file(config_path);
        if (!cfg.study.empty() && cfg.study != study)
            throw ConfigError("config study '" + cfg.study + "' does not match subcommand '" +
                              study + "'");
        cfg.study = study;
        return run_study(cfg, out_dir, threads, verbose);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InputError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what()
                  << " (achieved residual " << e.achieved_residual << ")\n";
        return kExitNumerical;
    }
}
