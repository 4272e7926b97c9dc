// kerrsim — sideband spectroscopy simulator for flux-coupled Kerr oscillators
#include "kerrsim/cli_runner.hpp"

#include "CLI11.hpp"

#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"kerrsim: driven-dissipative simulation and spectral analysis of two "
                 "flux-coupled Kerr-nonlinear oscillators"};
    app.require_subcommand(1);

    kerrsim::cli::RunConfig rc;
    std::vector<std::string> overrides;

    const std::vector<std::string> commands = {"derive",    "sweep-rsb", "sweep-bsb", "regime-map",
                                               "phase-map", "fit",       "validate"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", rc.config_path, "JSON config file");
        sub->add_option("--out", rc.out_dir, "output directory")->capture_default_str();
        sub->add_option("--workers", rc.workers, "worker threads (0 = auto)");
        sub->add_option("--seed", rc.seed, "RNG seed for synthetic noise");
        sub->add_option("--override", overrides, "dot-path config override key=value")
            ->take_all();
        sub->callback([&rc, name] { rc.command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "{\"error\":{\"kind\":\"config\",\"message\":\"bad override '%s'\"}}\n",
                         kv.c_str());
            return 2;
        }
        rc.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return kerrsim::cli::run(rc);
}
